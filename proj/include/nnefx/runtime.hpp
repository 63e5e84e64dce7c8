#pragma once

#include <barrier>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nnefx/ast.hpp"
#include "nnefx/coloured.hpp"
#include "nnefx/errors.hpp"
#include "nnefx/eval.hpp"
#include "nnefx/trace.hpp"
#include "nnefx/weights.hpp"

namespace nnefx {

// Injected delay after a named program point: a compute transition, or
// sync_<var> (for the writer: after the send completes; for a reader: after
// its get_var returns).
struct NoisePoint {
  std::string after;
  int64_t delay_ms = 0;
};
using NoiseConfig = std::map<std::string, NoisePoint>;  // item id -> point

inline NoiseConfig noise_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ValidationError, "noise config must be a JSON object");
  NoiseConfig config;
  for (const auto& [item, spec] : j.items()) {
    if (!spec.is_object() || !spec.contains("after") || !spec.contains("delay_ms") ||
        !spec["after"].is_string() || !spec["delay_ms"].is_number_integer())
      throw Error(ErrorKind::ValidationError,
                  "noise entry for '" + item + "' needs string 'after' and integer 'delay_ms'");
    NoisePoint point{spec["after"].get<std::string>(), spec["delay_ms"].get<int64_t>()};
    if (point.delay_ms < 0)
      throw Error(ErrorKind::ValidationError, "noise delay for '" + item + "' must be non-negative");
    config.emplace(item, std::move(point));
  }
  return config;
}

inline NoiseConfig read_noise_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::ValidationError, "'" + path + "' is not valid JSON");
  return noise_from_json(j);
}

struct RunResult {
  TensorMap outputs;
  Trace trace;
  int rendezvous = 0;  // barrier schedule only: rendezvous points passed
};

namespace detail {

inline int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

class TraceCollector {
 public:
  void record(const std::string& item, const std::string& transition, EventKind kind) {
    std::lock_guard lock(mu_);
    trace_.push_back({item, transition, kind, now_ns()});
  }
  Trace take() {
    std::lock_guard lock(mu_);
    return std::move(trace_);
  }

 private:
  std::mutex mu_;
  Trace trace_;
};

// Write-once blocking slots keyed by sync handle name, plus the deadlock
// watchdog: the run is dead when every worker is blocked on an absent slot,
// parked at a barrier, or finished, with at least one blocked reader. A
// reader whose slot is already written is waking, not blocked.
class SharedStore {
 public:
  explicit SharedStore(size_t n_workers) : n_workers_(n_workers) {}

  void write(const std::string& key, Tensor value) {
    std::lock_guard lock(mu_);
    auto [it, inserted] = slots_.try_emplace(key, std::move(value));
    if (!inserted)
      throw Error(ErrorKind::DuplicateWrite, "sync slot '" + key + "' written a second time");
    cv_.notify_all();
  }

  Tensor read(const std::string& key) {
    std::unique_lock lock(mu_);
    if (!slots_.count(key) && !aborted_) {
      auto waiting = blocked_keys_.insert(key);
      flag_deadlock_locked();
      cv_.wait(lock, [&] { return slots_.count(key) > 0 || aborted_; });
      blocked_keys_.erase(waiting);
    }
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
    throw Error(ErrorKind::DeadlockDetected, "blocked on sync slot '" + key + "' when the run stopped");
  }

  void worker_finished() {
    std::lock_guard lock(mu_);
    ++finished_;
    flag_deadlock_locked();
    cv_.notify_all();
  }
  void enter_barrier() {
    std::lock_guard lock(mu_);
    ++at_barrier_;
    flag_deadlock_locked();
    cv_.notify_all();
  }
  void exit_barrier() {
    std::lock_guard lock(mu_);
    --at_barrier_;
  }
  void abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    cv_.notify_all();
  }
  bool aborted() {
    std::lock_guard lock(mu_);
    return aborted_;
  }
  bool deadlocked() {
    std::lock_guard lock(mu_);
    return deadlocked_;
  }

 private:
  void flag_deadlock_locked() {
    if (blocked_keys_.empty()) return;
    if (blocked_keys_.size() + at_barrier_ + finished_ != n_workers_) return;
    for (const auto& key : blocked_keys_)
      if (slots_.count(key)) return;  // satisfied reader, about to wake
    deadlocked_ = true;
    aborted_ = true;
    cv_.notify_all();
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Tensor> slots_;
  size_t n_workers_;
  std::multiset<std::string> blocked_keys_;
  size_t at_barrier_ = 0;
  size_t finished_ = 0;
  bool aborted_ = false;
  bool deadlocked_ = false;
};

struct WorkerContext {
  const ItemProgram& item;
  SharedStore& store;
  TraceCollector& collector;
  const TensorMap& inputs;
  const WeightStore& weights;
  const NoisePoint* noise;  // may be null
  TensorMap env;

  void after_point(const std::string& name) {
    if (noise && noise->after == name)
      std::this_thread::sleep_for(std::chrono::milliseconds(noise->delay_ms));
  }

  void exec_range(size_t begin, size_t end) {
    const auto& id = item.item.item_id;
    for (size_t k = begin; k < end; ++k) {
      if (store.aborted()) throw Error(ErrorKind::ValidationError, "run aborted");
      const Instruction& instr = item.graph.instructions[k];
      switch (instr.op) {
        case Op::VariableSync:
          break;  // declares the handle; no tensor
        case Op::GetVar: {
          Tensor value = store.read(instr.ident_arg(1).name);
          env.emplace(instr.result, std::move(value));
          after_point(sync_transition_name(instr.result));
          break;
        }
        case Op::SendVar: {
          const std::string& payload = instr.ident_arg(1).name;
          const std::string name = sync_transition_name(payload);
          collector.record(id, name, EventKind::Start);
          store.write(instr.result, env.at(payload));
          collector.record(id, name, EventKind::End);
          after_point(name);
          break;
        }
        default: {
          if (is_compute(instr.op)) {
            collector.record(id, instr.result, EventKind::Start);
            env[instr.result] = exec_instruction(instr, env, inputs, weights);
            collector.record(id, instr.result, EventKind::End);
            after_point(instr.result);
          } else {
            env[instr.result] = exec_instruction(instr, env, inputs, weights);
          }
          break;
        }
      }
    }
  }
};

class ErrorLog {
 public:
  void record(std::exception_ptr e) {
    std::lock_guard lock(mu_);
    errors_.push_back(std::move(e));
  }
  void rethrow_first_if_any() {
    std::lock_guard lock(mu_);
    if (!errors_.empty()) std::rethrow_exception(errors_.front());
  }

 private:
  std::mutex mu_;
  std::vector<std::exception_ptr> errors_;
};

inline TensorMap collect_outputs(const std::vector<ItemProgram>& items, const std::vector<TensorMap>& envs) {
  TensorMap outputs;
  for (const auto& out : items[0].graph.outputs) {
    bool found = false;
    for (size_t i = 0; i < items.size() && !found; ++i) {
      for (const auto& instr : items[i].graph.instructions) {
        if (is_compute(instr.op) && instr.result == out) {
          outputs.emplace(out, envs[i].at(out));
          found = true;
          break;
        }
      }
    }
    for (size_t i = 0; i < items.size() && !found; ++i) {  // output declared, not computed
      auto it = envs[i].find(out);
      if (it != envs[i].end()) {
        outputs.emplace(out, it->second);
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::ValidationError, "output '" + out + "' was not produced by any item");
  }
  return outputs;
}

}  // namespace detail

inline RunResult run_items(const std::vector<ItemProgram>& items, const TensorMap& inputs,
                           const WeightStore& weights, const NoiseConfig& noise = {}) {
  if (items.empty()) throw Error(ErrorKind::ValidationError, "no items to run");
  detail::SharedStore store(items.size());
  detail::TraceCollector collector;
  detail::ErrorLog errors;
  std::vector<TensorMap> envs(items.size());

  std::vector<std::thread> workers;
  for (size_t i = 0; i < items.size(); ++i) {
    workers.emplace_back([&, i] {
      const NoisePoint* point = nullptr;
      if (auto it = noise.find(items[i].item.item_id); it != noise.end()) point = &it->second;
      detail::WorkerContext ctx{items[i], store, collector, inputs, weights, point, {}};
      try {
        ctx.exec_range(0, items[i].graph.instructions.size());
        envs[i] = std::move(ctx.env);
        store.worker_finished();
      } catch (...) {
        errors.record(std::current_exception());
        store.abort();
        store.worker_finished();
      }
    });
  }
  for (auto& w : workers) w.join();
  // A true deadlock surfaces as the blocked reader's DeadlockDetected; any
  // earlier worker error wins.
  errors.rethrow_first_if_any();

  RunResult result;
  result.outputs = detail::collect_outputs(items, envs);
  result.trace = collector.take();
  return result;
}

// Stricter schedule: one coordinator item whose sends all precede its reads
// (head + tail), every other item reading from and sending back to the
// coordinator only. All workers rendezvous at three barriers plus the join.
inline RunResult run_barrier_schedule(const std::vector<ItemProgram>& items, const TensorMap& inputs,
                                      const WeightStore& weights) {
  if (items.empty()) throw Error(ErrorKind::ValidationError, "no items to run");

  if (items.size() == 1) {
    for (const auto& instr : items[0].graph.instructions)
      if (is_sync_op(instr.op))
        throw Error(ErrorKind::ShapeUnsupported, "single item with sync instructions");
    detail::SharedStore store(1);
    detail::TraceCollector collector;
    detail::WorkerContext ctx{items[0], store, collector, inputs, weights, nullptr, {}};
    ctx.exec_range(0, items[0].graph.instructions.size());
    std::vector<TensorMap> envs(1);
    envs[0] = std::move(ctx.env);
    RunResult result;
    result.outputs = detail::collect_outputs(items, envs);
    result.trace = collector.take();
    result.rendezvous = 1;  // the join
    return result;
  }

  int coordinator = -1;
  std::vector<size_t> head_end(items.size(), 0);  // coordinator: index after its last send
  for (size_t i = 0; i < items.size(); ++i) {
    bool has_send = false, has_get = false;
    size_t first_get = items[i].graph.instructions.size(), last_send = 0;
    for (size_t k = 0; k < items[i].graph.instructions.size(); ++k) {
      const auto& instr = items[i].graph.instructions[k];
      if (instr.op == Op::GetVar) {
        has_get = true;
        first_get = std::min(first_get, k);
      }
      if (instr.op == Op::SendVar) {
        has_send = true;
        last_send = k;
      }
    }
    if (has_send && has_get && last_send < first_get) {
      if (coordinator >= 0)
        throw Error(ErrorKind::ShapeUnsupported, "more than one head/tail coordinator candidate");
      coordinator = static_cast<int>(i);
      head_end[i] = last_send + 1;
    }
  }
  if (coordinator < 0)
    throw Error(ErrorKind::ShapeUnsupported, "no item has the head/tail coordinator shape");
  const std::string& coord_id = items[static_cast<size_t>(coordinator)].item.item_id;
  for (size_t i = 0; i < items.size(); ++i) {
    if (static_cast<int>(i) == coordinator) continue;
    bool has_get = false, has_send = false;
    size_t last_get = 0, first_send = items[i].graph.instructions.size();
    for (size_t k = 0; k < items[i].graph.instructions.size(); ++k) {
      const auto& instr = items[i].graph.instructions[k];
      if (instr.op == Op::GetVar) {
        has_get = true;
        last_get = k;
        if (instr.ident_arg(0).name != coord_id)
          throw Error(ErrorKind::ShapeUnsupported,
                      "item '" + items[i].item.item_id + "' reads from a non-coordinator item");
      }
      if (instr.op == Op::SendVar) {
        has_send = true;
        first_send = std::min(first_send, k);
        for (const auto& dest : instr.idents_arg(0))
          if (dest != coord_id)
            throw Error(ErrorKind::ShapeUnsupported,
                        "item '" + items[i].item.item_id + "' sends to a non-coordinator item");
      }
    }
    if (!has_get || !has_send || first_send < last_get)
      throw Error(ErrorKind::ShapeUnsupported,
                  "item '" + items[i].item.item_id + "' does not match the branch shape");
  }

  detail::SharedStore store(items.size());
  detail::TraceCollector collector;
  detail::ErrorLog errors;
  std::vector<TensorMap> envs(items.size());
  std::barrier bar(static_cast<std::ptrdiff_t>(items.size()));

  auto rendezvous = [&] {
    store.enter_barrier();
    bar.arrive_and_wait();
    store.exit_barrier();
  };

  std::vector<std::thread> workers;
  for (size_t i = 0; i < items.size(); ++i) {
    workers.emplace_back([&, i] {
      detail::WorkerContext ctx{items[i], store, collector, inputs, weights, nullptr, {}};
      bool is_coord = static_cast<int>(i) == coordinator;
      try {
        rendezvous();  // barrier1: aligned start
        if (is_coord) {
          ctx.exec_range(0, head_end[i]);
          rendezvous();  // barrier2: head results published
          rendezvous();  // barrier3: branch results published
          ctx.exec_range(head_end[i], items[i].graph.instructions.size());
        } else {
          rendezvous();  // barrier2
          ctx.exec_range(0, items[i].graph.instructions.size());
          rendezvous();  // barrier3
        }
        envs[i] = std::move(ctx.env);
        store.worker_finished();
      } catch (...) {
        errors.record(std::current_exception());
        store.abort();
        bar.arrive_and_drop();
        store.worker_finished();
      }
    });
  }
  for (auto& w : workers) w.join();
  errors.rethrow_first_if_any();

  RunResult result;
  result.outputs = detail::collect_outputs(items, envs);
  result.trace = collector.take();
  result.rendezvous = 4;  // barrier1..3 + join
  return result;
}

}  // namespace nnefx
