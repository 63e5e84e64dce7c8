#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nnefx/errors.hpp"

namespace nnefx {

enum class EventKind { Start, End };

inline const char* to_string(EventKind k) { return k == EventKind::Start ? "start" : "end"; }

// One line of a run log. Transitions are named like net transitions: compute
// events by result variable, synchronizations as sync_<variable>.
struct TraceEvent {
  std::string item;
  std::string transition;
  EventKind kind = EventKind::Start;
  int64_t t_ns = 0;

  bool operator==(const TraceEvent&) const = default;
};

using Trace = std::vector<TraceEvent>;

inline void write_trace(std::ostream& out, const Trace& trace) {
  for (const auto& ev : trace) {
    nlohmann::json j;
    j["item"] = ev.item;
    j["transition"] = ev.transition;
    j["kind"] = to_string(ev.kind);
    j["t_ns"] = ev.t_ns;
    out << j.dump() << '\n';
  }
}

inline void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  write_trace(out, trace);
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

inline Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorKind::MalformedEvent, "line " + std::to_string(lineno) + ": not a JSON object");
    auto need = [&](const char* key) -> const nlohmann::json& {
      auto it = j.find(key);
      if (it == j.end())
        throw Error(ErrorKind::MalformedEvent,
                    "line " + std::to_string(lineno) + ": missing field '" + key + "'");
      return *it;
    };
    TraceEvent ev;
    const auto& item = need("item");
    const auto& transition = need("transition");
    const auto& kind = need("kind");
    const auto& t_ns = need("t_ns");
    if (!item.is_string() || !transition.is_string() || !kind.is_string() || !t_ns.is_number_integer())
      throw Error(ErrorKind::MalformedEvent, "line " + std::to_string(lineno) + ": wrong field type");
    ev.item = item.get<std::string>();
    ev.transition = transition.get<std::string>();
    std::string k = kind.get<std::string>();
    if (k == "start")
      ev.kind = EventKind::Start;
    else if (k == "end")
      ev.kind = EventKind::End;
    else
      throw Error(ErrorKind::MalformedEvent,
                  "line " + std::to_string(lineno) + ": kind must be 'start' or 'end', got '" + k + "'");
    ev.t_ns = t_ns.get<int64_t>();
    trace.push_back(std::move(ev));
  }
  return trace;
}

inline Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  return read_trace(in);
}

// Pairing check: per (item, transition) exactly one start and one end,
// start no later than end. Returns a diagnostic, or nullopt when well formed.
inline std::optional<std::string> trace_pairing_issue(const Trace& trace) {
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> seen;  // -> (starts, ends)
  std::map<std::pair<std::string, std::string>, std::pair<int64_t, int64_t>> at;
  for (const auto& ev : trace) {
    auto key = std::make_pair(ev.item, ev.transition);
    auto& counts = seen[key];
    if (ev.kind == EventKind::Start) {
      counts.first += 1;
      at[key].first = ev.t_ns;
    } else {
      counts.second += 1;
      at[key].second = ev.t_ns;
    }
  }
  for (const auto& [key, counts] : seen) {
    if (counts.first != 1 || counts.second != 1)
      return "transition '" + key.second + "' of item '" + key.first + "' has " +
             std::to_string(counts.first) + " start and " + std::to_string(counts.second) + " end events";
    if (at[key].first > at[key].second)
      return "transition '" + key.second + "' of item '" + key.first + "' ends before it starts";
  }
  return std::nullopt;
}

}  // namespace nnefx
