#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nnefx/coloured.hpp"
#include "nnefx/petri.hpp"
#include "nnefx/trace.hpp"

namespace nnefx {

inline constexpr size_t kDefaultPathCap = 100000;
inline constexpr size_t kDefaultMarkingCap = 1000000;

namespace detail {

struct MarkingHash {
  size_t operator()(const std::vector<uint32_t>& v) const noexcept {
    size_t h = 1469598103934665603ull;
    for (uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

inline std::optional<std::string> owning_item(const PetriNet&, int) { return std::nullopt; }
inline std::optional<std::string> owning_item(const ColouredPetriNet& net, int t) {
  return net.colours[static_cast<size_t>(net.transitions[static_cast<size_t>(t)].colour)];
}

inline bool final_is_reachable_target(const PetriNet&) { return true; }
inline bool final_is_reachable_target(const ColouredPetriNet& net) { return !net.final_unreachable; }

}  // namespace detail

// Reachability graph: nodes are distinct markings, edges are firings.
struct MarkingGraph {
  std::vector<std::vector<uint32_t>> markings;
  std::vector<std::vector<std::pair<int, int>>> edges;  // node -> [(transition, target)]
  int initial = 0;
  bool truncated = false;  // marking cap hit; edges are incomplete
};

template <class Net>
MarkingGraph build_marking_graph(const Net& net, size_t max_markings = kDefaultMarkingCap) {
  MarkingGraph g;
  std::unordered_map<std::vector<uint32_t>, int, detail::MarkingHash> index;
  g.markings.push_back(net.initial);
  g.edges.emplace_back();
  index.emplace(net.initial, 0);
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    int node = queue.front();
    queue.pop_front();
    const auto current = g.markings[static_cast<size_t>(node)];  // copy: push_back below invalidates
    for (size_t t = 0; t < net.transitions.size(); ++t) {
      if (!is_fireable(net, current, static_cast<int>(t))) continue;
      auto next = fire(net, current, static_cast<int>(t));
      auto it = index.find(next);
      int target;
      if (it == index.end()) {
        if (g.markings.size() >= max_markings) {
          g.truncated = true;
          continue;
        }
        target = static_cast<int>(g.markings.size());
        index.emplace(next, target);
        g.markings.push_back(std::move(next));
        g.edges.emplace_back();
        queue.push_back(target);
      } else {
        target = it->second;
      }
      g.edges[static_cast<size_t>(node)].emplace_back(static_cast<int>(t), target);
    }
  }
  return g;
}

struct EnumerationResult {
  MarkingGraph graph;
  uint64_t path_count = 0;                // exact (saturating at uint64 max)
  std::vector<std::vector<int>> paths;    // transition index sequences, at most `cap`
  size_t reachable_markings = 0;
  size_t deadlocked_markings = 0;         // terminal markings other than the final one
  bool unique_final = false;              // every maximal firing sequence ends in the final marking
  bool every_path_fires_each_once = true;
  bool truncated_paths = false;
  bool truncated_markings = false;
};

// Raised when a cap cuts the enumeration short; carries whatever was found.
class CapExceededError : public Error {
 public:
  EnumerationResult partial;
  CapExceededError(const std::string& what, EnumerationResult p)
      : Error(ErrorKind::CapExceeded, what), partial(std::move(p)) {}
};

inline EnumerationResult enumerate_paths(const PetriNet& net, size_t cap = kDefaultPathCap,
                                         size_t max_markings = kDefaultMarkingCap) {
  EnumerationResult r;
  r.graph = build_marking_graph(net, max_markings);
  r.reachable_markings = r.graph.markings.size();
  r.truncated_markings = r.graph.truncated;

  int final_node = -1;
  size_t terminals = 0;
  for (size_t n = 0; n < r.graph.markings.size(); ++n) {
    if (r.graph.markings[n] == net.final_marking) final_node = static_cast<int>(n);
    if (r.graph.edges[n].empty()) {
      ++terminals;
      if (r.graph.markings[n] != net.final_marking) ++r.deadlocked_markings;
    }
  }
  r.unique_final = terminals == 1 && r.deadlocked_markings == 0;

  if (r.truncated_markings)
    throw CapExceededError("marking cap " + std::to_string(max_markings) +
                               " exceeded; statistics cover the explored part only",
                           std::move(r));

  const size_t n_nodes = r.graph.markings.size();
  std::vector<int> indeg(n_nodes, 0);
  for (const auto& es : r.graph.edges)
    for (const auto& [t, m] : es) indeg[static_cast<size_t>(m)] += 1;
  std::vector<int> topo;
  topo.reserve(n_nodes);
  std::deque<int> q;
  for (size_t i = 0; i < n_nodes; ++i)
    if (indeg[i] == 0) q.push_back(static_cast<int>(i));
  while (!q.empty()) {
    int n = q.front();
    q.pop_front();
    topo.push_back(n);
    for (const auto& [t, m] : r.graph.edges[static_cast<size_t>(n)])
      if (--indeg[static_cast<size_t>(m)] == 0) q.push_back(m);
  }
  if (topo.size() != n_nodes)
    throw Error(ErrorKind::ValidationError, "marking graph has a cycle; program is not feed-forward");

  // Paths must end at the final marking; the graph is a DAG, so a path never
  // revisits it and the count below is exact.
  std::vector<uint64_t> count(n_nodes, 0);
  if (final_node >= 0) count[static_cast<size_t>(final_node)] = 1;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (*it == final_node) continue;
    uint64_t total = 0;
    for (const auto& [t, m] : r.graph.edges[static_cast<size_t>(*it)]) {
      uint64_t c = count[static_cast<size_t>(m)];
      total = total > UINT64_MAX - c ? UINT64_MAX : total + c;
    }
    count[static_cast<size_t>(*it)] = total;
  }
  r.path_count = count[static_cast<size_t>(r.graph.initial)];

  if (final_node >= 0 && r.path_count > 0) {
    std::vector<int> current;
    bool capped = false;
    auto dfs = [&](auto&& self, int node) -> void {
      if (capped) return;
      if (node == final_node) {
        r.paths.push_back(current);
        capped = r.paths.size() >= cap;
        return;
      }
      for (const auto& [t, m] : r.graph.edges[static_cast<size_t>(node)]) {
        if (count[static_cast<size_t>(m)] == 0 || capped) continue;
        current.push_back(t);
        self(self, m);
        current.pop_back();
      }
    };
    dfs(dfs, r.graph.initial);
  }
  r.truncated_paths = r.path_count > r.paths.size();

  for (const auto& p : r.paths) {
    std::vector<char> seen(net.transitions.size(), 0);
    bool ok = p.size() == net.transitions.size();
    for (int t : p) {
      if (seen[static_cast<size_t>(t)]) ok = false;
      seen[static_cast<size_t>(t)] = 1;
    }
    if (!ok) {
      r.every_path_fires_each_once = false;
      break;
    }
  }

  if (r.truncated_paths)
    throw CapExceededError("path cap " + std::to_string(cap) + " exceeded; exact count is " +
                               std::to_string(r.path_count),
                           std::move(r));
  return r;
}

struct EquivalenceVerdict {
  bool equivalent = false;
  std::vector<std::string> counterexample;  // compute-transition firing sequence
  std::string message;
};

// Language comparison after erasing sync transitions: the split behaves like
// the original iff both marking graphs accept the same sequences of compute
// transitions, acceptance meaning the final marking is reached.
inline EquivalenceVerdict check_equivalence(const ColouredPetriNet& coloured, const PetriNet& original,
                                            size_t max_markings = kDefaultMarkingCap) {
  EquivalenceVerdict verdict;

  std::set<std::string> orig_labels, col_labels;
  for (const auto& t : original.transitions) orig_labels.insert(t.name);
  for (const auto& t : coloured.transitions)
    if (!t.is_sync) col_labels.insert(t.name);
  if (orig_labels != col_labels) {
    for (const auto& name : orig_labels)
      if (!col_labels.count(name)) {
        verdict.message = "transition '" + name + "' exists in the original net only";
        return verdict;
      }
    for (const auto& name : col_labels)
      if (!orig_labels.count(name)) {
        verdict.message = "transition '" + name + "' exists in the split only";
        return verdict;
      }
  }

  MarkingGraph go = build_marking_graph(original, max_markings);
  MarkingGraph gc = build_marking_graph(coloured, max_markings);
  if (go.truncated || gc.truncated)
    throw Error(ErrorKind::CapExceeded,
                "marking cap " + std::to_string(max_markings) + " exceeded while comparing languages");

  int orig_final = -1;
  for (size_t n = 0; n < go.markings.size(); ++n)
    if (go.markings[n] == original.final_marking) orig_final = static_cast<int>(n);
  std::vector<char> col_accepting(gc.markings.size(), 0);
  if (!coloured.final_unreachable)
    for (size_t n = 0; n < gc.markings.size(); ++n)
      if (gc.markings[n] == coloured.final_marking) col_accepting[n] = 1;

  // Keep only states from which acceptance is reachable; everything else is
  // noise for language comparison.
  auto co_accessible = [](const MarkingGraph& g, const std::vector<int>& accepting) {
    std::vector<std::vector<int>> rev(g.markings.size());
    for (size_t n = 0; n < g.markings.size(); ++n)
      for (const auto& [t, m] : g.edges[n]) rev[static_cast<size_t>(m)].push_back(static_cast<int>(n));
    std::vector<char> keep(g.markings.size(), 0);
    std::deque<int> q;
    for (int a : accepting) {
      if (!keep[static_cast<size_t>(a)]) {
        keep[static_cast<size_t>(a)] = 1;
        q.push_back(a);
      }
    }
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      for (int p : rev[static_cast<size_t>(n)])
        if (!keep[static_cast<size_t>(p)]) {
          keep[static_cast<size_t>(p)] = 1;
          q.push_back(p);
        }
    }
    return keep;
  };
  std::vector<int> orig_accepting_nodes, col_accepting_nodes;
  if (orig_final >= 0) orig_accepting_nodes.push_back(orig_final);
  for (size_t n = 0; n < col_accepting.size(); ++n)
    if (col_accepting[n]) col_accepting_nodes.push_back(static_cast<int>(n));
  std::vector<char> keep_o = co_accessible(go, orig_accepting_nodes);
  std::vector<char> keep_c = co_accessible(gc, col_accepting_nodes);

  auto tau_closure = [&](std::vector<int> nodes) {
    std::set<int> seen(nodes.begin(), nodes.end());
    std::deque<int> q(nodes.begin(), nodes.end());
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      for (const auto& [t, m] : gc.edges[static_cast<size_t>(n)]) {
        if (!coloured.transitions[static_cast<size_t>(t)].is_sync) continue;
        if (!keep_c[static_cast<size_t>(m)]) continue;
        if (seen.insert(m).second) q.push_back(m);
      }
    }
    return std::vector<int>(seen.begin(), seen.end());  // sorted: set iteration order
  };

  // Any accepted word from `node`, for counterexample reporting.
  auto orig_completion = [&](int node) {
    std::vector<std::string> word;
    std::vector<int> prev(go.markings.size(), -1), via(go.markings.size(), -1);
    std::vector<char> seen(go.markings.size(), 0);
    std::deque<int> q = {node};
    seen[static_cast<size_t>(node)] = 1;
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      if (n == orig_final) {
        for (int c = n; c != node; c = prev[static_cast<size_t>(c)])
          word.push_back(original.transitions[static_cast<size_t>(via[static_cast<size_t>(c)])].name);
        std::reverse(word.begin(), word.end());
        return word;
      }
      for (const auto& [t, m] : go.edges[static_cast<size_t>(n)]) {
        if (seen[static_cast<size_t>(m)] || !keep_o[static_cast<size_t>(m)]) continue;
        seen[static_cast<size_t>(m)] = 1;
        prev[static_cast<size_t>(m)] = n;
        via[static_cast<size_t>(m)] = t;
        q.push_back(m);
      }
    }
    return word;
  };
  auto col_completion = [&](const std::vector<int>& from) {
    std::vector<std::string> word;
    std::vector<int> prev(gc.markings.size(), -1), via(gc.markings.size(), -1);
    std::vector<char> seen(gc.markings.size(), 0);
    std::deque<int> q;
    for (int n : from) {
      seen[static_cast<size_t>(n)] = 1;
      q.push_back(n);
    }
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      if (col_accepting[static_cast<size_t>(n)]) {
        for (int c = n; via[static_cast<size_t>(c)] >= 0; c = prev[static_cast<size_t>(c)]) {
          const auto& t = coloured.transitions[static_cast<size_t>(via[static_cast<size_t>(c)])];
          if (!t.is_sync) word.push_back(t.name);
        }
        std::reverse(word.begin(), word.end());
        return word;
      }
      for (const auto& [t, m] : gc.edges[static_cast<size_t>(n)]) {
        if (seen[static_cast<size_t>(m)] || !keep_c[static_cast<size_t>(m)]) continue;
        seen[static_cast<size_t>(m)] = 1;
        prev[static_cast<size_t>(m)] = n;
        via[static_cast<size_t>(m)] = t;
        q.push_back(m);
      }
    }
    return word;
  };

  using PKey = std::pair<std::vector<int>, int>;  // (coloured node set, original node; -1 = dead)
  std::vector<int> cset0;
  if (keep_c[static_cast<size_t>(gc.initial)]) cset0 = tau_closure({gc.initial});
  int onode0 = keep_o[static_cast<size_t>(go.initial)] ? go.initial : -1;

  std::map<PKey, std::pair<PKey, std::string>> parent;  // state -> (predecessor, label)
  PKey start{cset0, onode0};
  parent.emplace(start, std::make_pair(PKey{{}, -2}, std::string()));
  std::deque<PKey> q = {start};

  auto word_to = [&](const PKey& key) {
    std::vector<std::string> word;
    PKey cur = key;
    while (true) {
      const auto& [pred, label] = parent.at(cur);
      if (pred.second == -2) break;
      word.push_back(label);
      cur = pred;
    }
    std::reverse(word.begin(), word.end());
    return word;
  };

  while (!q.empty()) {
    PKey state = q.front();
    q.pop_front();
    const auto& [cset, onode] = state;

    bool acc_c = false;
    for (int n : cset) acc_c = acc_c || col_accepting[static_cast<size_t>(n)];
    bool acc_o = onode >= 0 && onode == orig_final;
    if (acc_c != acc_o) {
      verdict.counterexample = word_to(state);
      verdict.message = acc_o ? "the original completes this firing sequence; the split cannot reach its final marking"
                              : "the split completes this firing sequence; the original cannot";
      return verdict;
    }

    std::map<std::string, std::vector<int>> succ_c;  // label -> target nodes (pre-closure)
    for (int n : cset) {
      for (const auto& [t, m] : gc.edges[static_cast<size_t>(n)]) {
        const auto& tr = coloured.transitions[static_cast<size_t>(t)];
        if (tr.is_sync || !keep_c[static_cast<size_t>(m)]) continue;
        succ_c[tr.name].push_back(m);
      }
    }
    std::map<std::string, int> succ_o;
    if (onode >= 0) {
      for (const auto& [t, m] : go.edges[static_cast<size_t>(onode)]) {
        if (!keep_o[static_cast<size_t>(m)]) continue;
        succ_o.emplace(original.transitions[static_cast<size_t>(t)].name, m);
      }
    }

    for (const auto& [label, target] : succ_o) {
      if (succ_c.count(label)) continue;
      verdict.counterexample = word_to(state);
      verdict.counterexample.push_back(label);
      auto rest = orig_completion(target);
      verdict.counterexample.insert(verdict.counterexample.end(), rest.begin(), rest.end());
      verdict.message = "after this prefix the original fires '" + label + "' but the split cannot";
      return verdict;
    }
    for (const auto& [label, targets] : succ_c) {
      if (succ_o.count(label)) continue;
      verdict.counterexample = word_to(state);
      verdict.counterexample.push_back(label);
      auto rest = col_completion(tau_closure(targets));
      verdict.counterexample.insert(verdict.counterexample.end(), rest.begin(), rest.end());
      verdict.message = "after this prefix the split fires '" + label + "' but the original cannot";
      return verdict;
    }

    for (const auto& [label, targets] : succ_c) {
      std::vector<int> dedup = targets;
      std::sort(dedup.begin(), dedup.end());
      dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
      PKey next{tau_closure(dedup), succ_o.at(label)};
      if (parent.emplace(next, std::make_pair(state, label)).second) q.push_back(next);
    }
  }

  verdict.equivalent = true;
  verdict.message = "languages agree after erasing sync transitions";
  return verdict;
}

struct TraceVerdict {
  bool accepted = false;
  bool reached_final = false;  // replayed marking equals the final marking
  bool complete = false;       // every transition of the net appears as a start event
  std::optional<size_t> violating_event;  // index into the given trace
  std::string message;
};

namespace detail {

template <class Net>
bool can_reach_final(const Net& net, const std::vector<uint32_t>& from, size_t max_markings) {
  if (!final_is_reachable_target(net)) return false;
  if (from == net.final_marking) return true;
  std::unordered_map<std::vector<uint32_t>, int, MarkingHash> index;
  std::deque<std::vector<uint32_t>> q = {from};
  index.emplace(from, 0);
  while (!q.empty()) {
    auto m = q.front();
    q.pop_front();
    for (size_t t = 0; t < net.transitions.size(); ++t) {
      if (!is_fireable(net, m, static_cast<int>(t))) continue;
      auto next = fire(net, m, static_cast<int>(t));
      if (next == net.final_marking) return true;
      if (index.size() >= max_markings)
        throw Error(ErrorKind::CapExceeded, "marking cap exceeded during trace validation");
      if (index.emplace(next, 0).second) q.push_back(next);
    }
  }
  return false;
}

template <class Net>
TraceVerdict validate_trace_impl(const Net& net, const Trace& trace, size_t max_markings) {
  TraceVerdict v;

  std::vector<std::pair<const TraceEvent*, size_t>> starts;
  for (size_t i = 0; i < trace.size(); ++i)
    if (trace[i].kind == EventKind::Start) starts.emplace_back(&trace[i], i);
  std::stable_sort(starts.begin(), starts.end(),
                   [](const auto& a, const auto& b) { return a.first->t_ns < b.first->t_ns; });

  std::vector<int> resolved(starts.size(), -1);
  for (size_t k = 0; k < starts.size(); ++k) {
    const TraceEvent& ev = *starts[k].first;
    int t = net.transition(ev.transition);
    if (t < 0)
      throw Error(ErrorKind::UnknownTransition, "'" + ev.transition + "' is not a transition of the net");
    if (auto owner = owning_item(net, t); owner && *owner != ev.item) {
      v.violating_event = starts[k].second;
      v.message = "transition '" + ev.transition + "' belongs to item '" + *owner +
                  "' but was recorded by '" + ev.item + "'";
      return v;
    }
    resolved[k] = t;
  }

  auto marking = net.initial;
  std::vector<char> fired(net.transitions.size(), 0);

  // Events with equal timestamps are unordered; firing effects commute, so
  // greedily firing any enabled member finds an admissible order iff one
  // exists.
  size_t i = 0;
  while (i < starts.size()) {
    size_t j = i;
    while (j < starts.size() && starts[j].first->t_ns == starts[i].first->t_ns) ++j;
    std::vector<size_t> pending;
    for (size_t k = i; k < j; ++k) pending.push_back(k);
    while (!pending.empty()) {
      bool progressed = false;
      for (auto it = pending.begin(); it != pending.end(); ++it) {
        int t = resolved[*it];
        if (!is_fireable(net, marking, t)) continue;
        marking = fire(net, marking, t);
        fired[static_cast<size_t>(t)] = 1;
        pending.erase(it);
        progressed = true;
        break;
      }
      if (!progressed) {
        size_t k = pending.front();
        v.violating_event = starts[k].second;
        v.message = "transition '" + starts[k].first->transition + "' is not fireable at its start time";
        return v;
      }
    }
    i = j;
  }

  v.complete = std::all_of(fired.begin(), fired.end(), [](char c) { return c != 0; });
  v.reached_final = final_is_reachable_target(net) && marking == net.final_marking;
  if (v.reached_final) {
    v.accepted = true;
    v.message = "trace replays to the final marking";
    return v;
  }
  if (can_reach_final(net, marking, max_markings)) {
    v.accepted = true;
    v.message = "trace replays to a marking from which the final marking is reachable";
  } else {
    v.message = "trace replays, but the final marking is unreachable from the resulting marking";
  }
  return v;
}

}  // namespace detail

// Synchronisation events have no counterpart in the single-description net;
// they are dropped before replay, the same erasure check_equivalence applies.
// Only events whose payload names a known place qualify, so a genuinely
// unknown transition still throws.
inline TraceVerdict validate_trace(const PetriNet& net, const Trace& trace,
                                   size_t max_markings = kDefaultMarkingCap) {
  Trace kept;
  std::vector<size_t> original_index;
  kept.reserve(trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    const auto& ev = trace[i];
    if (net.transition(ev.transition) < 0 && ev.transition.rfind("sync_", 0) == 0 &&
        net.place(ev.transition.substr(5)) >= 0)
      continue;
    kept.push_back(ev);
    original_index.push_back(i);
  }
  TraceVerdict v = detail::validate_trace_impl(net, kept, max_markings);
  if (v.violating_event) v.violating_event = original_index[*v.violating_event];
  return v;
}

inline TraceVerdict validate_trace(const ColouredPetriNet& net, const Trace& trace,
                                   size_t max_markings = kDefaultMarkingCap) {
  return detail::validate_trace_impl(net, trace, max_markings);
}

}  // namespace nnefx
