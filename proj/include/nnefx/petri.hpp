#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nnefx/ast.hpp"

namespace nnefx {

using Marking = std::vector<uint32_t>;

// Synthetic final place for programs with several declared outputs. '@' is
// outside the identifier alphabet, so the name cannot collide.
inline constexpr const char* kFinalPlace = "@final";

// One place per variable, one transition per compute instruction. Input arcs
// carry weight 1; each transition feeds its result place with weight equal to
// the result's consumer count (plus the final-place token for graph outputs).
struct PetriNet {
  std::string name;
  std::vector<std::string> places;
  std::map<std::string, int> place_index;

  struct Transition {
    std::string name;
    std::vector<int> inputs;                        // distinct places, weight 1 each
    std::vector<std::pair<int, uint32_t>> outputs;  // (place, weight)
  };
  std::vector<Transition> transitions;
  std::map<std::string, int> transition_index;

  Marking initial;
  Marking final_marking;  // initial plus one firing effect per transition
  std::vector<int> final_places;

  int place(const std::string& name_) const {
    auto it = place_index.find(name_);
    return it == place_index.end() ? -1 : it->second;
  }
  int transition(const std::string& name_) const {
    auto it = transition_index.find(name_);
    return it == transition_index.end() ? -1 : it->second;
  }
  uint32_t total_tokens(const Marking& m) const {
    uint32_t total = 0;
    for (uint32_t v : m) total += v;
    return total;
  }
};

// Translation of a single description. A token in a place means the variable
// is available; initial tokens stock each declaration with its consumption
// count; the unique final place holds the declared output.
inline PetriNet translate(const NnefProgram& program) {
  for (const auto& instr : program.instructions) {
    if (is_sync_op(instr.op))
      throw Error(ErrorKind::ValidationError,
                  "sync instruction '" + instr.result + "' in a single description; use translate_multi");
  }

  PetriNet net;
  net.name = program.name;
  auto add_place = [&](const std::string& name) {
    if (!net.place_index.count(name)) {
      net.place_index.emplace(name, static_cast<int>(net.places.size()));
      net.places.push_back(name);
    }
  };
  for (const auto& in : program.inputs) add_place(in);
  for (const auto& instr : program.instructions) add_place(instr.result);

  std::map<std::string, uint32_t> usage;  // consuming-instruction count per variable
  for (const auto& instr : program.instructions) {
    std::set<std::string> distinct;
    for (const auto& var : instr.variable_args()) distinct.insert(var);
    for (const auto& var : distinct) usage[var] += 1;
  }

  std::set<std::string> outputs(program.outputs.begin(), program.outputs.end());
  bool multi_output = program.outputs.size() > 1;
  if (multi_output) add_place(kFinalPlace);

  net.initial.assign(net.places.size(), 0);
  for (const auto& instr : program.instructions) {
    if (is_compute(instr.op)) continue;
    uint32_t tokens = usage.count(instr.result) ? usage[instr.result] : 0;
    net.initial[static_cast<size_t>(net.place(instr.result))] += tokens;
  }
  // A graph output produced by a declaration rather than a transition must
  // still end with its final token available.
  for (const auto& out : outputs) {
    bool computed = false;
    for (const auto& instr : program.instructions)
      computed = computed || (is_compute(instr.op) && instr.result == out);
    if (!computed) {
      int p = multi_output ? net.place(kFinalPlace) : net.place(out);
      if (p >= 0) net.initial[static_cast<size_t>(p)] += 1;
    }
  }

  for (const auto& instr : program.instructions) {
    if (!is_compute(instr.op)) continue;
    PetriNet::Transition t;
    t.name = instr.result;
    std::set<std::string> distinct;
    for (const auto& var : instr.variable_args()) distinct.insert(var);
    for (const auto& var : distinct) {
      int p = net.place(var);
      if (p < 0) throw Error(ErrorKind::ValidationError, "unknown operand '" + var + "'");
      t.inputs.push_back(p);
    }
    uint32_t consumers = usage.count(instr.result) ? usage[instr.result] : 0;
    bool is_output = outputs.count(instr.result) > 0;
    if (consumers == 0 && !is_output)
      throw Error(ErrorKind::ValidationError,
                  "'" + instr.result + "' is computed but never consumed and is not a graph output");
    uint32_t weight = consumers;
    if (is_output && !multi_output) weight += 1;
    if (weight > 0) t.outputs.emplace_back(net.place(instr.result), weight);
    if (is_output && multi_output) t.outputs.emplace_back(net.place(kFinalPlace), 1u);
    net.transition_index.emplace(t.name, static_cast<int>(net.transitions.size()));
    net.transitions.push_back(std::move(t));
  }

  if (multi_output) {
    net.final_places.push_back(net.place(kFinalPlace));
  } else if (program.outputs.size() == 1) {
    net.final_places.push_back(net.place(program.outputs[0]));
  }

  net.final_marking = net.initial;
  for (const auto& t : net.transitions) {
    for (int p : t.inputs) {
      if (net.final_marking[static_cast<size_t>(p)] == 0)
        throw Error(ErrorKind::ValidationError,
                    "token budget of place '" + net.places[static_cast<size_t>(p)] + "' is inconsistent");
      net.final_marking[static_cast<size_t>(p)] -= 1;
    }
    for (auto [p, w] : t.outputs) net.final_marking[static_cast<size_t>(p)] += w;
  }
  return net;
}

inline std::vector<int> fireable(const PetriNet& net, const Marking& marking) {
  std::vector<int> enabled;
  for (size_t t = 0; t < net.transitions.size(); ++t) {
    bool ok = true;
    for (int p : net.transitions[t].inputs) ok = ok && marking[static_cast<size_t>(p)] >= 1;
    if (ok) enabled.push_back(static_cast<int>(t));
  }
  return enabled;
}

inline bool is_fireable(const PetriNet& net, const Marking& marking, int t) {
  for (int p : net.transitions[static_cast<size_t>(t)].inputs)
    if (marking[static_cast<size_t>(p)] < 1) return false;
  return true;
}

inline Marking fire(const PetriNet& net, const Marking& marking, int t) {
  if (t < 0 || t >= static_cast<int>(net.transitions.size()))
    throw Error(ErrorKind::UnknownTransition, "transition index " + std::to_string(t));
  if (!is_fireable(net, marking, t))
    throw Error(ErrorKind::NotFireable,
                "transition '" + net.transitions[static_cast<size_t>(t)].name + "' is not enabled");
  Marking next = marking;
  for (int p : net.transitions[static_cast<size_t>(t)].inputs) next[static_cast<size_t>(p)] -= 1;
  for (auto [p, w] : net.transitions[static_cast<size_t>(t)].outputs) next[static_cast<size_t>(p)] += w;
  return next;
}

}  // namespace nnefx
