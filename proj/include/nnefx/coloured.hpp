#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nnefx/ast.hpp"
#include "nnefx/petri.hpp"

namespace nnefx {

// Marking of a coloured net, flattened as place * n_colours + colour.
using ColouredMarking = std::vector<uint32_t>;

inline std::string sync_transition_name(const std::string& variable) { return "sync_" + variable; }

// Per-item nets with one colour per item. Declaration places replicated
// across items merge by name; shared variables keep the writer's place and
// a sync transition moves its token into the reader colours.
struct ColouredPetriNet {
  std::string name;
  std::vector<std::string> colours;  // item ids, in input order
  std::vector<std::string> places;
  std::map<std::string, int> place_index;

  struct Transition {
    std::string name;
    int colour;  // owning item; for sync transitions, the writer
    bool is_sync = false;
    std::vector<std::pair<int, int>> inputs;                // (place, colour), weight 1 each
    std::vector<std::tuple<int, int, uint32_t>> outputs;    // (place, colour, weight)
  };
  std::vector<Transition> transitions;
  std::map<std::string, int> transition_index;

  ColouredMarking initial;
  ColouredMarking final_marking;
  // Set when firing every transition once would overdraw some place, i.e. no
  // complete execution exists (a dropped sync leaves readers unfed). The
  // final marking is then a dead target no reachable marking matches.
  bool final_unreachable = false;
  std::vector<int> final_places;

  int n_colours() const { return static_cast<int>(colours.size()); }
  size_t slot(int place, int colour) const {
    return static_cast<size_t>(place) * colours.size() + static_cast<size_t>(colour);
  }
  int place(const std::string& name_) const {
    auto it = place_index.find(name_);
    return it == place_index.end() ? -1 : it->second;
  }
  int transition(const std::string& name_) const {
    auto it = transition_index.find(name_);
    return it == transition_index.end() ? -1 : it->second;
  }
  int colour(const std::string& item_id) const {
    for (size_t i = 0; i < colours.size(); ++i)
      if (colours[i] == item_id) return static_cast<int>(i);
    return -1;
  }
};

inline ColouredPetriNet translate_multi(const std::vector<ItemProgram>& items) {
  if (items.empty()) throw Error(ErrorKind::ValidationError, "no items to translate");

  ColouredPetriNet net;
  net.name = items[0].graph.name;
  for (const auto& item : items) net.colours.push_back(item.item.item_id);
  const int n_colours = net.n_colours();

  auto add_place = [&](const std::string& name) {
    if (!net.place_index.count(name)) {
      net.place_index.emplace(name, static_cast<int>(net.places.size()));
      net.places.push_back(name);
    }
  };
  // Varsync declarations and send_var results get no place; a get_var result
  // names the writer's variable, so reader arcs land on the merged place.
  for (const auto& item : items) {
    for (const auto& instr : item.graph.instructions)
      if (!is_sync_op(instr.op)) add_place(instr.result);
  }

  std::set<std::string> outputs(items[0].graph.outputs.begin(), items[0].graph.outputs.end());
  bool multi_output = items[0].graph.outputs.size() > 1;
  if (multi_output) add_place(kFinalPlace);

  // usage[c][var]: consuming instructions of var inside item c. send_var
  // consumes its payload; get_var consumes nothing.
  std::vector<std::map<std::string, uint32_t>> usage(static_cast<size_t>(n_colours));
  for (int c = 0; c < n_colours; ++c) {
    for (const auto& instr : items[static_cast<size_t>(c)].graph.instructions) {
      std::set<std::string> distinct;
      for (const auto& var : instr.variable_args()) distinct.insert(var);
      for (const auto& var : distinct) usage[static_cast<size_t>(c)][var] += 1;
    }
  }

  net.initial.assign(net.places.size() * static_cast<size_t>(n_colours), 0);
  for (int c = 0; c < n_colours; ++c) {
    for (const auto& instr : items[static_cast<size_t>(c)].graph.instructions) {
      if (instr.op != Op::External && instr.op != Op::Variable) continue;
      auto it = usage[static_cast<size_t>(c)].find(instr.result);
      uint32_t tokens = it == usage[static_cast<size_t>(c)].end() ? 0 : it->second;
      net.initial[net.slot(net.place(instr.result), c)] += tokens;
    }
  }

  std::set<std::string> computed;
  for (const auto& item : items)
    for (const auto& instr : item.graph.instructions)
      if (is_compute(instr.op)) computed.insert(instr.result);
  for (const auto& out : outputs) {
    if (computed.count(out)) continue;
    for (int c = 0; c < n_colours; ++c) {
      bool declares = false;
      for (const auto& instr : items[static_cast<size_t>(c)].graph.instructions)
        declares = declares || ((instr.op == Op::External || instr.op == Op::Variable) && instr.result == out);
      if (declares) {
        int p = multi_output ? net.place(kFinalPlace) : net.place(out);
        net.initial[net.slot(p, c)] += 1;
        break;
      }
    }
  }

  auto add_transition = [&](ColouredPetriNet::Transition t) {
    if (net.transition_index.count(t.name))
      throw Error(t.is_sync ? ErrorKind::DuplicateWriter : ErrorKind::ValidationError,
                  "transition '" + t.name + "' defined by more than one item");
    net.transition_index.emplace(t.name, static_cast<int>(net.transitions.size()));
    net.transitions.push_back(std::move(t));
  };

  for (int c = 0; c < n_colours; ++c) {
    const auto& item = items[static_cast<size_t>(c)];
    for (const auto& instr : item.graph.instructions) {
      if (instr.op == Op::GetVar) {
        int src = net.colour(instr.ident_arg(0).name);
        if (src < 0)
          throw Error(ErrorKind::UnknownSourceItem,
                      "get_var in item '" + item.item.item_id + "' names unknown item '" + instr.ident_arg(0).name + "'");
        if (net.place(instr.result) < 0)
          throw Error(ErrorKind::UnresolvedVarsync,
                      "variable '" + instr.result + "' received in item '" + item.item.item_id +
                          "' is computed by no item");
        continue;
      }
      if (instr.op == Op::SendVar) {
        const std::string& payload = instr.ident_arg(1).name;
        int p = net.place(payload);
        if (p < 0)
          throw Error(ErrorKind::UnresolvedVarsync,
                      "send_var of '" + payload + "' in item '" + item.item.item_id + "' has no producing place");
        ColouredPetriNet::Transition t;
        t.name = sync_transition_name(payload);
        t.colour = c;
        t.is_sync = true;
        t.inputs.emplace_back(p, c);
        for (const auto& dest : instr.idents_arg(0)) {
          int d = net.colour(dest);
          if (d < 0)
            throw Error(ErrorKind::UnknownSourceItem,
                        "send_var in item '" + item.item.item_id + "' names unknown item '" + dest + "'");
          auto it = usage[static_cast<size_t>(d)].find(payload);
          uint32_t w = it == usage[static_cast<size_t>(d)].end() ? 0 : it->second;
          if (w > 0) t.outputs.emplace_back(p, d, w);
        }
        add_transition(std::move(t));
        continue;
      }
      if (!is_compute(instr.op)) continue;

      ColouredPetriNet::Transition t;
      t.name = instr.result;
      t.colour = c;
      std::set<std::string> distinct;
      for (const auto& var : instr.variable_args()) distinct.insert(var);
      for (const auto& var : distinct) {
        int p = net.place(var);
        if (p < 0)
          throw Error(ErrorKind::UnresolvedVarsync,
                      "operand '" + var + "' of '" + instr.result + "' has no place");
        t.inputs.emplace_back(p, c);
      }
      auto it = usage[static_cast<size_t>(c)].find(instr.result);
      uint32_t consumers = it == usage[static_cast<size_t>(c)].end() ? 0 : it->second;
      bool is_output = outputs.count(instr.result) > 0;
      uint32_t weight = consumers;
      if (is_output && !multi_output) weight += 1;
      if (weight > 0) t.outputs.emplace_back(net.place(instr.result), c, weight);
      if (is_output && multi_output) t.outputs.emplace_back(net.place(kFinalPlace), c, 1u);
      add_transition(std::move(t));
    }
  }

  if (multi_output) {
    net.final_places.push_back(net.place(kFinalPlace));
  } else if (items[0].graph.outputs.size() == 1) {
    net.final_places.push_back(net.place(items[0].graph.outputs[0]));
  }

  std::vector<int64_t> balance(net.initial.begin(), net.initial.end());
  for (const auto& t : net.transitions) {
    for (auto [p, c] : t.inputs) balance[net.slot(p, c)] -= 1;
    for (auto [p, c, w] : t.outputs) balance[net.slot(p, c)] += w;
  }
  net.final_marking.assign(balance.size(), 0);
  for (size_t i = 0; i < balance.size(); ++i) {
    if (balance[i] < 0)
      net.final_unreachable = true;
    else
      net.final_marking[i] = static_cast<uint32_t>(balance[i]);
  }
  return net;
}

inline bool is_fireable(const ColouredPetriNet& net, const ColouredMarking& marking, int t) {
  for (auto [p, c] : net.transitions[static_cast<size_t>(t)].inputs)
    if (marking[net.slot(p, c)] < 1) return false;
  return true;
}

inline std::vector<int> fireable(const ColouredPetriNet& net, const ColouredMarking& marking) {
  std::vector<int> enabled;
  for (size_t t = 0; t < net.transitions.size(); ++t)
    if (is_fireable(net, marking, static_cast<int>(t))) enabled.push_back(static_cast<int>(t));
  return enabled;
}

inline ColouredMarking fire(const ColouredPetriNet& net, const ColouredMarking& marking, int t) {
  if (t < 0 || t >= static_cast<int>(net.transitions.size()))
    throw Error(ErrorKind::UnknownTransition, "transition index " + std::to_string(t));
  if (!is_fireable(net, marking, t))
    throw Error(ErrorKind::NotFireable,
                "transition '" + net.transitions[static_cast<size_t>(t)].name + "' is not enabled");
  ColouredMarking next = marking;
  for (auto [p, c] : net.transitions[static_cast<size_t>(t)].inputs) next[net.slot(p, c)] -= 1;
  for (auto [p, c, w] : net.transitions[static_cast<size_t>(t)].outputs) next[net.slot(p, c)] += w;
  return next;
}

}  // namespace nnefx
