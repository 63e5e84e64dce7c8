#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nnefx/ast.hpp"
#include "nnefx/errors.hpp"
#include "nnefx/shapes.hpp"

namespace nnefx {

// Placement of compute instructions onto items. Declarations are never
// assigned; they are replicated into every item that consumes them.
struct Assignment {
  std::vector<std::string> items;
  std::map<std::string, std::string> map;    // compute result -> item id
  std::map<std::string, std::string> nodes;  // item id -> node name (defaults to graph name)

  bool operator==(const Assignment&) const = default;
};

inline nlohmann::json assignment_to_json(const Assignment& a) {
  nlohmann::json j;
  j["items"] = a.items;
  j["map"] = a.map;
  if (!a.nodes.empty()) j["nodes"] = a.nodes;
  return j;
}

inline Assignment assignment_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("items") || !j.contains("map"))
    throw Error(ErrorKind::InvalidAssignment, "assignment needs 'items' and 'map' fields");
  Assignment a;
  if (!j["items"].is_array()) throw Error(ErrorKind::InvalidAssignment, "'items' must be an array");
  for (const auto& v : j["items"]) {
    if (!v.is_string()) throw Error(ErrorKind::InvalidAssignment, "'items' entries must be strings");
    a.items.push_back(v.get<std::string>());
  }
  if (!j["map"].is_object()) throw Error(ErrorKind::InvalidAssignment, "'map' must be an object");
  for (const auto& [key, value] : j["map"].items()) {
    if (!value.is_string()) throw Error(ErrorKind::InvalidAssignment, "'map' values must be item ids");
    a.map.emplace(key, value.get<std::string>());
  }
  if (j.contains("nodes")) {
    if (!j["nodes"].is_object()) throw Error(ErrorKind::InvalidAssignment, "'nodes' must be an object");
    for (const auto& [key, value] : j["nodes"].items()) {
      if (!value.is_string()) throw Error(ErrorKind::InvalidAssignment, "'nodes' values must be node names");
      a.nodes.emplace(key, value.get<std::string>());
    }
  }
  return a;
}

inline Assignment read_assignment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::InvalidAssignment, "'" + path + "' is not valid JSON");
  return assignment_from_json(j);
}

inline void write_assignment_file(const std::string& path, const Assignment& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << assignment_to_json(a).dump(2) << '\n';
}

inline std::vector<ItemProgram> split(const NnefProgram& program, const Assignment& assignment) {
  std::map<std::string, const Instruction*> compute_of;
  for (const auto& instr : program.instructions) {
    if (is_sync_op(instr.op))
      throw Error(ErrorKind::ValidationError, "split takes a single description without sync instructions");
    if (is_compute(instr.op)) compute_of.emplace(instr.result, &instr);
  }

  if (assignment.items.empty()) throw Error(ErrorKind::InvalidAssignment, "no items");
  {
    std::set<std::string> unique(assignment.items.begin(), assignment.items.end());
    if (unique.size() != assignment.items.size())
      throw Error(ErrorKind::InvalidAssignment, "duplicate item id");
  }
  auto item_known = [&](const std::string& id) {
    return std::find(assignment.items.begin(), assignment.items.end(), id) != assignment.items.end();
  };
  for (const auto& [var, item] : assignment.map) {
    if (!compute_of.count(var))
      throw Error(ErrorKind::InvalidAssignment, "'" + var + "' is not a compute instruction result");
    if (!item_known(item)) throw Error(ErrorKind::InvalidAssignment, "unknown item '" + item + "'");
  }
  for (const auto& [var, instr] : compute_of) {
    if (!assignment.map.count(var))
      throw Error(ErrorKind::InvalidAssignment, "compute result '" + var + "' is unassigned");
  }
  for (const auto& item : assignment.items) {
    bool used = false;
    for (const auto& [var, id] : assignment.map) used = used || id == item;
    if (!used) throw Error(ErrorKind::EmptyItem, "item '" + item + "' has no instructions");
  }

  ShapeMap shapes = infer_shapes(program);

  // Cross-item edges: variables computed on one item and consumed on others.
  std::map<std::string, std::vector<std::string>> readers_of;  // var -> reader items, assignment order
  for (const auto& item : assignment.items) {
    for (const auto& instr : program.instructions) {
      if (!is_compute(instr.op) || assignment.map.at(instr.result) != item) continue;
      for (const auto& var : instr.variable_args()) {
        auto producer = compute_of.find(var);
        if (producer == compute_of.end()) continue;  // declaration: replicated, not synced
        if (assignment.map.at(var) == item) continue;
        auto& readers = readers_of[var];
        if (std::find(readers.begin(), readers.end(), item) == readers.end()) readers.push_back(item);
      }
    }
  }

  std::set<std::string> taken(program.inputs.begin(), program.inputs.end());
  for (const auto& out : program.outputs) taken.insert(out);
  for (const auto& instr : program.instructions) taken.insert(instr.result);
  std::map<std::string, std::string> sync_of;  // shared var -> sync handle name
  for (const auto& instr : program.instructions) {
    if (!readers_of.count(instr.result)) continue;
    std::string name = instr.result + "_s";
    while (taken.count(name)) name += "_";
    taken.insert(name);
    sync_of.emplace(instr.result, name);
  }

  // Graph outputs that are declarations rather than computed values still
  // need a home; the first item carries them.
  std::set<std::string> declared_outputs;
  for (const auto& out : program.outputs)
    if (!compute_of.count(out)) declared_outputs.insert(out);

  std::vector<ItemProgram> result;
  for (const auto& item : assignment.items) {
    ItemProgram ip;
    ip.graph.name = program.name;
    ip.graph.inputs = program.inputs;
    ip.graph.outputs = program.outputs;

    std::vector<const Instruction*> computes;
    std::set<std::string> consumed;
    for (const auto& instr : program.instructions) {
      if (!is_compute(instr.op) || assignment.map.at(instr.result) != item) continue;
      computes.push_back(&instr);
      for (const auto& var : instr.variable_args()) consumed.insert(var);
    }
    bool carries_declared_outputs = item == assignment.items.front() && !declared_outputs.empty();
    if (carries_declared_outputs)
      for (const auto& out : declared_outputs) consumed.insert(out);

    std::vector<Instruction> body;
    IdentList header_inputs;
    for (const auto& instr : program.instructions) {
      if ((instr.op == Op::External || instr.op == Op::Variable) && consumed.count(instr.result)) {
        body.push_back(instr);
        if (instr.op == Op::External) header_inputs.push_back(instr.result);
      }
    }

    // Received variables, in order of first local use.
    std::vector<std::string> received;
    for (const auto* c : computes) {
      for (const auto& var : c->variable_args()) {
        if (!compute_of.count(var) || assignment.map.at(var) == item) continue;
        if (std::find(received.begin(), received.end(), var) == received.end()) received.push_back(var);
      }
    }
    for (const auto& var : received) {
      Instruction decl;
      decl.result = sync_of.at(var);
      decl.op = Op::VariableSync;
      decl.args = {shapes.at(var)};
      body.push_back(std::move(decl));
      header_inputs.push_back(sync_of.at(var));
    }

    IdentList header_outputs;
    std::set<std::string> got;
    for (const auto* c : computes) {
      for (const auto& var : c->variable_args()) {
        if (!compute_of.count(var) || assignment.map.at(var) == item || got.count(var)) continue;
        Instruction get;
        get.result = var;
        get.op = Op::GetVar;
        get.args = {Ident{assignment.map.at(var)}, Ident{sync_of.at(var)}};
        body.push_back(std::move(get));
        got.insert(var);
      }
      body.push_back(*c);
      if (readers_of.count(c->result)) {
        Instruction send;
        send.result = sync_of.at(c->result);
        send.op = Op::SendVar;
        send.args = {readers_of.at(c->result), Ident{c->result}};
        body.push_back(std::move(send));
        header_outputs.push_back(sync_of.at(c->result));
      }
    }
    for (const auto& out : program.outputs) {
      bool local = compute_of.count(out) ? assignment.map.at(out) == item
                                         : carries_declared_outputs;
      if (local) header_outputs.push_back(out);
    }

    ip.item.item_id = item;
    ip.item.node_name = assignment.nodes.count(item) ? assignment.nodes.at(item) : program.name;
    ip.item.inputs = std::move(header_inputs);
    ip.item.outputs = std::move(header_outputs);
    ip.graph.instructions = std::move(body);
    result.push_back(std::move(ip));
  }
  return result;
}

inline NnefProgram merge(const std::vector<ItemProgram>& items) {
  if (items.empty()) throw Error(ErrorKind::ValidationError, "no items to merge");

  bool any_sync = false;
  for (const auto& item : items)
    for (const auto& instr : item.graph.instructions) any_sync = any_sync || is_sync_op(instr.op);
  if (items.size() == 1 && !any_sync) return items[0].graph;

  NnefProgram out;
  out.name = items[0].graph.name;
  out.inputs = items[0].graph.inputs;
  out.outputs = items[0].graph.outputs;

  std::map<std::string, const Instruction*> decl_seen;
  std::vector<Instruction> decls;
  std::map<std::string, const Instruction*> compute_seen;
  std::vector<const Instruction*> computes;
  for (const auto& item : items) {
    for (const auto& instr : item.graph.instructions) {
      if (instr.op == Op::External || instr.op == Op::Variable) {
        auto it = decl_seen.find(instr.result);
        if (it == decl_seen.end()) {
          decl_seen.emplace(instr.result, &instr);
          decls.push_back(instr);
        } else if (!(*it->second == instr)) {
          throw Error(ErrorKind::ConflictingDeclarations,
                      "'" + instr.result + "' is declared with different parameters by two items");
        }
      } else if (is_compute(instr.op)) {
        auto it = compute_seen.find(instr.result);
        if (it == compute_seen.end()) {
          compute_seen.emplace(instr.result, &instr);
          computes.push_back(&instr);
        } else if (!(*it->second == instr)) {
          throw Error(ErrorKind::ConflictingDeclarations,
                      "'" + instr.result + "' is computed differently by two items");
        }
      }
    }
  }

  for (const auto& item : items) {
    for (const auto& instr : item.graph.instructions) {
      if (instr.op == Op::GetVar && !compute_seen.count(instr.result))
        throw Error(ErrorKind::UnresolvedSync,
                    "variable '" + instr.result + "' is received but computed by no item");
    }
  }

  out.instructions = decls;
  std::set<std::string> available;
  for (const auto& d : decls) available.insert(d.result);
  std::vector<const Instruction*> remaining = computes;
  while (!remaining.empty()) {
    bool progressed = false;
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      bool ready = true;
      for (const auto& var : (*it)->variable_args()) ready = ready && available.count(var) > 0;
      if (!ready) continue;
      out.instructions.push_back(**it);
      available.insert((*it)->result);
      remaining.erase(it);
      progressed = true;
      break;
    }
    if (!progressed)
      throw Error(ErrorKind::UnresolvedSync,
                  "variable consumed by '" + remaining.front()->result + "' has no producer in the merged program");
  }
  return out;
}

namespace detail {

// Maximal linear chains of the compute dataflow graph, in program order.
struct ComputeGraph {
  std::vector<const Instruction*> computes;
  std::map<std::string, int> index;                // result -> compute index
  std::vector<std::vector<int>> consumers;         // compute -> consuming computes
  std::vector<std::vector<int>> producers;         // compute -> producing computes
  std::vector<std::vector<char>> reach;            // transitive closure
};

inline ComputeGraph build_compute_graph(const NnefProgram& program) {
  ComputeGraph g;
  for (const auto& instr : program.instructions) {
    if (!is_compute(instr.op)) continue;
    g.index.emplace(instr.result, static_cast<int>(g.computes.size()));
    g.computes.push_back(&instr);
  }
  size_t n = g.computes.size();
  g.consumers.assign(n, {});
  g.producers.assign(n, {});
  for (size_t i = 0; i < n; ++i) {
    for (const auto& var : g.computes[i]->variable_args()) {
      auto it = g.index.find(var);
      if (it == g.index.end()) continue;
      g.producers[i].push_back(it->second);
      g.consumers[static_cast<size_t>(it->second)].push_back(static_cast<int>(i));
    }
  }
  g.reach.assign(n, std::vector<char>(n, 0));
  for (size_t i = n; i-- > 0;) {  // computes are in topological (program) order
    for (int c : g.consumers[i]) {
      g.reach[i][static_cast<size_t>(c)] = 1;
      for (size_t k = 0; k < n; ++k) g.reach[i][k] |= g.reach[static_cast<size_t>(c)][k];
    }
  }
  return g;
}

inline std::vector<std::vector<int>> chains_of(const ComputeGraph& g) {
  size_t n = g.computes.size();
  std::vector<char> taken(n, 0);
  std::vector<std::vector<int>> chains;
  for (size_t i = 0; i < n; ++i) {
    if (taken[i]) continue;
    bool starts = g.producers[i].size() != 1 ||
                  g.consumers[static_cast<size_t>(g.producers[i][0])].size() != 1;
    if (!starts) continue;
    std::vector<int> chain = {static_cast<int>(i)};
    taken[i] = 1;
    int cur = static_cast<int>(i);
    while (g.consumers[static_cast<size_t>(cur)].size() == 1) {
      int next = g.consumers[static_cast<size_t>(cur)][0];
      if (g.producers[static_cast<size_t>(next)].size() != 1 || taken[static_cast<size_t>(next)]) break;
      chain.push_back(next);
      taken[static_cast<size_t>(next)] = 1;
      cur = next;
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

inline bool chains_independent(const ComputeGraph& g, const std::vector<int>& a, const std::vector<int>& b) {
  for (int u : a)
    for (int v : b)
      if (g.reach[static_cast<size_t>(u)][static_cast<size_t>(v)] ||
          g.reach[static_cast<size_t>(v)][static_cast<size_t>(u)])
        return false;
  return true;
}

inline std::vector<std::string> item_names(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("item" + std::to_string(i));
  return names;
}

}  // namespace detail

// Deterministic candidate placements: parallel branches on distinct items,
// conv off-loading onto the last item, contiguous segments as the fallback.
inline std::vector<Assignment> suggest_assignments(const NnefProgram& program, int n_items) {
  if (n_items < 1) throw Error(ErrorKind::InvalidAssignment, "need at least one item");
  auto g = detail::build_compute_graph(program);
  const size_t n = g.computes.size();
  std::vector<Assignment> candidates;
  auto valid = [&](const Assignment& a) {
    for (const auto& item : a.items) {
      bool used = false;
      for (const auto& [var, id] : a.map) used = used || id == item;
      if (!used) return false;
    }
    return true;
  };
  auto push_unique = [&](Assignment a) {
    if (!valid(a)) return;
    for (const auto& seen : candidates)
      if (seen.map == a.map) return;
    candidates.push_back(std::move(a));
  };

  if (n_items > 1 && n > 0) {
    auto chains = detail::chains_of(g);
    std::vector<size_t> group;
    for (size_t i = 0; i < chains.size(); ++i) {
      std::vector<size_t> candidate = {i};
      for (size_t j = i + 1; j < chains.size(); ++j) {
        bool ok = true;
        for (size_t k : candidate) ok = ok && detail::chains_independent(g, chains[k], chains[j]);
        if (ok) candidate.push_back(j);
      }
      if (candidate.size() >= 2) {
        group = candidate;
        break;
      }
    }
    if (group.size() >= static_cast<size_t>(n_items - 1)) {
      Assignment a;
      a.items = detail::item_names(n_items);
      std::set<size_t> in_group(group.begin(), group.end());
      for (size_t i = 0; i < chains.size(); ++i) {
        if (in_group.count(i)) continue;
        for (int c : chains[i]) a.map[g.computes[static_cast<size_t>(c)]->result] = a.items[0];
      }
      size_t slot = 0;
      for (size_t i : group) {
        for (int c : chains[i]) a.map[g.computes[static_cast<size_t>(c)]->result] = a.items[1 + slot % (n_items - 1)];
        ++slot;
      }
      push_unique(std::move(a));
    }

    size_t conv_count = 0;
    for (const auto* c : g.computes) conv_count += c->op == Op::Conv ? 1 : 0;
    if (conv_count > 0 && conv_count < n) {
      Assignment a;
      a.items = detail::item_names(n_items);
      std::vector<const Instruction*> rest;
      for (const auto* c : g.computes) {
        if (c->op == Op::Conv)
          a.map[c->result] = a.items.back();
        else
          rest.push_back(c);
      }
      size_t buckets = static_cast<size_t>(n_items - 1);
      for (size_t i = 0; i < rest.size(); ++i)
        a.map[rest[i]->result] = a.items[i * buckets / rest.size()];
      push_unique(std::move(a));
    }
  }

  if (n > 0 && static_cast<size_t>(n_items) <= n) {
    Assignment a;
    a.items = detail::item_names(n_items);
    for (size_t i = 0; i < n; ++i)
      a.map[g.computes[i]->result] = a.items[i * static_cast<size_t>(n_items) / n];
    push_unique(std::move(a));
  }
  return candidates;
}

}  // namespace nnefx
