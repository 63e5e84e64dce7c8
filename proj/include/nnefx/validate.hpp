#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nnefx/ast.hpp"

namespace nnefx {

enum class ViolationKind {
  DoubleAssign,
  UseBeforeDef,
  MissingOutputAssignment,
  MissingVarsyncDecl,
  DuplicateWriter,
  UnknownSourceItem,
  UnknownDestItem,
  UnresolvedSync,
  SyncNameMismatch,
  UnexpectedReader,
  DestNotReading,
  RelayViolation,
  HeaderMismatch,
  DuplicateItemId,
  ConflictingDeclarations,
  ItemInputUndeclared,
  OutputNotProduced,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DoubleAssign: return "DoubleAssign";
    case ViolationKind::UseBeforeDef: return "UseBeforeDef";
    case ViolationKind::MissingOutputAssignment: return "MissingOutputAssignment";
    case ViolationKind::MissingVarsyncDecl: return "MissingVarsyncDecl";
    case ViolationKind::DuplicateWriter: return "DuplicateWriter";
    case ViolationKind::UnknownSourceItem: return "UnknownSourceItem";
    case ViolationKind::UnknownDestItem: return "UnknownDestItem";
    case ViolationKind::UnresolvedSync: return "UnresolvedSync";
    case ViolationKind::SyncNameMismatch: return "SyncNameMismatch";
    case ViolationKind::UnexpectedReader: return "UnexpectedReader";
    case ViolationKind::DestNotReading: return "DestNotReading";
    case ViolationKind::RelayViolation: return "RelayViolation";
    case ViolationKind::HeaderMismatch: return "HeaderMismatch";
    case ViolationKind::DuplicateItemId: return "DuplicateItemId";
    case ViolationKind::ConflictingDeclarations: return "ConflictingDeclarations";
    case ViolationKind::ItemInputUndeclared: return "ItemInputUndeclared";
    case ViolationKind::OutputNotProduced: return "OutputNotProduced";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  int instruction;  // index into the offending program, -1 for set-level issues
  std::string variable;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  void add(ViolationKind kind, int instruction, std::string variable, std::string message) {
    violations.push_back({kind, instruction, std::move(variable), std::move(message)});
  }

  std::string to_text() const {
    std::string out;
    for (const auto& v : violations) {
      out += std::string(to_string(v.kind)) + ": " + v.message + "\n";
    }
    return out;
  }
};

namespace detail {

inline void check_ssa_body(const NnefProgram& program, ValidationReport& report) {
  std::map<std::string, int> assigned;  // variable -> defining instruction index
  std::set<std::string> header_inputs(program.inputs.begin(), program.inputs.end());
  for (size_t i = 0; i < program.instructions.size(); ++i) {
    const Instruction& instr = program.instructions[i];
    for (const auto& var : instr.variable_args()) {
      auto it = assigned.find(var);
      if (it == assigned.end() && !header_inputs.count(var))
        report.add(ViolationKind::UseBeforeDef, static_cast<int>(i), var,
                   "'" + var + "' used by instruction " + std::to_string(i) + " ('" +
                       instr.result + "') before assignment");
    }
    if (instr.op == Op::GetVar) {
      const std::string& sync = instr.ident_arg(1).name;
      auto it = assigned.find(sync);
      if (it == assigned.end()) {
        report.add(ViolationKind::UseBeforeDef, static_cast<int>(i), sync,
                   "variablesync '" + sync + "' read before its declaration");
      } else if (program.instructions[static_cast<size_t>(it->second)].op != Op::VariableSync) {
        report.add(ViolationKind::MissingVarsyncDecl, static_cast<int>(i), sync,
                   "'" + sync + "' is not declared as a variablesync");
      }
    }
    if (assigned.count(instr.result)) {
      report.add(ViolationKind::DoubleAssign, static_cast<int>(i), instr.result,
                 "'" + instr.result + "' assigned again by instruction " + std::to_string(i));
    } else {
      assigned[instr.result] = static_cast<int>(i);
    }
  }
}

inline bool assigns(const NnefProgram& program, const std::string& var) {
  for (const auto& instr : program.instructions)
    if (instr.result == var) return true;
  return false;
}

}  // namespace detail

// SSA + def-before-use + output coverage. Violations are report entries.
inline ValidationReport validate_ssa(const NnefProgram& program) {
  ValidationReport report;
  detail::check_ssa_body(program, report);
  for (const auto& out : program.outputs) {
    if (!detail::assigns(program, out))
      report.add(ViolationKind::MissingOutputAssignment, -1, out,
                 "graph output '" + out + "' is never assigned");
  }
  return report;
}

// Item files get the same per-body checks; coverage applies to the item
// header, since a single item produces only its slice of the graph outputs.
inline ValidationReport validate_ssa(const ItemProgram& item) {
  ValidationReport report;
  detail::check_ssa_body(item.graph, report);
  for (const auto& out : item.item.outputs) {
    if (!detail::assigns(item.graph, out))
      report.add(ViolationKind::MissingOutputAssignment, -1, out,
                 "item output '" + out + "' is never assigned in item '" + item.item.item_id + "'");
  }
  for (const auto& in : item.item.inputs) {
    bool declared = false;
    for (const auto& instr : item.graph.instructions) {
      if (instr.result == in && (instr.op == Op::External || instr.op == Op::VariableSync)) {
        declared = true;
        break;
      }
    }
    if (!declared)
      report.add(ViolationKind::ItemInputUndeclared, -1, in,
                 "item input '" + in + "' has no external or variablesync declaration in item '" +
                     item.item.item_id + "'");
  }
  return report;
}

// Cross-item checks: unique writers, resolvable reads, reader/dest agreement,
// no relays, consistent replicated declarations and graph headers.
inline ValidationReport validate_items(const std::vector<ItemProgram>& items) {
  ValidationReport report;
  if (items.empty()) {
    report.add(ViolationKind::HeaderMismatch, -1, "", "empty item set");
    return report;
  }

  std::set<std::string> item_ids;
  for (const auto& item : items) {
    if (!item_ids.insert(item.item.item_id).second)
      report.add(ViolationKind::DuplicateItemId, -1, item.item.item_id,
                 "item id '" + item.item.item_id + "' appears twice");
    if (!(item.graph.name == items[0].graph.name && item.graph.inputs == items[0].graph.inputs &&
          item.graph.outputs == items[0].graph.outputs))
      report.add(ViolationKind::HeaderMismatch, -1, item.item.item_id,
                 "graph header of item '" + item.item.item_id + "' differs from item '" +
                     items[0].item.item_id + "'");
  }

  for (const auto& item : items) {
    ValidationReport local = validate_ssa(item);
    for (auto& v : local.violations) report.violations.push_back(std::move(v));
  }

  struct Writer {
    std::string item_id;
    std::string data;  // variable carried by the variablesync
    IdentList dest;
  };
  std::map<std::string, Writer> writers;          // variablesync name -> writer
  std::map<std::string, std::string> computed_in;  // compute result -> item id
  std::map<std::string, const Instruction*> declarations;

  for (const auto& item : items) {
    for (const auto& instr : item.graph.instructions) {
      if (instr.op == Op::SendVar) {
        auto [it, fresh] = writers.emplace(
            instr.result, Writer{item.item.item_id, instr.ident_arg(1).name, instr.idents_arg(0)});
        if (!fresh)
          report.add(ViolationKind::DuplicateWriter, -1, instr.result,
                     "variablesync '" + instr.result + "' written by both '" + it->second.item_id +
                         "' and '" + item.item.item_id + "'");
      } else if (is_compute(instr.op)) {
        auto [it, fresh] = computed_in.emplace(instr.result, item.item.item_id);
        if (!fresh)
          report.add(ViolationKind::DoubleAssign, -1, instr.result,
                     "'" + instr.result + "' computed by both '" + it->second + "' and '" +
                         item.item.item_id + "'");
      } else if (instr.op == Op::External || instr.op == Op::Variable) {
        auto [it, fresh] = declarations.emplace(instr.result, &instr);
        if (!fresh && !(*it->second == instr))
          report.add(ViolationKind::ConflictingDeclarations, -1, instr.result,
                     "replicated declaration of '" + instr.result + "' differs between items");
      }
    }
  }

  for (const auto& item : items) {
    std::set<std::string> received;  // get_var results in this item
    for (size_t i = 0; i < item.graph.instructions.size(); ++i) {
      const Instruction& instr = item.graph.instructions[i];
      if (instr.op == Op::GetVar) {
        const std::string& source = instr.ident_arg(0).name;
        const std::string& sync = instr.ident_arg(1).name;
        received.insert(instr.result);
        if (!item_ids.count(source)) {
          report.add(ViolationKind::UnknownSourceItem, static_cast<int>(i), source,
                     "get_var in item '" + item.item.item_id + "' names unknown item '" + source + "'");
          continue;
        }
        auto w = writers.find(sync);
        if (w == writers.end()) {
          report.add(ViolationKind::UnresolvedSync, static_cast<int>(i), sync,
                     "variablesync '" + sync + "' has no send_var in any item");
          continue;
        }
        if (w->second.item_id != source)
          report.add(ViolationKind::UnresolvedSync, static_cast<int>(i), sync,
                     "variablesync '" + sync + "' is written by '" + w->second.item_id +
                         "', not by '" + source + "'");
        if (instr.result != w->second.data)
          report.add(ViolationKind::SyncNameMismatch, static_cast<int>(i), instr.result,
                     "get_var result '" + instr.result + "' must reuse the shared variable name '" +
                         w->second.data + "'");
        bool listed = false;
        for (const auto& d : w->second.dest) listed = listed || d == item.item.item_id;
        if (!listed)
          report.add(ViolationKind::UnexpectedReader, static_cast<int>(i), sync,
                     "item '" + item.item.item_id + "' reads '" + sync +
                         "' but is not in the writer's destination list");
      } else if (instr.op == Op::SendVar) {
        const std::string& data = instr.ident_arg(1).name;
        if (received.count(data))
          report.add(ViolationKind::RelayViolation, static_cast<int>(i), data,
                     "item '" + item.item.item_id + "' re-sends received variable '" + data + "'");
        for (const auto& dest : instr.idents_arg(0)) {
          if (!item_ids.count(dest)) {
            report.add(ViolationKind::UnknownDestItem, static_cast<int>(i), dest,
                       "send_var in item '" + item.item.item_id + "' names unknown item '" + dest + "'");
            continue;
          }
          if (dest == item.item.item_id) {
            report.add(ViolationKind::UnknownDestItem, static_cast<int>(i), dest,
                       "send_var in item '" + item.item.item_id + "' lists its own item");
            continue;
          }
          bool reads = false;
          for (const auto& other : items) {
            if (other.item.item_id != dest) continue;
            for (const auto& oi : other.graph.instructions)
              reads = reads || (oi.op == Op::GetVar && oi.ident_arg(1).name == instr.result);
          }
          if (!reads)
            report.add(ViolationKind::DestNotReading, static_cast<int>(i), dest,
                       "destination '" + dest + "' never reads variablesync '" + instr.result + "'");
        }
      }
    }
  }

  for (const auto& out : items[0].graph.outputs) {
    if (!computed_in.count(out))
      report.add(ViolationKind::OutputNotProduced, -1, out,
                 "graph output '" + out + "' is computed by no item");
  }
  return report;
}

}  // namespace nnefx
