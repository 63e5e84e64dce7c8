#pragma once

#include <cstdio>
#include <string>
#include <variant>

#include "nnefx/ast.hpp"

namespace nnefx {

namespace detail {

inline std::string render_value(const Argument& value) {
  struct Renderer {
    std::string operator()(const Ident& v) const { return v.name; }
    std::string operator()(int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.9g", v);
      std::string s(buf);
      // Keep float literals recognizably float after round-trip.
      if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
          s.find('E') == std::string::npos)
        s += ".0";
      return s;
    }
    std::string operator()(const std::string& v) const { return "'" + v + "'"; }
    std::string operator()(const IntList& v) const {
      std::string s = "[";
      for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
      return s + "]";
    }
    std::string operator()(const TupleList& v) const {
      std::string s = "[";
      for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += "(" + std::to_string(v[i].first) + ", " + std::to_string(v[i].second) + ")";
      }
      return s + "]";
    }
    std::string operator()(const IdentList& v) const {
      std::string s = "[";
      for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
      return s + "]";
    }
  };
  return std::visit(Renderer{}, value);
}

inline std::string render_idlist(const IdentList& ids) {
  if (ids.empty()) return "( )";
  std::string s = "(";
  for (size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + ids[i];
  return s + ")";
}

// Canonical call style: identifier operands positionally, constants named.
inline std::string render_instruction(const Instruction& instr) {
  const auto& params = op_params(instr.op);
  std::string s = "    " + instr.result + " = " + op_name(instr.op) + "(";
  bool named = false;
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) s += ", ";
    if (!(params[i].kind == ArgKind::Var || params[i].kind == ArgKind::Idents)) named = true;
    if (named) s += std::string(params[i].name) + " = ";
    s += render_value(instr.args[i]);
  }
  return s + ");\n";
}

}  // namespace detail

inline std::string serialize(const NnefProgram& program, const GraphItemDecl* item = nullptr) {
  std::string s = "graph " + program.name + detail::render_idlist(program.inputs) + " -> " +
                  detail::render_idlist(program.outputs) + "\n";
  if (item) {
    s += "graphitem " + item->item_id + " " + item->node_name + detail::render_idlist(item->inputs) +
         " -> " + detail::render_idlist(item->outputs) + "\n";
  }
  s += "{\n";
  for (const auto& instr : program.instructions) s += detail::render_instruction(instr);
  s += "}\n";
  return s;
}

inline std::string serialize(const ItemProgram& item) { return serialize(item.graph, &item.item); }

}  // namespace nnefx
