#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nnefx/errors.hpp"

namespace nnefx {

enum class Op {
  External,
  Variable,
  Conv,
  Relu,
  MaxPool,
  Reshape,
  Linear,
  Softmax,
  Concat,
  Split,
  VariableSync,
  GetVar,
  SendVar,
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::External: return "external";
    case Op::Variable: return "variable";
    case Op::Conv: return "conv";
    case Op::Relu: return "relu";
    case Op::MaxPool: return "max_pool";
    case Op::Reshape: return "reshape";
    case Op::Linear: return "linear";
    case Op::Softmax: return "softmax";
    case Op::Concat: return "concat";
    case Op::Split: return "split";
    case Op::VariableSync: return "variablesync";
    case Op::GetVar: return "get_var";
    case Op::SendVar: return "send_var";
  }
  return "?";
}

inline std::optional<Op> op_from_name(const std::string& name) {
  if (name == "external") return Op::External;
  if (name == "variable") return Op::Variable;
  if (name == "conv") return Op::Conv;
  if (name == "relu") return Op::Relu;
  if (name == "max_pool") return Op::MaxPool;
  if (name == "reshape") return Op::Reshape;
  if (name == "linear") return Op::Linear;
  if (name == "softmax") return Op::Softmax;
  if (name == "concat") return Op::Concat;
  if (name == "split") return Op::Split;
  if (name == "variablesync") return Op::VariableSync;
  if (name == "get_var") return Op::GetVar;
  if (name == "send_var") return Op::SendVar;
  return std::nullopt;
}

// external/variable declare tensors; variablesync declares a sync slot.
inline bool is_declaration(Op op) {
  return op == Op::External || op == Op::Variable || op == Op::VariableSync;
}

inline bool is_sync_op(Op op) {
  return op == Op::VariableSync || op == Op::GetVar || op == Op::SendVar;
}

// Instructions that become Petri net transitions.
inline bool is_compute(Op op) { return !is_declaration(op) && !is_sync_op(op); }

using IntList = std::vector<int64_t>;
using TupleList = std::vector<std::pair<int64_t, int64_t>>;
using IdentList = std::vector<std::string>;

struct Ident {
  std::string name;
  bool operator==(const Ident&) const = default;
};

// One normalized call argument. Ident covers tensor variables, variablesync
// names and graphitem references; the op signature fixes the role.
using Argument = std::variant<Ident, int64_t, double, std::string, IntList, TupleList, IdentList>;

enum class ArgKind { Var, Int, Float, Str, Ints, Tuples, Idents };

struct Param {
  const char* name;
  ArgKind kind;
};

// Canonical positional order per op; named arguments are normalized onto it.
inline const std::vector<Param>& op_params(Op op) {
  static const std::vector<Param> external = {{"shape", ArgKind::Ints}};
  static const std::vector<Param> variable = {{"shape", ArgKind::Ints}, {"label", ArgKind::Str}};
  static const std::vector<Param> conv = {{"input", ArgKind::Var},      {"filter", ArgKind::Var},
                                          {"bias", ArgKind::Var},       {"stride", ArgKind::Ints},
                                          {"dilation", ArgKind::Ints},  {"padding", ArgKind::Tuples},
                                          {"groups", ArgKind::Int}};
  static const std::vector<Param> relu = {{"input", ArgKind::Var}};
  static const std::vector<Param> max_pool = {{"input", ArgKind::Var},     {"size", ArgKind::Ints},
                                              {"stride", ArgKind::Ints},   {"dilation", ArgKind::Ints},
                                              {"padding", ArgKind::Tuples}, {"border", ArgKind::Str}};
  static const std::vector<Param> reshape = {{"input", ArgKind::Var}, {"shape", ArgKind::Ints}};
  static const std::vector<Param> linear = {{"input", ArgKind::Var}, {"weight", ArgKind::Var}, {"bias", ArgKind::Var}};
  static const std::vector<Param> softmax = {{"input", ArgKind::Var}, {"axis", ArgKind::Int}};
  static const std::vector<Param> concat = {{"inputs", ArgKind::Idents}, {"axis", ArgKind::Int}};
  static const std::vector<Param> split = {{"input", ArgKind::Var}, {"axis", ArgKind::Int}, {"ranges", ArgKind::Tuples}};
  static const std::vector<Param> variablesync = {{"shape", ArgKind::Ints}};
  static const std::vector<Param> get_var = {{"source", ArgKind::Var}, {"data", ArgKind::Var}};
  static const std::vector<Param> send_var = {{"dest", ArgKind::Idents}, {"data", ArgKind::Var}};
  switch (op) {
    case Op::External: return external;
    case Op::Variable: return variable;
    case Op::Conv: return conv;
    case Op::Relu: return relu;
    case Op::MaxPool: return max_pool;
    case Op::Reshape: return reshape;
    case Op::Linear: return linear;
    case Op::Softmax: return softmax;
    case Op::Concat: return concat;
    case Op::Split: return split;
    case Op::VariableSync: return variablesync;
    case Op::GetVar: return get_var;
    case Op::SendVar: return send_var;
  }
  return relu;
}

struct Instruction {
  std::string result;
  Op op;
  std::vector<Argument> args;  // canonical positional order
  int line = 0;

  bool operator==(const Instruction& other) const {
    return result == other.result && op == other.op && args == other.args;
  }

  const Ident& ident_arg(size_t i) const { return std::get<Ident>(args[i]); }
  int64_t int_arg(size_t i) const { return std::get<int64_t>(args[i]); }
  const std::string& str_arg(size_t i) const { return std::get<std::string>(args[i]); }
  const IntList& ints_arg(size_t i) const { return std::get<IntList>(args[i]); }
  const TupleList& tuples_arg(size_t i) const { return std::get<TupleList>(args[i]); }
  const IdentList& idents_arg(size_t i) const { return std::get<IdentList>(args[i]); }

  // Tensor-variable operands: Var slots plus identifier lists that name
  // tensors (concat inputs). get_var's operands are a graphitem and a
  // variablesync, neither a tensor; send_var reads its data operand.
  std::vector<std::string> variable_args() const {
    std::vector<std::string> vars;
    if (op == Op::GetVar) return vars;
    const auto& params = op_params(op);
    for (size_t i = 0; i < params.size(); ++i) {
      if (op == Op::SendVar && params[i].kind == ArgKind::Idents) continue;  // dest items
      if (params[i].kind == ArgKind::Var) {
        vars.push_back(ident_arg(i).name);
      } else if (params[i].kind == ArgKind::Idents) {
        for (const auto& v : idents_arg(i)) vars.push_back(v);
      }
    }
    return vars;
  }
};

struct GraphItemDecl {
  std::string item_id;
  std::string node_name;
  IdentList inputs;
  IdentList outputs;
  bool operator==(const GraphItemDecl&) const = default;
};

struct NnefProgram {
  std::string name;
  IdentList inputs;
  IdentList outputs;
  std::vector<Instruction> instructions;

  bool operator==(const NnefProgram& other) const {
    return name == other.name && inputs == other.inputs && outputs == other.outputs &&
           instructions == other.instructions;
  }
};

// A deployment item: the shared graph header plus this item's slice.
struct ItemProgram {
  NnefProgram graph;  // graph.instructions holds the item's own instructions
  GraphItemDecl item;

  bool operator==(const ItemProgram&) const = default;
};

}  // namespace nnefx
