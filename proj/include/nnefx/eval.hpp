#pragma once

#include <map>
#include <string>
#include <vector>

#include "nnefx/ast.hpp"
#include "nnefx/ops.hpp"
#include "nnefx/validate.hpp"
#include "nnefx/weights.hpp"

namespace nnefx {

using TensorMap = std::map<std::string, Tensor>;

namespace detail {

// Executes one declaration or compute instruction against an environment.
// Sync instructions are the runtime's business and are rejected here; the
// concurrent runtime shares this function for everything else, which is what
// makes item execution bitwise equal to sequential evaluation.
inline Tensor exec_instruction(const Instruction& instr, const TensorMap& env,
                               const TensorMap& inputs, const WeightStore& weights) {
  auto operand = [&](size_t arg) -> const Tensor& {
    const std::string& name = std::get<Ident>(instr.args[arg]).name;
    auto it = env.find(name);
    if (it == env.end())
      throw Error(ErrorKind::ValidationError, "operand '" + name + "' not yet computed");
    return it->second;
  };
  switch (instr.op) {
    case Op::External: {
      auto it = inputs.find(instr.result);
      if (it == inputs.end())
        throw Error(ErrorKind::MissingInput, "no input tensor for external '" + instr.result + "'");
      Shape declared = instr.ints_arg(0);
      if (it->second.shape() != declared)
        throw Error(ErrorKind::ShapeMismatch,
                    "external '" + instr.result + "' declared " + shape_to_string(declared) +
                        " but was given " + shape_to_string(it->second.shape()));
      return it->second;
    }
    case Op::Variable: {
      const std::string& label = instr.str_arg(1);
      auto it = weights.find(label);
      if (it == weights.end())
        throw Error(ErrorKind::MissingWeight, "no weight for label '" + label + "'");
      Shape declared = instr.ints_arg(0);
      if (it->second.shape() != declared)
        throw Error(ErrorKind::ShapeMismatch,
                    "weight '" + label + "' declared " + shape_to_string(declared) + " but store holds " +
                        shape_to_string(it->second.shape()));
      return it->second;
    }
    case Op::Conv:
      return conv(operand(0), operand(1), operand(2), instr.ints_arg(3), instr.ints_arg(4),
                  instr.tuples_arg(5), instr.int_arg(6));
    case Op::Relu:
      return relu(operand(0));
    case Op::MaxPool:
      return max_pool(operand(0), instr.ints_arg(1), instr.ints_arg(2), instr.ints_arg(3),
                      instr.tuples_arg(4), instr.str_arg(5));
    case Op::Reshape:
      return reshape(operand(0), instr.ints_arg(1));
    case Op::Linear:
      return linear(operand(0), operand(1), operand(2));
    case Op::Softmax:
      return softmax(operand(0), instr.int_arg(1));
    case Op::Concat: {
      std::vector<Tensor> parts;
      for (const auto& name : instr.idents_arg(0)) {
        auto it = env.find(name);
        if (it == env.end())
          throw Error(ErrorKind::ValidationError, "operand '" + name + "' not yet computed");
        parts.push_back(it->second);
      }
      return concat(parts, instr.int_arg(1));
    }
    case Op::Split:
      return split(operand(0), instr.int_arg(1), instr.tuples_arg(2)).front();
    case Op::VariableSync:
    case Op::GetVar:
    case Op::SendVar:
      throw Error(ErrorKind::ValidationError,
                  std::string(op_name(instr.op)) + " has no sequential semantics; run item sets "
                  "through the item runtime");
  }
  throw Error(ErrorKind::ValidationError, "unreachable op");
}

}  // namespace detail

// Sequential in-order evaluation of a single description. Deterministic and
// bit-reproducible: fixed kernels, fixed accumulation order, no threading.
inline TensorMap evaluate(const NnefProgram& program, const TensorMap& inputs,
                          const WeightStore& weights) {
  TensorMap env;
  for (size_t i = 0; i < program.instructions.size(); ++i) {
    const Instruction& instr = program.instructions[i];
    try {
      env[instr.result] = detail::exec_instruction(instr, env, inputs, weights);
    } catch (const Error& e) {
      throw Error(e.kind(), "instruction " + std::to_string(i) + " ('" + instr.result + "'): " +
                                e.detail());
    }
  }
  TensorMap outputs;
  for (const auto& out : program.outputs) {
    auto it = env.find(out);
    if (it == env.end())
      throw Error(ErrorKind::ValidationError, "graph output '" + out + "' was never assigned");
    outputs.emplace(out, it->second);
  }
  return outputs;
}

}  // namespace nnefx
