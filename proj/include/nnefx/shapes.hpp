#pragma once

#include <map>
#include <string>
#include <vector>

#include "nnefx/ast.hpp"
#include "nnefx/ops.hpp"

namespace nnefx {

using ShapeMap = std::map<std::string, Shape>;

namespace detail {

inline const Shape& known_shape(const ShapeMap& shapes, const std::string& var, const Instruction& instr) {
  auto it = shapes.find(var);
  if (it == shapes.end())
    throw Error(ErrorKind::ValidationError,
                "shape of '" + var + "' unknown at '" + instr.result + "'");
  return it->second;
}

// Static output shape of one instruction given its operand shapes; mirrors
// the op formulas without touching data.
inline Shape infer_one(const Instruction& instr, const ShapeMap& shapes) {
  auto in_shape = [&](size_t arg) -> const Shape& {
    return known_shape(shapes, std::get<Ident>(instr.args[arg]).name, instr);
  };
  switch (instr.op) {
    case Op::External:
    case Op::Variable:
    case Op::VariableSync:
      return instr.ints_arg(0);
    case Op::Relu:
      return in_shape(0);
    case Op::Conv: {
      const Shape& in = in_shape(0);
      const Shape& filter = in_shape(1);
      const Shape& bias = in_shape(2);
      require(in.size() == 3 && filter.size() == 4 && bias.size() == 1, ErrorKind::RankError,
              "conv '" + instr.result + "': input must be (c, h, w), filter (out_c, in_c, k_h, k_w)");
      require(filter[1] == in[0], ErrorKind::ChannelMismatch,
              "conv '" + instr.result + "': filter expects " + std::to_string(filter[1]) +
                  " channels, input has " + std::to_string(in[0]));
      require(bias[0] == filter[0], ErrorKind::ChannelMismatch,
              "conv '" + instr.result + "': bias length mismatch");
      const IntList& stride = instr.ints_arg(3);
      const TupleList& padding = instr.tuples_arg(5);
      require(stride.size() == 2 && padding.size() == 2, ErrorKind::ShapeMismatch,
              "conv '" + instr.result + "': stride/padding must be 2-D spatial lists");
      int64_t oh = window_out(in[1], filter[2], stride[0], padding[0].first, padding[0].second, "conv");
      int64_t ow = window_out(in[2], filter[3], stride[1], padding[1].first, padding[1].second, "conv");
      return Shape{filter[0], oh, ow};
    }
    case Op::MaxPool: {
      const Shape& in = in_shape(0);
      require(in.size() == 3, ErrorKind::RankError, "max_pool '" + instr.result + "': input must be (c, h, w)");
      const IntList& size = instr.ints_arg(1);
      const IntList& stride = instr.ints_arg(2);
      const TupleList& padding = instr.tuples_arg(4);
      require(size.size() == 4 && stride.size() == 4 && padding.size() == 4, ErrorKind::ShapeMismatch,
              "max_pool '" + instr.result + "': parameter lists must be 4-D");
      int64_t oh = window_out(in[1], size[2], stride[2], padding[2].first, padding[2].second, "max_pool");
      int64_t ow = window_out(in[2], size[3], stride[3], padding[3].first, padding[3].second, "max_pool");
      return Shape{in[0], oh, ow};
    }
    case Op::Reshape: {
      Shape target = instr.ints_arg(1);
      require(numel(target) == numel(in_shape(0)), ErrorKind::ElementCountMismatch,
              "reshape '" + instr.result + "' changes element count");
      return target;
    }
    case Op::Linear: {
      const Shape& in = in_shape(0);
      const Shape& weight = in_shape(1);
      require(in.size() == 1 && weight.size() == 2, ErrorKind::RankError,
              "linear '" + instr.result + "': input rank 1, weight rank 2");
      require(weight[1] == in[0], ErrorKind::ShapeMismatch,
              "linear '" + instr.result + "': weight expects length " + std::to_string(weight[1]));
      return Shape{weight[0]};
    }
    case Op::Softmax: {
      const Shape& in = in_shape(0);
      int64_t axis = instr.int_arg(1);
      require(axis >= 0 && axis < static_cast<int64_t>(in.size()), ErrorKind::AxisOutOfRange,
              "softmax '" + instr.result + "': axis out of range");
      return in;
    }
    case Op::Concat: {
      const IdentList& inputs = instr.idents_arg(0);
      require(!inputs.empty(), ErrorKind::ShapeMismatch, "concat '" + instr.result + "' of nothing");
      int64_t axis = instr.int_arg(1);
      Shape out = known_shape(shapes, inputs[0], instr);
      require(axis >= 0 && axis < static_cast<int64_t>(out.size()), ErrorKind::AxisOutOfRange,
              "concat '" + instr.result + "': axis out of range");
      for (size_t i = 1; i < inputs.size(); ++i) {
        const Shape& s = known_shape(shapes, inputs[i], instr);
        require(s.size() == out.size(), ErrorKind::ShapeMismatch,
                "concat '" + instr.result + "': rank mismatch");
        for (size_t d = 0; d < s.size(); ++d)
          require(static_cast<int64_t>(d) == axis || s[d] == out[d], ErrorKind::ShapeMismatch,
                  "concat '" + instr.result + "': shape mismatch on axis " + std::to_string(d));
        out[static_cast<size_t>(axis)] += s[static_cast<size_t>(axis)];
      }
      return out;
    }
    case Op::Split: {
      const Shape& in = in_shape(0);
      int64_t axis = instr.int_arg(1);
      require(axis >= 0 && axis < static_cast<int64_t>(in.size()), ErrorKind::AxisOutOfRange,
              "split '" + instr.result + "': axis out of range");
      auto [lo, hi] = instr.tuples_arg(2)[0];
      require(0 <= lo && lo < hi && hi <= in[static_cast<size_t>(axis)], ErrorKind::ShapeMismatch,
              "split '" + instr.result + "': range out of bounds");
      Shape out = in;
      out[static_cast<size_t>(axis)] = hi - lo;
      return out;
    }
    case Op::GetVar:
      // Result takes the variablesync's declared shape.
      return known_shape(shapes, instr.ident_arg(1).name, instr);
    case Op::SendVar:
      return known_shape(shapes, instr.ident_arg(1).name, instr);
  }
  throw Error(ErrorKind::ValidationError, "unreachable op");
}

}  // namespace detail

// Shapes of every variable (and variablesync) in instruction order. Works on
// plain programs and on single item files, where incoming shapes come from
// variablesync declarations.
inline ShapeMap infer_shapes(const NnefProgram& program) {
  ShapeMap shapes;
  for (const auto& instr : program.instructions)
    shapes[instr.result] = detail::infer_one(instr, shapes);
  return shapes;
}

inline ShapeMap infer_shapes(const ItemProgram& item) { return infer_shapes(item.graph); }

}  // namespace nnefx
