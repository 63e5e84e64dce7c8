#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "nnefx/ast.hpp"
#include "nnefx/errors.hpp"
#include "nnefx/ops.hpp"
#include "nnefx/serialize.hpp"
#include "nnefx/tensor.hpp"

namespace nnefx {

// Canonical max_pool argument encoding a framework's pooling convention.
struct PoolEncoding {
  std::string framework;
  std::string mode;
  IntList size;
  IntList stride;
  IntList dilation;
  TupleList padding;
  std::string border = "ignore";

  bool operator==(const PoolEncoding&) const = default;
};

// Keras pads on the high side only. 'same' adds k-1 rows/columns, which
// yields ceil(n/s) outputs for every input extent.
inline PoolEncoding keras_max_pool(int64_t k_h, int64_t k_w, int64_t s_h, int64_t s_w,
                                   const std::string& mode) {
  if (mode != "same" && mode != "valid")
    throw Error(ErrorKind::ValidationError, "keras pooling mode must be 'same' or 'valid'");
  PoolEncoding e;
  e.framework = "keras";
  e.mode = mode;
  e.size = {1, 1, k_h, k_w};
  e.stride = {1, 1, s_h, s_w};
  e.dilation = {1, 1, 1, 1};
  if (mode == "same")
    e.padding = {{0, 0}, {0, 0}, {0, k_h - 1}, {0, k_w - 1}};
  else
    e.padding = {{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  return e;
}

// PyTorch pads symmetrically by an explicit amount.
inline PoolEncoding pytorch_max_pool(int64_t k_h, int64_t k_w, int64_t s_h, int64_t s_w, int64_t pad) {
  if (pad < 0) throw Error(ErrorKind::ValidationError, "padding must be non-negative");
  PoolEncoding e;
  e.framework = "pytorch";
  e.mode = "padding=" + std::to_string(pad);
  e.size = {1, 1, k_h, k_w};
  e.stride = {1, 1, s_h, s_w};
  e.dilation = {1, 1, 1, 1};
  e.padding = {{0, 0}, {0, 0}, {pad, pad}, {pad, pad}};
  return e;
}

inline Instruction pool_instruction(const PoolEncoding& e, const std::string& input = "input",
                                    const std::string& result = "pool") {
  Instruction instr;
  instr.result = result;
  instr.op = Op::MaxPool;
  instr.args = {Ident{input}, e.size, e.stride, e.dilation, e.padding, e.border};
  return instr;
}

inline std::string pool_nnef_fragment(const PoolEncoding& e) {
  std::string s = detail::render_instruction(pool_instruction(e));
  size_t first = s.find_first_not_of(" \n");
  size_t last = s.find_last_not_of(" \n");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

// Output shape by running the pooling kernel on a zero tensor.
inline Shape pool_output_shape(const PoolEncoding& e, int64_t n_h, int64_t n_w) {
  Tensor probe({1, n_h, n_w});
  return max_pool(probe, e.size, e.stride, e.dilation, e.padding, e.border).shape();
}

struct ConventionReport {
  PoolEncoding a;
  PoolEncoding b;
  bool arguments_equal = false;
  std::optional<Shape> shape_a;
  std::optional<Shape> shape_b;
  bool diverges = false;
};

inline ConventionReport compare_conventions(PoolEncoding a, PoolEncoding b,
                                            std::optional<std::pair<int64_t, int64_t>> input_hw) {
  ConventionReport r;
  r.a = std::move(a);
  r.b = std::move(b);
  r.arguments_equal = r.a.size == r.b.size && r.a.stride == r.b.stride &&
                      r.a.dilation == r.b.dilation && r.a.padding == r.b.padding &&
                      r.a.border == r.b.border;
  if (input_hw) {
    r.shape_a = pool_output_shape(r.a, input_hw->first, input_hw->second);
    r.shape_b = pool_output_shape(r.b, input_hw->first, input_hw->second);
  }
  r.diverges = !r.arguments_equal || r.shape_a != r.shape_b;
  return r;
}

}  // namespace nnefx
