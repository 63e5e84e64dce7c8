#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nnefx/tensor.hpp"

namespace nnefx {

// Most negative finite float32; the 'ignore' border fill for max pooling.
inline constexpr float MIN_F = std::numeric_limits<float>::lowest();

struct PaddingSpec {
  int64_t p_t = 0, p_b = 0, p_l = 0, p_r = 0;
  float fill = 0.0f;
};

struct PoolSpec {
  int64_t k_h = 1, k_w = 1;
  int64_t s_h = 1, s_w = 1;
};

namespace detail {

inline void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error(kind, message);
}

inline int64_t window_out(int64_t n, int64_t k, int64_t s, int64_t pad_before, int64_t pad_after,
                          const char* what) {
  int64_t padded = n + pad_before + pad_after;
  require(k >= 1 && s >= 1, ErrorKind::ShapeMismatch,
          std::string(what) + ": window and stride must be >= 1");
  require(k <= padded, ErrorKind::WindowTooLarge,
          std::string(what) + ": window " + std::to_string(k) + " exceeds padded extent " +
              std::to_string(padded));
  return (padded - k) / s + 1;
}

}  // namespace detail

// Padding per the (h, w, c) definition: border cells take the fill value,
// interior cells are the shifted input.
inline Tensor pad(const Tensor& input, const PaddingSpec& spec) {
  detail::require(input.rank() == 3, ErrorKind::RankError,
                  "pad expects rank 3 (h, w, c), got " + shape_to_string(input.shape()));
  detail::require(spec.p_t >= 0 && spec.p_b >= 0 && spec.p_l >= 0 && spec.p_r >= 0,
                  ErrorKind::ShapeMismatch, "negative padding");
  int64_t h = input.dim(0), w = input.dim(1), c = input.dim(2);
  Tensor out(Shape{h + spec.p_t + spec.p_b, w + spec.p_l + spec.p_r, c});
  for (int64_t i = 0; i < out.dim(0); ++i) {
    for (int64_t j = 0; j < out.dim(1); ++j) {
      bool border = i < spec.p_t || i >= spec.p_t + h || j < spec.p_l || j >= spec.p_l + w;
      for (int64_t k = 0; k < c; ++k)
        out.at3(i, j, k) = border ? spec.fill : input.at3(i - spec.p_t, j - spec.p_l, k);
    }
  }
  return out;
}

// Window maximum per the (h, w, c) definition; no implicit padding.
inline Tensor pool_max(const Tensor& input, const PoolSpec& spec) {
  detail::require(input.rank() == 3, ErrorKind::RankError,
                  "pool expects rank 3 (h, w, c), got " + shape_to_string(input.shape()));
  int64_t h = input.dim(0), w = input.dim(1), c = input.dim(2);
  int64_t oh = detail::window_out(h, spec.k_h, spec.s_h, 0, 0, "pool");
  int64_t ow = detail::window_out(w, spec.k_w, spec.s_w, 0, 0, "pool");
  Tensor out(Shape{oh, ow, c});
  for (int64_t i = 0; i < oh; ++i) {
    for (int64_t j = 0; j < ow; ++j) {
      for (int64_t k = 0; k < c; ++k) {
        float best = input.at3(i * spec.s_h, j * spec.s_w, k);
        for (int64_t a = 0; a < spec.k_h; ++a)
          for (int64_t b = 0; b < spec.k_w; ++b)
            best = std::max(best, input.at3(i * spec.s_h + a, j * spec.s_w + b, k));
        out.at3(i, j, k) = best;
      }
    }
  }
  return out;
}

// Same padding semantics on the evaluator layout (c, h, w).
inline Tensor pad_chw(const Tensor& input, const PaddingSpec& spec) {
  detail::require(input.rank() == 3, ErrorKind::RankError,
                  "pad expects rank 3 (c, h, w), got " + shape_to_string(input.shape()));
  detail::require(spec.p_t >= 0 && spec.p_b >= 0 && spec.p_l >= 0 && spec.p_r >= 0,
                  ErrorKind::ShapeMismatch, "negative padding");
  int64_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  Tensor out(Shape{c, h + spec.p_t + spec.p_b, w + spec.p_l + spec.p_r});
  for (int64_t k = 0; k < c; ++k) {
    for (int64_t i = 0; i < out.dim(1); ++i) {
      bool row_border = i < spec.p_t || i >= spec.p_t + h;
      for (int64_t j = 0; j < out.dim(2); ++j) {
        bool border = row_border || j < spec.p_l || j >= spec.p_l + w;
        out.at3(k, i, j) = border ? spec.fill : input.at3(k, i - spec.p_t, j - spec.p_l);
      }
    }
  }
  return out;
}

// NNEF-level max_pool on (c, h, w) with 4-D parameter lists in
// (batch, channel, height, width) order; batch/channel entries must be
// identities. Implemented as one fused window scan that reads out-of-bounds
// cells as MIN_F, which is exactly pooling after a MIN_F pad.
inline Tensor max_pool(const Tensor& input, const std::vector<int64_t>& size,
                       const std::vector<int64_t>& stride, const std::vector<int64_t>& dilation,
                       const std::vector<std::pair<int64_t, int64_t>>& padding,
                       const std::string& border) {
  detail::require(input.rank() == 3, ErrorKind::RankError,
                  "max_pool expects rank 3 (c, h, w), got " + shape_to_string(input.shape()));
  detail::require(border == "ignore", ErrorKind::UnsupportedBorder,
                  "border '" + border + "' unsupported, only 'ignore'");
  detail::require(size.size() == 4 && stride.size() == 4 && dilation.size() == 4,
                  ErrorKind::ShapeMismatch, "max_pool size/stride/dilation must be 4-D lists");
  detail::require(padding.size() == 4, ErrorKind::ShapeMismatch,
                  "max_pool padding must list 4 (before, after) tuples");
  detail::require(size[0] == 1 && size[1] == 1 && stride[0] == 1 && stride[1] == 1,
                  ErrorKind::ShapeMismatch, "max_pool batch/channel window entries must be 1");
  detail::require(padding[0] == std::pair<int64_t, int64_t>(0, 0) &&
                      padding[1] == std::pair<int64_t, int64_t>(0, 0),
                  ErrorKind::ShapeMismatch, "max_pool batch/channel padding must be (0, 0)");
  for (int64_t d : dilation)
    detail::require(d == 1, ErrorKind::UnsupportedDilation, "max_pool dilation must be 1");
  for (const auto& [before, after] : padding)
    detail::require(before >= 0 && after >= 0, ErrorKind::ShapeMismatch, "negative padding");

  int64_t c = input.dim(0), h = input.dim(1), w = input.dim(2);
  int64_t kh = size[2], kw = size[3], sh = stride[2], sw = stride[3];
  auto [pt, pb] = padding[2];
  auto [pl, pr] = padding[3];
  int64_t oh = detail::window_out(h, kh, sh, pt, pb, "max_pool");
  int64_t ow = detail::window_out(w, kw, sw, pl, pr, "max_pool");
  Tensor out(Shape{c, oh, ow});
  for (int64_t k = 0; k < c; ++k) {
    for (int64_t i = 0; i < oh; ++i) {
      for (int64_t j = 0; j < ow; ++j) {
        float best = MIN_F;
        for (int64_t a = 0; a < kh; ++a) {
          int64_t y = i * sh - pt + a;
          if (y < 0 || y >= h) continue;
          for (int64_t b = 0; b < kw; ++b) {
            int64_t x = j * sw - pl + b;
            if (x < 0 || x >= w) continue;
            best = std::max(best, input.at3(k, y, x));
          }
        }
        out.at3(k, i, j) = best;
      }
    }
  }
  return out;
}

// Cross-correlation plus bias on (c, h, w); zero padding; fixed accumulation
// order (output channel, spatial position, then input-channel-major inner
// product) for bit-reproducibility.
inline Tensor conv(const Tensor& input, const Tensor& filter, const Tensor& bias,
                   const std::vector<int64_t>& stride, const std::vector<int64_t>& dilation,
                   const std::vector<std::pair<int64_t, int64_t>>& padding, int64_t groups) {
  detail::require(groups == 1, ErrorKind::UnsupportedGroups, "conv groups must be 1");
  detail::require(input.rank() == 3, ErrorKind::RankError,
                  "conv input must be rank 3 (c, h, w), got " + shape_to_string(input.shape()));
  detail::require(filter.rank() == 4, ErrorKind::RankError,
                  "conv filter must be rank 4 (out_c, in_c, k_h, k_w), got " +
                      shape_to_string(filter.shape()));
  detail::require(bias.rank() == 1, ErrorKind::RankError, "conv bias must be rank 1");
  detail::require(stride.size() == 2 && dilation.size() == 2, ErrorKind::ShapeMismatch,
                  "conv stride/dilation must be 2-D spatial lists");
  detail::require(padding.size() == 2, ErrorKind::ShapeMismatch,
                  "conv padding must list 2 (before, after) spatial tuples");
  for (int64_t d : dilation)
    detail::require(d == 1, ErrorKind::UnsupportedDilation, "conv dilation must be 1");
  detail::require(filter.dim(1) == input.dim(0), ErrorKind::ChannelMismatch,
                  "filter expects " + std::to_string(filter.dim(1)) + " input channels, input has " +
                      std::to_string(input.dim(0)));
  detail::require(bias.dim(0) == filter.dim(0), ErrorKind::ChannelMismatch,
                  "bias length " + std::to_string(bias.dim(0)) + " != output channels " +
                      std::to_string(filter.dim(0)));
  for (const auto& [before, after] : padding)
    detail::require(before >= 0 && after >= 0, ErrorKind::ShapeMismatch, "negative padding");

  int64_t ic = input.dim(0), h = input.dim(1), w = input.dim(2);
  int64_t oc = filter.dim(0), kh = filter.dim(2), kw = filter.dim(3);
  auto [pt, pb] = padding[0];
  auto [pl, pr] = padding[1];
  int64_t oh = detail::window_out(h, kh, stride[0], pt, pb, "conv");
  int64_t ow = detail::window_out(w, kw, stride[1], pl, pr, "conv");
  Tensor out(Shape{oc, oh, ow});
  for (int64_t o = 0; o < oc; ++o) {
    for (int64_t i = 0; i < oh; ++i) {
      for (int64_t j = 0; j < ow; ++j) {
        float acc = 0.0f;
        for (int64_t q = 0; q < ic; ++q) {
          for (int64_t a = 0; a < kh; ++a) {
            int64_t y = i * stride[0] - pt + a;
            if (y < 0 || y >= h) continue;
            for (int64_t b = 0; b < kw; ++b) {
              int64_t x = j * stride[1] - pl + b;
              if (x < 0 || x >= w) continue;
              acc += input.at3(q, y, x) * filter.at4(o, q, a, b);
            }
          }
        }
        out.at3(o, i, j) = acc + bias.at(o);
      }
    }
  }
  return out;
}

inline Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (auto& x : out.values()) x = std::max(x, 0.0f);
  return out;
}

namespace detail {

struct AxisView {
  int64_t outer, n, inner;
};

inline AxisView axis_view(const Tensor& t, int64_t axis, const char* what) {
  require(axis >= 0 && axis < t.rank(), ErrorKind::AxisOutOfRange,
          std::string(what) + ": axis " + std::to_string(axis) + " out of range for rank " +
              std::to_string(t.rank()));
  AxisView v{1, t.dim(axis), 1};
  for (int64_t i = 0; i < axis; ++i) v.outer *= t.dim(i);
  for (int64_t i = axis + 1; i < t.rank(); ++i) v.inner *= t.dim(i);
  return v;
}

}  // namespace detail

// Exp-normalization along one axis with max-subtraction stabilization.
inline Tensor softmax(const Tensor& input, int64_t axis) {
  auto view = detail::axis_view(input, axis, "softmax");
  Tensor out(input.shape());
  for (int64_t o = 0; o < view.outer; ++o) {
    for (int64_t in = 0; in < view.inner; ++in) {
      auto cell = [&](int64_t i) { return (o * view.n + i) * view.inner + in; };
      float top = input.at(cell(0));
      for (int64_t i = 1; i < view.n; ++i) top = std::max(top, input.at(cell(i)));
      float total = 0.0f;
      for (int64_t i = 0; i < view.n; ++i) {
        float e = std::exp(input.at(cell(i)) - top);
        out.at(cell(i)) = e;
        total += e;
      }
      for (int64_t i = 0; i < view.n; ++i) out.at(cell(i)) /= total;
    }
  }
  return out;
}

inline Tensor reshape(const Tensor& input, const Shape& shape) {
  for (int64_t d : shape)
    detail::require(d > 0, ErrorKind::ShapeMismatch, "reshape to non-positive dimension");
  detail::require(numel(shape) == input.size(), ErrorKind::ElementCountMismatch,
                  "reshape " + shape_to_string(input.shape()) + " -> " + shape_to_string(shape) +
                      " changes element count");
  return Tensor(shape, input.values());
}

// weight (n_out, n_in) times input (n_in) plus bias, ascending-index
// accumulation.
inline Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  detail::require(input.rank() == 1, ErrorKind::RankError,
                  "linear input must be rank 1, got " + shape_to_string(input.shape()));
  detail::require(weight.rank() == 2, ErrorKind::RankError,
                  "linear weight must be rank 2 (n_out, n_in)");
  detail::require(bias.rank() == 1, ErrorKind::RankError, "linear bias must be rank 1");
  detail::require(weight.dim(1) == input.dim(0), ErrorKind::ShapeMismatch,
                  "weight expects input length " + std::to_string(weight.dim(1)) + ", got " +
                      std::to_string(input.dim(0)));
  detail::require(bias.dim(0) == weight.dim(0), ErrorKind::ShapeMismatch,
                  "bias length " + std::to_string(bias.dim(0)) + " != rows " +
                      std::to_string(weight.dim(0)));
  int64_t n_out = weight.dim(0), n_in = weight.dim(1);
  Tensor out(Shape{n_out});
  for (int64_t i = 0; i < n_out; ++i) {
    float acc = 0.0f;
    for (int64_t j = 0; j < n_in; ++j) acc += weight.at(i * n_in + j) * input.at(j);
    out.at(i) = acc + bias.at(i);
  }
  return out;
}

inline Tensor concat(const std::vector<Tensor>& inputs, int64_t axis) {
  detail::require(!inputs.empty(), ErrorKind::ShapeMismatch, "concat of nothing");
  auto view0 = detail::axis_view(inputs[0], axis, "concat");
  int64_t total = 0;
  for (const auto& t : inputs) {
    detail::require(t.rank() == inputs[0].rank(), ErrorKind::ShapeMismatch,
                    "concat inputs must share rank");
    for (int64_t d = 0; d < t.rank(); ++d)
      detail::require(d == axis || t.dim(d) == inputs[0].dim(d), ErrorKind::ShapeMismatch,
                      "concat inputs differ on non-concat axis " + std::to_string(d));
    total += t.dim(axis);
  }
  Shape out_shape = inputs[0].shape();
  out_shape[static_cast<size_t>(axis)] = total;
  Tensor out(out_shape);
  for (int64_t o = 0; o < view0.outer; ++o) {
    int64_t offset = 0;
    for (const auto& t : inputs) {
      int64_t n = t.dim(axis);
      int64_t chunk = n * view0.inner;
      const float* src = t.data() + o * chunk;
      float* dst = out.data() + (o * total + offset) * view0.inner;
      std::copy(src, src + chunk, dst);
      offset += n;
    }
  }
  return out;
}

// Half-open (lo, hi) ranges along the axis; ranges may overlap.
inline std::vector<Tensor> split(const Tensor& input, int64_t axis,
                                 const std::vector<std::pair<int64_t, int64_t>>& ranges) {
  auto view = detail::axis_view(input, axis, "split");
  std::vector<Tensor> parts;
  for (const auto& [lo, hi] : ranges) {
    detail::require(0 <= lo && lo < hi && hi <= view.n, ErrorKind::ShapeMismatch,
                    "split range (" + std::to_string(lo) + ", " + std::to_string(hi) +
                        ") out of bounds for axis extent " + std::to_string(view.n));
    Shape shape = input.shape();
    shape[static_cast<size_t>(axis)] = hi - lo;
    Tensor part(shape);
    for (int64_t o = 0; o < view.outer; ++o) {
      const float* src = input.data() + (o * view.n + lo) * view.inner;
      float* dst = part.data() + o * (hi - lo) * view.inner;
      std::copy(src, src + (hi - lo) * view.inner, dst);
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

}  // namespace nnefx
