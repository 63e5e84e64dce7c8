#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nnefx/errors.hpp"

namespace nnefx {

using Shape = std::vector<int64_t>;

inline int64_t numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

inline std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense row-major float32 tensor. Rank 0 is a scalar with one element.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    for (int64_t d : shape_) {
      if (d <= 0) throw Error(ErrorKind::ShapeMismatch, "non-positive dimension in " + shape_to_string(shape_));
    }
    data_.assign(static_cast<size_t>(numel(shape_)), 0.0f);
  }

  Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<int64_t>(data_.size()) != numel(shape_))
      throw Error(ErrorKind::ElementCountMismatch,
                  shape_to_string(shape_) + " needs " + std::to_string(numel(shape_)) +
                      " elements, got " + std::to_string(data_.size()));
  }

  const Shape& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  int64_t dim(int64_t axis) const { return shape_[static_cast<size_t>(axis)]; }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::vector<float>& values() { return data_; }
  const std::vector<float>& values() const { return data_; }

  float& at(int64_t i) { return data_[static_cast<size_t>(i)]; }
  float at(int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // Row-major offset helpers for the ranks the ops use.
  float& at3(int64_t a, int64_t b, int64_t c) {
    return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }
  float at3(int64_t a, int64_t b, int64_t c) const {
    return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
  }
  float& at4(int64_t a, int64_t b, int64_t c, int64_t d) {
    return data_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
  }
  float at4(int64_t a, int64_t b, int64_t c, int64_t d) const {
    return data_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
  }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

// Bitwise equality; distinguishes 0.0 from -0.0 and never equates NaNs.
inline bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  const float* pa = a.data();
  const float* pb = b.data();
  for (int64_t i = 0; i < a.size(); ++i) {
    uint32_t ua, ub;
    static_assert(sizeof(uint32_t) == sizeof(float));
    __builtin_memcpy(&ua, pa + i, sizeof ua);
    __builtin_memcpy(&ub, pb + i, sizeof ub);
    if (ua != ub) return false;
  }
  return true;
}

inline double max_relative_error(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw Error(ErrorKind::ShapeMismatch, shape_to_string(a.shape()) + " vs " + shape_to_string(b.shape()));
  double worst = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    double x = a.at(i), y = b.at(i);
    double denom = std::max(std::abs(x), std::abs(y));
    double err = denom == 0.0 ? std::abs(x - y) : std::abs(x - y) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace nnefx
