#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mixext {

/// Dense row-major tensor, last axis fastest. A rank-0 tensor holds one value.
template <class Scalar>
class Tensor {
 public:
  Tensor() : data_(1, Scalar(0)) {}

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(volume(shape_), Scalar(0)) {}

  Tensor(std::vector<std::size_t> shape, std::vector<Scalar> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != volume(shape_)) {
      throw std::invalid_argument("tensor data does not match shape");
    }
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  const std::vector<Scalar>& data() const { return data_; }
  std::vector<Scalar>& data() { return data_; }

  Scalar& operator[](std::size_t flat) { return data_[flat]; }
  const Scalar& operator[](std::size_t flat) const { return data_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> index) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a) flat = flat * shape_[a] + index[a];
    return flat;
  }

  Scalar& at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
  const Scalar& at(std::span<const std::size_t> index) const {
    return data_[flat_index(index)];
  }

  /// Stride of `axis` in the flat layout.
  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t a = axis + 1; a < shape_.size(); ++a) s *= shape_[a];
    return s;
  }

  static std::size_t volume(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<Scalar> data_;
};

/// Advances a multi-index in row-major order; returns false after the last one.
inline bool next_index(std::vector<std::size_t>& index,
                       const std::vector<std::size_t>& shape) {
  for (std::size_t a = shape.size(); a-- > 0;) {
    if (++index[a] < shape[a]) return true;
    index[a] = 0;
  }
  return false;
}

/// Contracts `axis` of `t` against vector `v`, dropping the axis.
template <class Scalar>
Tensor<Scalar> contract_axis(const Tensor<Scalar>& t, std::size_t axis,
                             std::span<const Scalar> v) {
  if (v.size() != t.extent(axis)) {
    throw std::invalid_argument("contraction length mismatch");
  }
  std::vector<std::size_t> shape = t.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor<Scalar> out(shape);
  const std::size_t inner = t.stride(axis);
  const std::size_t n = t.extent(axis);
  const std::size_t outer = t.size() / (inner * n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] == 0) continue;
      const std::size_t base = (o * n + j) * inner;
      for (std::size_t r = 0; r < inner; ++r) {
        out[o * inner + r] += t[base + r] * v[j];
      }
    }
  }
  return out;
}

/// Mode product: out[..., s, ...] = sum_j t[..., j, ...] * m[j][s].
/// `m` is given row-major with `rows == t.extent(axis)`.
template <class Scalar>
Tensor<Scalar> mode_product(const Tensor<Scalar>& t, std::size_t axis,
                            const std::vector<std::vector<Scalar>>& m) {
  const std::size_t n = t.extent(axis);
  if (m.size() != n) throw std::invalid_argument("mode product row mismatch");
  const std::size_t cols = n == 0 ? 0 : m.front().size();
  std::vector<std::size_t> shape = t.shape();
  shape[axis] = cols;
  Tensor<Scalar> out(shape);
  const std::size_t inner = t.stride(axis);
  const std::size_t outer = t.size() / (inner * n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t base = (o * n + j) * inner;
      for (std::size_t s = 0; s < cols; ++s) {
        if (m[j][s] == 0) continue;
        const std::size_t out_base = (o * cols + s) * inner;
        for (std::size_t r = 0; r < inner; ++r) {
          out[out_base + r] += t[base + r] * m[j][s];
        }
      }
    }
  }
  return out;
}

/// The sub-tensor with `axis` fixed at `index`.
template <class Scalar>
Tensor<Scalar> slice(const Tensor<Scalar>& t, std::size_t axis, std::size_t index) {
  std::vector<std::size_t> shape = t.shape();
  const std::size_t n = shape.at(axis);
  if (index >= n) throw std::out_of_range("slice index out of range");
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor<Scalar> out(shape);
  const std::size_t inner = t.stride(axis);
  const std::size_t outer = t.size() / (inner * n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < inner; ++r) {
      out[o * inner + r] = t[(o * n + index) * inner + r];
    }
  }
  return out;
}

}  // namespace mixext
