#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emigrade {

using Shape = std::vector<int>;

inline std::int64_t shape_size(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must not be empty");
  std::int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

inline std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense n-dimensional array of scalars in row-major order (the innermost
// dimension varies fastest). Storage is a flat Eigen array so elementwise
// work stays vectorised; matrix views are created at the point of use.
template <class S>
class Tensor {
 public:
  using Storage = Eigen::Array<S, Eigen::Dynamic, 1>;

  Tensor() = default;

  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(Storage::Zero(shape_size(shape_))) {}

  Tensor(Shape shape, std::initializer_list<S> values) : shape_(std::move(shape)) {
    if (static_cast<std::int64_t>(values.size()) != shape_size(shape_))
      throw std::invalid_argument("tensor literal does not match shape " +
                                  shape_to_string(shape_));
    data_.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (S v : values) data_[i++] = v;
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor constant(Shape shape, S value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  std::int64_t size() const { return data_.size(); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }
  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  S& operator[](std::int64_t i) { return data_[static_cast<Eigen::Index>(i)]; }
  S operator[](std::int64_t i) const { return data_[static_cast<Eigen::Index>(i)]; }

  // Row-major accessors for the common ranks.
  S& at(int i, int j) { return data_[offset2(i, j)]; }
  S at(int i, int j) const { return data_[offset2(i, j)]; }
  S& at(int c, int r, int col) { return data_[offset3(c, r, col)]; }
  S at(int c, int r, int col) const { return data_[offset3(c, r, col)]; }

  // Same data, new shape; sizes must agree.
  Tensor reshaped(Shape shape) const {
    if (shape_size(shape) != size())
      throw std::invalid_argument("reshape " + shape_to_string(shape_) + " -> " +
                                  shape_to_string(shape) + " changes element count");
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
  }

  bool all_finite() const { return data_.isFinite().all(); }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  template <class T>
  Tensor<T> cast() const {
    Tensor<T> t;
    t = Tensor<T>(shape_);
    t.array() = data_.template cast<T>();
    return t;
  }

 private:
  Eigen::Index offset2(int i, int j) const {
    return static_cast<Eigen::Index>(i) * shape_[1] + j;
  }
  Eigen::Index offset3(int c, int r, int col) const {
    return (static_cast<Eigen::Index>(c) * shape_[1] + r) * shape_[2] + col;
  }

  Shape shape_;
  Storage data_;
};

template <class S>
bool exact_equal(const Tensor<S>& a, const Tensor<S>& b) {
  return a.shape() == b.shape() && (a.array() == b.array()).all();
}

}  // namespace emigrade
