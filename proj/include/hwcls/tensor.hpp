// Copyright 2026  The hwcls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HWCLS_TENSOR_HPP
#define HWCLS_TENSOR_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwcls/common.hpp"

namespace hwcls {

using Shape = std::vector<Eigen::Index>;

inline Eigen::Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Eigen::Index{1},
                         std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::ostringstream ss;
  ss << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) ss << (i ? "," : "") << shape[i];
  ss << ")";
  return ss.str();
}

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense n-dimensional array with row-major storage.
template <typename Scalar>
class Tensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(Vector::Zero(shape_size(shape_))) {}
  Tensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_size(shape_))
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(shape_));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  Eigen::Index dim(std::size_t i) const { return shape_.at(i); }
  Eigen::Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Vector& values() { return data_; }
  const Vector& values() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  Scalar& operator[](Eigen::Index i) { return data_[i]; }
  Scalar operator[](Eigen::Index i) const { return data_[i]; }

  /// Views the buffer as a rows x cols row-major matrix.
  MatrixMap matrix(Eigen::Index rows, Eigen::Index cols) {
    check_view(rows, cols);
    return MatrixMap(data_.data(), rows, cols);
  }
  ConstMatrixMap matrix(Eigen::Index rows, Eigen::Index cols) const {
    check_view(rows, cols);
    return ConstMatrixMap(data_.data(), rows, cols);
  }
  /// First axis as rows, everything else flattened.
  MatrixMap rows_view() { return matrix(shape_.at(0), data_.size() / std::max<Eigen::Index>(1, shape_.at(0))); }
  ConstMatrixMap rows_view() const {
    return matrix(shape_.at(0), data_.size() / std::max<Eigen::Index>(1, shape_.at(0)));
  }

  void reshape(Shape shape) {
    if (shape_size(shape) != data_.size())
      throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    shape_ = std::move(shape);
  }

  /// Copy of entry i along the first axis.
  Tensor slice(Eigen::Index i) const {
    Shape sub(shape_.begin() + 1, shape_.end());
    const Eigen::Index n = shape_size(sub);
    return Tensor(sub, data_.segment(i * n, n));
  }

  void set_slice(Eigen::Index i, const Tensor& t) {
    const Eigen::Index n = data_.size() / shape_.at(0);
    if (t.size() != n) throw ShapeError("set_slice: size mismatch");
    data_.segment(i * n, n) = t.values();
  }

  bool all_finite() const { return data_.allFinite(); }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

 private:
  void check_view(Eigen::Index rows, Eigen::Index cols) const {
    if (rows * cols != data_.size())
      throw ShapeError("cannot view " + shape_string(shape_) + " as " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  }

  Shape shape_;
  Vector data_;
};

using Tensord = Tensor<double>;
using Tensorf = Tensor<float>;

/// Stacks equally-shaped tensors along a new leading axis.
template <typename Scalar>
Tensor<Scalar> stack(const std::vector<Tensor<Scalar>>& items) {
  if (items.empty()) throw ShapeError("stack: no tensors");
  Shape shape = items.front().shape();
  const Eigen::Index n = items.front().size();
  shape.insert(shape.begin(), static_cast<Eigen::Index>(items.size()));
  Tensor<Scalar> out(shape);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].shape() != items.front().shape())
      throw ShapeError("stack: shape " + shape_string(items[i].shape()) + " vs " +
                       shape_string(items.front().shape()));
    out.values().segment(static_cast<Eigen::Index>(i) * n, n) = items[i].values();
  }
  return out;
}

}  // namespace hwcls

#endif  // HWCLS_TENSOR_HPP
