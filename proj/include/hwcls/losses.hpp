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

#ifndef HWCLS_LOSSES_HPP
#define HWCLS_LOSSES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwcls/common.hpp"
#include "hwcls/tensor.hpp"

namespace hwcls {

/// Row-wise softmax with max subtraction.
template <typename Scalar>
RowMatrix<Scalar> softmax(const RowMatrix<Scalar>& logits) {
  RowMatrix<Scalar> p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

template <typename Scalar>
struct LossAndGrad {
  Scalar loss = 0;
  RowMatrix<Scalar> grad;
};

/// Mean negative log-likelihood over the batch; grad = (softmax - onehot) / B.
template <typename Scalar>
LossAndGrad<Scalar> softmax_cross_entropy(const RowMatrix<Scalar>& logits,
                                          const std::vector<int>& labels) {
  const Eigen::Index b = logits.rows(), c = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != b)
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(b) + " rows");
  if (b == 0) throw PreconditionError("softmax_cross_entropy: empty batch");
  LossAndGrad<Scalar> out;
  const RowMatrix<Scalar> shifted = logits.colwise() - logits.rowwise().maxCoeff();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lse = shifted.array().exp().rowwise().sum().log();
  out.grad = softmax(logits);
  for (Eigen::Index i = 0; i < b; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= c)
      throw IndexError("label " + std::to_string(y) + " outside [0," + std::to_string(c) + ")");
    out.loss += lse(i) - shifted(i, y);
    out.grad(i, y) -= Scalar(1);
  }
  out.loss /= static_cast<Scalar>(b);
  out.grad /= static_cast<Scalar>(b);
  return out;
}

template <typename Scalar>
struct TripletLossResult {
  Scalar loss = 0;
  RowMatrix<Scalar> grad_anchor, grad_positive, grad_negative;
  int active = 0;  // triplets with positive hinge
};

/// mean_i max(0, |a_i - p_i|^2 - |a_i - n_i|^2 + margin).
template <typename Scalar>
TripletLossResult<Scalar> triplet_loss(const RowMatrix<Scalar>& a, const RowMatrix<Scalar>& p,
                                       const RowMatrix<Scalar>& n, Scalar margin) {
  if (a.rows() != p.rows() || a.rows() != n.rows() || a.cols() != p.cols() || a.cols() != n.cols())
    throw ShapeError("triplet_loss: anchor/positive/negative shapes differ");
  if (!(margin > 0)) throw PreconditionError("triplet_loss: margin must be positive");
  const Eigen::Index b = a.rows();
  if (b == 0) throw PreconditionError("triplet_loss: empty batch");
  TripletLossResult<Scalar> out;
  out.grad_anchor = RowMatrix<Scalar>::Zero(b, a.cols());
  out.grad_positive = RowMatrix<Scalar>::Zero(b, a.cols());
  out.grad_negative = RowMatrix<Scalar>::Zero(b, a.cols());
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto dp = (a.row(i) - p.row(i)).eval();
    const auto dn = (a.row(i) - n.row(i)).eval();
    const Scalar hinge = dp.squaredNorm() - dn.squaredNorm() + margin;
    if (hinge <= 0) continue;
    ++out.active;
    out.loss += hinge;
    out.grad_anchor.row(i) = Scalar(2) * inv_b * (n.row(i) - p.row(i));
    out.grad_positive.row(i) = Scalar(-2) * inv_b * dp;
    out.grad_negative.row(i) = Scalar(2) * inv_b * dn;
  }
  out.loss *= inv_b;
  return out;
}

struct Triplet {
  int anchor = 0, positive = 0, negative = 0;
  bool operator==(const Triplet&) const = default;
};

enum class MiningStrategy { kRandom, kBatchHard };

std::string_view mining_name(MiningStrategy s);
MiningStrategy mining_from_name(std::string_view name);

/// One triplet per anchor that has both a positive and a negative, in anchor
/// order. kRandom draws the positive and negative uniformly; kBatchHard takes
/// the farthest positive and nearest negative under Euclidean distance,
/// lowest index on ties, and needs embeddings.
std::vector<Triplet> mine_triplets(const std::vector<int>& labels, MiningStrategy strategy,
                                   const RowMatrix<double>* embeddings, std::uint64_t seed);

}  // namespace hwcls

#endif  // HWCLS_LOSSES_HPP
