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

#ifndef HWCLS_LAYERS_HPP
#define HWCLS_LAYERS_HPP

// Single-sample layer kernels. Activations are (channels, height*width)
// row-major matrices; every backward routine accumulates parameter
// gradients and returns the input gradient.

#include <cmath>

#include <Eigen/Core>

#include "hwcls/tensor.hpp"

namespace hwcls::layers {

template <typename Scalar>
using Matrix = RowMatrix<Scalar>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct ConvGeometry {
  Eigen::Index in_channels = 1;
  Eigen::Index in_height = 1;
  Eigen::Index in_width = 1;
  Eigen::Index out_channels = 1;
  Eigen::Index kernel = 3;
  Eigen::Index stride = 1;
  Eigen::Index pad = 1;

  Eigen::Index out_height() const { return (in_height + 2 * pad - kernel) / stride + 1; }
  Eigen::Index out_width() const { return (in_width + 2 * pad - kernel) / stride + 1; }
  Eigen::Index patch_size() const { return in_channels * kernel * kernel; }
};

/// Unfolds (C, H*W) into (C*k*k, Ho*Wo); zero padding.
template <typename Scalar>
void im2col(const Matrix<Scalar>& x, const ConvGeometry& g, Matrix<Scalar>& col) {
  const Eigen::Index ho = g.out_height(), wo = g.out_width();
  col.resize(g.patch_size(), ho * wo);
  for (Eigen::Index c = 0; c < g.in_channels; ++c)
    for (Eigen::Index ky = 0; ky < g.kernel; ++ky)
      for (Eigen::Index kx = 0; kx < g.kernel; ++kx) {
        const Eigen::Index row = (c * g.kernel + ky) * g.kernel + kx;
        Scalar* dst = col.row(row).data();
        for (Eigen::Index oy = 0; oy < ho; ++oy) {
          const Eigen::Index iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.in_height) {
            for (Eigen::Index ox = 0; ox < wo; ++ox) dst[oy * wo + ox] = Scalar(0);
            continue;
          }
          const Scalar* src = x.row(c).data() + iy * g.in_width;
          for (Eigen::Index ox = 0; ox < wo; ++ox) {
            const Eigen::Index ix = ox * g.stride - g.pad + kx;
            dst[oy * wo + ox] = (ix >= 0 && ix < g.in_width) ? src[ix] : Scalar(0);
          }
        }
      }
}

/// Adjoint of im2col: scatters (C*k*k, Ho*Wo) back into (C, H*W).
template <typename Scalar>
void col2im(const Matrix<Scalar>& col, const ConvGeometry& g, Matrix<Scalar>& dx) {
  const Eigen::Index ho = g.out_height(), wo = g.out_width();
  dx.setZero(g.in_channels, g.in_height * g.in_width);
  for (Eigen::Index c = 0; c < g.in_channels; ++c)
    for (Eigen::Index ky = 0; ky < g.kernel; ++ky)
      for (Eigen::Index kx = 0; kx < g.kernel; ++kx) {
        const Eigen::Index row = (c * g.kernel + ky) * g.kernel + kx;
        const Scalar* src = col.row(row).data();
        for (Eigen::Index oy = 0; oy < ho; ++oy) {
          const Eigen::Index iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.in_height) continue;
          Scalar* dst = dx.row(c).data() + iy * g.in_width;
          for (Eigen::Index ox = 0; ox < wo; ++ox) {
            const Eigen::Index ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.in_width) dst[ix] += src[oy * wo + ox];
          }
        }
      }
}

/// Bias-free convolution. weight is (out_channels, C*k*k).
template <typename Scalar>
struct Conv2d {
  ConvGeometry geom;

  struct Cache {
    Matrix<Scalar> col;
  };

  Matrix<Scalar> forward(const Matrix<Scalar>& x, const Eigen::Ref<const Matrix<Scalar>>& weight,
                         Cache& cache) const {
    im2col(x, geom, cache.col);
    return weight * cache.col;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& dy, const Eigen::Ref<const Matrix<Scalar>>& weight,
                          const Cache& cache, Eigen::Ref<Matrix<Scalar>> dweight) const {
    dweight.noalias() += dy * cache.col.transpose();
    Matrix<Scalar> dcol = weight.transpose() * dy;
    Matrix<Scalar> dx;
    col2im(dcol, geom, dx);
    return dx;
  }
};

/// Per-sample, per-channel normalization over spatial positions with a
/// learned affine map. Uses no statistics from other samples.
template <typename Scalar>
struct InstanceNorm {
  Scalar eps = Scalar(1e-5);

  struct Cache {
    Matrix<Scalar> xhat;
    Vector<Scalar> inv_std;
  };

  Matrix<Scalar> forward(const Matrix<Scalar>& x, const Eigen::Ref<const Vector<Scalar>>& gamma,
                         const Eigen::Ref<const Vector<Scalar>>& beta, Cache& cache) const {
    const auto n = static_cast<Scalar>(x.cols());
    const Vector<Scalar> mean = x.rowwise().sum() / n;
    cache.xhat = x.colwise() - mean;
    const Vector<Scalar> var = cache.xhat.array().square().rowwise().sum() / n;
    cache.inv_std = (var.array() + eps).rsqrt();
    cache.xhat = cache.inv_std.asDiagonal() * cache.xhat;
    Matrix<Scalar> y = gamma.asDiagonal() * cache.xhat;
    y.colwise() += beta;
    return y;
  }

  Matrix<Scalar> backward(const Matrix<Scalar>& dy, const Eigen::Ref<const Vector<Scalar>>& gamma,
                          const Cache& cache, Eigen::Ref<Vector<Scalar>> dgamma,
                          Eigen::Ref<Vector<Scalar>> dbeta) const {
    const auto n = static_cast<Scalar>(dy.cols());
    dbeta += dy.rowwise().sum();
    dgamma += (dy.array() * cache.xhat.array()).rowwise().sum().matrix();
    const Matrix<Scalar> dxhat = gamma.asDiagonal() * dy;
    const Vector<Scalar> mean_dxhat = dxhat.rowwise().sum() / n;
    const Vector<Scalar> mean_dxhat_xhat =
        (dxhat.array() * cache.xhat.array()).rowwise().sum().matrix() / n;
    Matrix<Scalar> dx = dxhat.colwise() - mean_dxhat;
    dx -= mean_dxhat_xhat.asDiagonal() * cache.xhat;
    return cache.inv_std.asDiagonal() * dx;
  }
};

template <typename Scalar>
Matrix<Scalar> relu(const Matrix<Scalar>& x) {
  return x.cwiseMax(Scalar(0));
}

/// Gradient through relu given the relu output.
template <typename Scalar>
Matrix<Scalar> relu_backward(const Matrix<Scalar>& dy, const Matrix<Scalar>& y) {
  return (y.array() > Scalar(0)).select(dy, Scalar(0));
}

template <typename Scalar>
Vector<Scalar> global_avg_pool(const Matrix<Scalar>& x) {
  return x.rowwise().mean();
}

template <typename Scalar>
Matrix<Scalar> global_avg_pool_backward(const Vector<Scalar>& dy, Eigen::Index positions) {
  Matrix<Scalar> dx(dy.size(), positions);
  dx.colwise() = dy / static_cast<Scalar>(positions);
  return dx;
}

/// y = W x + b, W is (out, in).
template <typename Scalar>
Vector<Scalar> linear(const Vector<Scalar>& x, const Eigen::Ref<const Matrix<Scalar>>& weight,
                      const Eigen::Ref<const Vector<Scalar>>& bias) {
  return weight * x + bias;
}

template <typename Scalar>
Vector<Scalar> linear_backward(const Vector<Scalar>& dy, const Vector<Scalar>& x,
                               const Eigen::Ref<const Matrix<Scalar>>& weight, Eigen::Ref<Matrix<Scalar>> dweight,
                               Eigen::Ref<Vector<Scalar>> dbias) {
  dweight.noalias() += dy * x.transpose();
  dbias += dy;
  return weight.transpose() * dy;
}

}  // namespace hwcls::layers

#endif  // HWCLS_LAYERS_HPP
