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

#ifndef HWCLS_OPTIM_HPP
#define HWCLS_OPTIM_HPP

#include <cmath>
#include <cstdint>

#include "hwcls/network.hpp"

namespace hwcls {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moments keyed by parameter name.
template <typename Scalar>
struct AdamState {
  std::int64_t t = 0;
  Parameters<Scalar> m, v;
};

/// Bias-corrected Adam; t advances once per call. Moments for a name are
/// created as zeros the first time it is seen.
template <typename Scalar>
void adam_step(Parameters<Scalar>& params, const Parameters<Scalar>& grads,
               AdamState<Scalar>& state, const AdamConfig& cfg) {
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const auto b1 = static_cast<Scalar>(cfg.beta1), b2 = static_cast<Scalar>(cfg.beta2);
  for (auto& [name, p] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;
    const auto& g = git->second.values();
    if (g.size() != p.size()) throw ShapeError("adam_step: gradient shape mismatch for '" + name + "'");
    auto& m = state.m.try_emplace(name, p.shape()).first->second.values();
    auto& v = state.v.try_emplace(name, p.shape()).first->second.values();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / static_cast<Scalar>(c1);
    const auto v_hat = v.array() / static_cast<Scalar>(c2);
    p.values().array() -= static_cast<Scalar>(cfg.lr) * m_hat / (v_hat.sqrt() + static_cast<Scalar>(cfg.eps));
  }
}

}  // namespace hwcls

#endif  // HWCLS_OPTIM_HPP
