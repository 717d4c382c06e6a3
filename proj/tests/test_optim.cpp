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

#include <doctest.h>

#include <cmath>

#include "hwcls/optim.hpp"

using namespace hwcls;

namespace {

Parameters<double> scalar(double v) {
  Parameters<double> p;
  p.emplace("w", Tensord({1}, Eigen::VectorXd::Constant(1, v)));
  return p;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("zero gradient leaves parameters unchanged") {
  auto p = scalar(1.5);
  AdamState<double> s;
  for (int i = 0; i < 3; ++i) adam_step(p, scalar(0.0), s, AdamConfig{});
  CHECK(p.at("w")[0] == 1.5);
  CHECK(s.t == 3);
}

TEST_CASE("first step by hand") {
  auto p = scalar(1.0);
  AdamState<double> s;
  AdamConfig cfg;
  adam_step(p, scalar(0.5), s, cfg);
  // m = 0.05, v = 0.00025; m_hat = 0.5, v_hat = 0.25.
  const double expected = 1.0 - cfg.lr * 0.5 / (0.5 + cfg.eps);
  CHECK(p.at("w")[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.m.at("w")[0] == doctest::Approx(0.05));
  CHECK(s.v.at("w")[0] == doctest::Approx(0.00025));
}

TEST_CASE("second step by hand") {
  auto p = scalar(0.0);
  AdamState<double> s;
  AdamConfig cfg;
  cfg.lr = 0.1;
  adam_step(p, scalar(1.0), s, cfg);
  adam_step(p, scalar(-2.0), s, cfg);
  const double m1 = 0.1, v1 = 0.001;
  const double m2 = 0.9 * m1 + 0.1 * -2.0, v2 = 0.999 * v1 + 0.001 * 4.0;
  const double step1 = 0.1 * (m1 / 0.1) / (std::sqrt(v1 / 0.001) + 1e-8);
  const double step2 = 0.1 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  CHECK(p.at("w")[0] == doctest::Approx(-step1 - step2).epsilon(1e-12));
}

TEST_CASE("state is keyed by parameter name") {
  Parameters<double> p = scalar(0.0), g = scalar(1.0);
  p.emplace("u", Tensord({2}, Eigen::VectorXd::Zero(2)));
  AdamState<double> s;
  adam_step(p, g, s, AdamConfig{});  // no gradient for "u"
  CHECK(p.at("u").values().isZero());
  CHECK(s.m.count("u") == 0);
  CHECK(p.at("w")[0] < 0.0);
  Parameters<double> bad = g;
  bad.at("w") = Tensord({2});
  CHECK_THROWS_AS(adam_step(p, bad, s, AdamConfig{}), ShapeError);
}

}  // TEST_SUITE
