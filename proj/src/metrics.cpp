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

#include "hwcls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>

namespace hwcls {

ConfusionMatrix confusion(const std::vector<LabelClass>& truth, const std::vector<LabelClass>& predicted,
                          const std::vector<LabelClass>& order) {
  if (truth.size() != predicted.size())
    throw PreconditionError("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                            std::to_string(predicted.size()) + " predictions");
  std::map<LabelClass, Eigen::Index> index;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!index.emplace(order[i], static_cast<Eigen::Index>(i)).second)
      throw PreconditionError("confusion: class '" + std::string(label_name(order[i])) + "' listed twice");
  }
  auto at = [&](LabelClass c) {
    auto it = index.find(c);
    if (it == index.end())
      throw PreconditionError("confusion: label '" + std::string(label_name(c)) + "' is not in the class order");
    return it->second;
  };
  ConfusionMatrix cm;
  cm.classes = order;
  const auto k = static_cast<Eigen::Index>(order.size());
  cm.counts = CountMatrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts(at(truth[i]), at(predicted[i]));
  return cm;
}

std::string_view averaging_name(Averaging a) { return a == Averaging::kWeighted ? "weighted" : "macro"; }

Averaging averaging_from_name(std::string_view name) {
  if (name == "weighted") return Averaging::kWeighted;
  if (name == "macro") return Averaging::kMacro;
  throw ConfigError("unknown averaging '" + std::string(name) + "'");
}

MetricsReport metrics(const ConfusionMatrix& cm, Averaging averaging) {
  const double total = static_cast<double>(cm.total());
  if (!(total > 0)) throw PreconditionError("metrics: empty confusion matrix");
  MetricsReport r;
  r.averaging = averaging;
  r.accuracy = static_cast<double>(cm.counts.trace()) / total;
  double weight_sum = 0.0;
  for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
    ClassMetrics m;
    m.label = cm.classes[static_cast<std::size_t>(i)];
    m.support = cm.counts.row(i).sum();
    m.predicted = cm.counts.col(i).sum();
    const auto tp = static_cast<double>(cm.counts(i, i));
    m.precision = m.predicted > 0 ? tp / static_cast<double>(m.predicted) : 0.0;
    m.recall = m.support > 0 ? tp / static_cast<double>(m.support) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    double w;
    if (averaging == Averaging::kWeighted)
      w = static_cast<double>(m.support) / total;
    else
      w = (m.support > 0 || m.predicted > 0) ? 1.0 : 0.0;
    r.precision += w * m.precision;
    r.recall += w * m.recall;
    r.f1 += w * m.f1;
    weight_sum += w;
    r.per_class.push_back(m);
  }
  if (averaging == Averaging::kMacro) {
    r.precision /= weight_sum;
    r.recall /= weight_sum;
    r.f1 /= weight_sum;
  }
  return r;
}

nlohmann::json metrics_to_json(const MetricsReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& m : r.per_class)
    per.push_back({{"class", label_name(m.label)},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"support", m.support},
                   {"predicted", m.predicted}});
  return {{"accuracy", r.accuracy},   {"precision", r.precision},
          {"recall", r.recall},       {"f1", r.f1},
          {"averaging", averaging_name(r.averaging)}, {"per_class", per}};
}

PcaResult pca_project(const Embeddings& x, int out_dim) {
  if (x.rows() < 2) throw PreconditionError("pca: need at least 2 points");
  if (out_dim < 1) throw PreconditionError("pca: out_dim must be positive");
  PcaResult res;
  res.mean = x.colwise().mean();
  const Embeddings centred = x.rowwise() - res.mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);  // ascending
  const double total = values.sum();
  res.components = Embeddings::Zero(out_dim, x.cols());
  res.explained_ratio.assign(static_cast<std::size_t>(out_dim), 0.0);
  if (!(total > 0)) {
    res.projection = Embeddings::Zero(x.rows(), out_dim);
    return res;
  }
  const Eigen::Index d = x.cols();
  for (int k = 0; k < out_dim && k < d; ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < d; ++j)
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    if (v(arg) < 0) v = -v;
    res.components.row(k) = v.transpose();
    res.explained_ratio[static_cast<std::size_t>(k)] = values(d - 1 - k) / total;
  }
  res.projection = centred * res.components.transpose();
  return res;
}

std::vector<double> silhouette_samples(const Embeddings& x, const std::vector<LabelClass>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw ShapeError("silhouette: label count does not match points");
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::map<LabelClass, std::pair<double, int>> sums;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto& s = sums[labels[j]];
      s.first += (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm();
      ++s.second;
    }
    auto own = sums.find(labels[i]);
    if (own == sums.end()) continue;
    const double a = own->second.first / own->second.second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [c, s] : sums)
      if (c != labels[i]) b = std::min(b, s.first / s.second);
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    out[i] = m > 0 ? (b - a) / m : 0.0;
  }
  return out;
}

double class_silhouette(const Embeddings& x, const std::vector<LabelClass>& labels, LabelClass cls) {
  const auto s = silhouette_samples(x, labels);
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (labels[i] == cls) sum += s[i], ++count;
  if (count == 0) throw PreconditionError("silhouette: class '" + std::string(label_name(cls)) + "' has no samples");
  return sum / count;
}

}  // namespace hwcls
