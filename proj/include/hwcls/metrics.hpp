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

#ifndef HWCLS_METRICS_HPP
#define HWCLS_METRICS_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "hwcls/classify.hpp"
#include "hwcls/common.hpp"

namespace hwcls {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rows are actual classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<LabelClass> classes;
  CountMatrix counts;

  std::int64_t total() const { return counts.sum(); }
};

/// Throws PreconditionError on length mismatch or a label outside `order`.
ConfusionMatrix confusion(const std::vector<LabelClass>& truth, const std::vector<LabelClass>& predicted,
                          const std::vector<LabelClass>& order);

enum class Averaging { kWeighted, kMacro };
std::string_view averaging_name(Averaging a);
Averaging averaging_from_name(std::string_view name);

struct ClassMetrics {
  LabelClass label = LabelClass::kWord;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  std::int64_t support = 0;  // true samples of this class
  std::int64_t predicted = 0;
};

struct MetricsReport {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  Averaging averaging = Averaging::kWeighted;
  std::vector<ClassMetrics> per_class;
};

/// Per-class precision = diag/column sum and recall = diag/row sum (0 for an
/// empty column or row), F1 = 2PR/(P+R) (0 when both are 0). Weighted
/// averaging weights by true-class support; macro averages over the classes
/// that occur as actual or predicted labels.
MetricsReport metrics(const ConfusionMatrix& cm, Averaging averaging = Averaging::kWeighted);

nlohmann::json metrics_to_json(const MetricsReport& r);

struct PcaResult {
  Embeddings projection;   // (N, out_dim)
  Embeddings components;   // (out_dim, D), unit rows
  RowVectord mean;
  std::vector<double> explained_ratio;
};

/// Projection onto the top principal axes of the centred data. Each axis is
/// signed so that its largest-magnitude loading is positive. Data with all
/// points equal projects to zeros with zero ratios.
PcaResult pca_project(const Embeddings& x, int out_dim = 2);

/// Silhouette value of every sample under the given labels, Euclidean
/// distance. Samples alone in their class get 0.
std::vector<double> silhouette_samples(const Embeddings& x, const std::vector<LabelClass>& labels);

/// Mean silhouette over the samples of one class.
double class_silhouette(const Embeddings& x, const std::vector<LabelClass>& labels, LabelClass cls);

}  // namespace hwcls

#endif  // HWCLS_METRICS_HPP
