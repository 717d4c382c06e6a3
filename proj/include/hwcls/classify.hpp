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

#ifndef HWCLS_CLASSIFY_HPP
#define HWCLS_CLASSIFY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwcls/common.hpp"
#include "hwcls/tensor.hpp"

namespace hwcls {

using Embeddings = RowMatrix<double>;
using RowVectord = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Labeled embeddings available at classification time.
struct SupportSet {
  Embeddings embeddings;
  std::vector<LabelClass> labels;
  std::string source;  // where the embeddings came from, informational

  /// Classes present, canonical order.
  std::vector<LabelClass> classes() const;
  std::size_t count(LabelClass c) const;
};

/// JSONL with one {"label": name, "embedding": [...]} per line.
std::string support_to_jsonl(const SupportSet& s);
SupportSet support_from_jsonl(std::string_view text);

struct SoftmaxPredictions {
  std::vector<LabelClass> predicted;
  Embeddings probabilities;  // (N, classes)
};

/// Argmax of softmax(logits); ties go to the lowest column.
SoftmaxPredictions softmax_classify(const Embeddings& logits, const std::vector<LabelClass>& classes);

struct KMeansResult {
  Embeddings centroids;
  std::vector<int> assignments;
  /// Sum of squared distances after every assignment step.
  std::vector<double> objective;
  int iterations = 0;
};

/// k-means++ seeding: first centre uniform, then proportional to the squared
/// distance to the nearest chosen centre.
Embeddings kmeans_pp_init(const Embeddings& x, int k, std::uint64_t seed);

/// Lloyd iterations from the given centres until the assignment stops
/// changing or max_iter updates. Nearest centre ties go to the lower index.
/// An empty cluster is moved onto the point farthest from its centre.
KMeansResult lloyd(const Embeddings& x, Embeddings centroids, int max_iter = 300);

KMeansResult kmeans(const Embeddings& x, int k, std::uint64_t seed, int max_iter = 300);

/// Majority vote of the k nearest support embeddings. Equal distances keep
/// support order; a tied vote goes to the class with the smaller mean
/// neighbour distance, then the lower class index.
LabelClass knn_label(const RowVectord& query, const SupportSet& support, int k);

/// Clusters `unseen` into num_clusters groups and labels each cluster by
/// knn_label of its centroid.
std::vector<LabelClass> naive_classify(const Embeddings& unseen, const SupportSet& support,
                                       int num_clusters, int knn_k, std::uint64_t seed);

/// True when the distance is <= threshold.
bool hard_threshold_classify(const RowVectord& query, const RowVectord& support_sample,
                             double threshold);

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Same-class pairs are positives. One point per distinct pairwise distance,
/// ascending, each counting pairs with distance <= threshold.
std::vector<RocPoint> threshold_roc(const Embeddings& x, const std::vector<LabelClass>& labels);

enum class DistanceFamily { kGaussian, kHistogram };
std::string_view family_name(DistanceFamily f);
DistanceFamily family_from_name(std::string_view name);

inline constexpr int kHistogramBins = 32;
inline constexpr double kVarianceFloor = 1e-12;

/// One-dimensional density over distances.
struct DistanceDensity {
  DistanceFamily family = DistanceFamily::kGaussian;
  double mean = 0.0, variance = kVarianceFloor;
  double lo = 0.0, hi = 0.0;
  std::vector<double> density;  // per bin, add-one smoothed
  double floor_density = 0.0;   // used outside [lo, hi]
  std::size_t samples = 0;

  double log_pdf(double d) const;
};

struct ClassDistances {
  DistanceDensity target;      // same-class pairs
  DistanceDensity non_target;  // class vs every other class
};

struct DistanceModel {
  DistanceFamily family = DistanceFamily::kGaussian;
  std::map<LabelClass, ClassDistances> classes;
};

class FitError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Per class: densities of same-class and cross-class pairwise distances.
/// Needs at least two samples of every class and at least two classes.
DistanceModel fit_distance_model(const SupportSet& support, DistanceFamily family);

// Query-to-class distance. kMeanDistance (default) is the statistic whose
// expectation matches the fitted pairwise densities; the other two are biased
// low against them.
enum class Aggregation { kMinDistance, kMeanDistance, kNearestMean };
std::string_view aggregation_name(Aggregation a);
Aggregation aggregation_from_name(std::string_view name);
inline constexpr int kNearestMeanCount = 5;

struct LlrScore {
  std::vector<LabelClass> classes;
  std::vector<double> distance;
  std::vector<double> llr;
  LabelClass predicted = LabelClass::kWord;
};

/// Aggregates the query's distances to each class's support, then
/// llr_c = log p(d_c | target_c) - log p(d_c | non-target_c). Highest llr
/// wins; ties go to the lower class index.
LlrScore llr_classify(const RowVectord& query, const SupportSet& support, const DistanceModel& dm,
                      Aggregation aggregation = Aggregation::kMeanDistance);

struct UnseenConfig {
  int knn_k = 5;
  DistanceFamily family = DistanceFamily::kGaussian;
  Aggregation aggregation = Aggregation::kMeanDistance;
  std::uint64_t seed = 0;
};

struct UnseenPredictions {
  std::vector<LabelClass> naive;
  std::vector<LlrScore> llr;
};

/// Classifies queries into trained ∪ {new_class} with both the naive and
/// llr paths. The support must hold at least two samples of new_class.
UnseenPredictions unseen_class_protocol(const Embeddings& queries, const SupportSet& support,
                                        const std::vector<LabelClass>& trained,
                                        LabelClass new_class, const UnseenConfig& cfg);

}  // namespace hwcls

#endif  // HWCLS_CLASSIFY_HPP
