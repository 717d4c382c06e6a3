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

#include "hwcls/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hwcls/losses.hpp"

namespace hwcls {

std::vector<LabelClass> SupportSet::classes() const {
  std::set<LabelClass> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

std::size_t SupportSet::count(LabelClass c) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
}

std::string support_to_jsonl(const SupportSet& s) {
  std::string out;
  for (Eigen::Index i = 0; i < s.embeddings.rows(); ++i) {
    const auto& row = s.embeddings.row(i);
    nlohmann::json j = {{"label", label_name(s.labels[static_cast<std::size_t>(i)])},
                        {"embedding", std::vector<double>(row.data(), row.data() + row.size())}};
    out += j.dump() + "\n";
  }
  return out;
}

SupportSet support_from_jsonl(std::string_view text) {
  SupportSet s;
  std::vector<std::vector<double>> rows;
  std::size_t offset = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(offset, end - offset);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        const auto j = nlohmann::json::parse(line);
        s.labels.push_back(label_from_name(j.at("label").get<std::string>()));
        rows.push_back(j.at("embedding").get<std::vector<double>>());
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(offset, std::string("bad support record: ") + e.what());
      } catch (const ConfigError& e) {
        throw ParseError(offset, e.what());
      }
      if (rows.back().size() != rows.front().size())
        throw ParseError(offset, "support embeddings differ in dimension");
    }
    offset = end + 1;
  }
  if (rows.empty()) throw ParseError(0, "support set is empty");
  s.embeddings.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    s.embeddings.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const RowVectord>(rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
  return s;
}

SoftmaxPredictions softmax_classify(const Embeddings& logits, const std::vector<LabelClass>& classes) {
  if (logits.cols() != static_cast<Eigen::Index>(classes.size()))
    throw ConfigError("softmax head has " + std::to_string(logits.cols()) + " outputs but " +
                      std::to_string(classes.size()) + " classes were given");
  SoftmaxPredictions out;
  out.probabilities = softmax<double>(logits);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < logits.cols(); ++j)
      if (out.probabilities(i, j) > out.probabilities(i, arg)) arg = j;
    out.predicted.push_back(classes[static_cast<std::size_t>(arg)]);
  }
  return out;
}

namespace {

void check_embeddings(const Embeddings& x, const char* what) {
  if (!x.allFinite()) throw PreconditionError(std::string(what) + ": non-finite embedding");
}

// Nearest centre per point plus the summed squared distance.
double assign(const Embeddings& x, const Embeddings& c, std::vector<int>& out,
              std::vector<double>* dist = nullptr) {
  out.assign(static_cast<std::size_t>(x.rows()), 0);
  if (dist) dist->assign(static_cast<std::size_t>(x.rows()), 0.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best = (x.row(i) - c.row(0)).squaredNorm();
    int arg = 0;
    for (Eigen::Index j = 1; j < c.rows(); ++j) {
      const double d = (x.row(i) - c.row(j)).squaredNorm();
      if (d < best) best = d, arg = static_cast<int>(j);
    }
    out[static_cast<std::size_t>(i)] = arg;
    if (dist) (*dist)[static_cast<std::size_t>(i)] = best;
    total += best;
  }
  return total;
}

}  // namespace

Embeddings kmeans_pp_init(const Embeddings& x, int k, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n)
    throw PreconditionError("kmeans: need 1 <= k <= N, got k=" + std::to_string(k) + ", N=" + std::to_string(n));
  check_embeddings(x, "kmeans");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Embeddings c(k, x.cols());
  auto first = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  c.row(0) = x.row(first);
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (d2[static_cast<std::size_t>(i)] > 0.0 && r < acc) {
          pick = i;
          break;
        }
      }
      // Rounding can leave r at the very end of the mass.
      if (pick < 0)
        for (Eigen::Index i = n; i-- > 0;)
          if (d2[static_cast<std::size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
    } else {
      pick = std::min(static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n)), n - 1);
    }
    c.row(j) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (x.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

KMeansResult lloyd(const Embeddings& x, Embeddings centroids, int max_iter) {
  if (centroids.rows() < 1 || centroids.rows() > x.rows() || centroids.cols() != x.cols())
    throw PreconditionError("lloyd: centroid matrix does not fit the data");
  const Eigen::Index k = centroids.rows();
  KMeansResult res;
  std::vector<double> dist;
  res.objective.push_back(assign(x, centroids, res.assignments, &dist));
  std::vector<int> next;
  for (int it = 0; it < max_iter; ++it) {
    Embeddings sums = Embeddings::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sums.row(res.assignments[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(res.assignments[static_cast<std::size_t>(i)])];
    }
    std::vector<bool> taken(static_cast<std::size_t>(x.rows()), false);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        centroids.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
        continue;
      }
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (!taken[static_cast<std::size_t>(i)] &&
            (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]))
          far = i;
      taken[static_cast<std::size_t>(far)] = true;
      centroids.row(j) = x.row(far);
    }
    res.iterations = it + 1;
    res.objective.push_back(assign(x, centroids, next, &dist));
    const bool same = next == res.assignments;
    res.assignments.swap(next);
    if (same) break;
  }
  res.centroids = std::move(centroids);
  return res;
}

KMeansResult kmeans(const Embeddings& x, int k, std::uint64_t seed, int max_iter) {
  return lloyd(x, kmeans_pp_init(x, k, seed), max_iter);
}

LabelClass knn_label(const RowVectord& query, const SupportSet& support, int k) {
  const Eigen::Index n = support.embeddings.rows();
  if (k < 1 || k > n)
    throw PreconditionError("knn: need 1 <= k <= support size, got k=" + std::to_string(k) +
                            ", support size " + std::to_string(n));
  if (query.size() != support.embeddings.cols())
    throw ShapeError("knn: query dimension " + std::to_string(query.size()) + " vs support " +
                     std::to_string(support.embeddings.cols()));
  std::vector<std::pair<double, Eigen::Index>> d(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = {(support.embeddings.row(i) - query).norm(), i};
  std::stable_sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<LabelClass, std::pair<int, double>> votes;  // count, distance sum
  for (int i = 0; i < k; ++i) {
    auto& v = votes[support.labels[static_cast<std::size_t>(d[static_cast<std::size_t>(i)].second)]];
    ++v.first;
    v.second += d[static_cast<std::size_t>(i)].first;
  }
  // map order is class order, so strict comparisons keep the lowest index.
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    const auto& [cnt, sum] = it->second;
    const auto& [bcnt, bsum] = best->second;
    if (cnt > bcnt || (cnt == bcnt && sum / cnt < bsum / bcnt)) best = it;
  }
  return best->first;
}

std::vector<LabelClass> naive_classify(const Embeddings& unseen, const SupportSet& support,
                                       int num_clusters, int knn_k, std::uint64_t seed) {
  const KMeansResult km = kmeans(unseen, num_clusters, seed);
  const int k = std::min<int>(knn_k, static_cast<int>(support.embeddings.rows()));
  std::vector<LabelClass> cluster_label;
  for (Eigen::Index j = 0; j < km.centroids.rows(); ++j)
    cluster_label.push_back(knn_label(km.centroids.row(j), support, k));
  std::vector<LabelClass> out;
  for (int a : km.assignments) out.push_back(cluster_label[static_cast<std::size_t>(a)]);
  return out;
}

bool hard_threshold_classify(const RowVectord& query, const RowVectord& support_sample, double threshold) {
  if (!(threshold > 0)) throw PreconditionError("hard threshold must be positive");
  return (query - support_sample).norm() <= threshold;
}

std::vector<RocPoint> threshold_roc(const Embeddings& x, const std::vector<LabelClass>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw ShapeError("threshold_roc: label count does not match embeddings");
  std::vector<std::pair<double, bool>> pairs;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j)
      pairs.emplace_back((x.row(i) - x.row(j)).norm(),
                         labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]);
  std::sort(pairs.begin(), pairs.end());
  const auto pos = static_cast<double>(std::count_if(pairs.begin(), pairs.end(), [](auto& p) { return p.second; }));
  const auto neg = static_cast<double>(pairs.size()) - pos;
  std::vector<RocPoint> out;
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (pairs[i].second ? tp : fp) += 1;
    if (i + 1 < pairs.size() && pairs[i + 1].first == pairs[i].first) continue;
    out.push_back({pairs[i].first, pos > 0 ? tp / pos : 0.0, neg > 0 ? fp / neg : 0.0});
  }
  return out;
}

std::string_view family_name(DistanceFamily f) {
  return f == DistanceFamily::kGaussian ? "gaussian" : "histogram";
}

DistanceFamily family_from_name(std::string_view name) {
  if (name == "gaussian") return DistanceFamily::kGaussian;
  if (name == "histogram") return DistanceFamily::kHistogram;
  throw ConfigError("unknown distance family '" + std::string(name) + "'");
}

double DistanceDensity::log_pdf(double d) const {
  if (family == DistanceFamily::kGaussian) {
    const double z = d - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - z * z / (2.0 * variance);
  }
  if (d < lo || d > hi) return std::log(floor_density);
  const double width = (hi - lo) / kHistogramBins;
  auto bin = width > 0 ? static_cast<std::size_t>((d - lo) / width) : 0;
  bin = std::min<std::size_t>(bin, kHistogramBins - 1);
  return std::log(density[bin]);
}

namespace {

DistanceDensity fit_gaussian(const std::vector<double>& d) {
  DistanceDensity out;
  out.family = DistanceFamily::kGaussian;
  out.samples = d.size();
  const double n = static_cast<double>(d.size());
  out.mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : d) ss += (v - out.mean) * (v - out.mean);
  out.variance = std::max(ss / n, kVarianceFloor);
  return out;
}

DistanceDensity fit_histogram(const std::vector<double>& d, double lo, double hi) {
  DistanceDensity out;
  out.family = DistanceFamily::kHistogram;
  out.samples = d.size();
  out.lo = lo;
  out.hi = hi;
  const double width = std::max((hi - lo) / kHistogramBins, 1e-12);
  std::vector<double> counts(kHistogramBins, 0.0);
  for (double v : d) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min<std::size_t>(bin, kHistogramBins - 1)];
  }
  const double mass = static_cast<double>(d.size()) + kHistogramBins;
  for (double c : counts) out.density.push_back((c + 1.0) / mass / width);
  out.floor_density = 1.0 / mass / width;
  return out;
}

}  // namespace

DistanceModel fit_distance_model(const SupportSet& support, DistanceFamily family) {
  const auto& x = support.embeddings;
  if (static_cast<Eigen::Index>(support.labels.size()) != x.rows())
    throw ShapeError("support: label count does not match embeddings");
  const auto classes = support.classes();
  if (classes.size() < 2) throw FitError("distance model needs support samples of at least two classes");
  for (LabelClass c : classes)
    if (support.count(c) < 2)
      throw FitError("class '" + std::string(label_name(c)) + "' has " + std::to_string(support.count(c)) +
                     " support sample(s); at least 2 are needed to fit its distance model");
  check_embeddings(x, "fit_distance_model");
  DistanceModel dm;
  dm.family = family;
  for (LabelClass c : classes) {
    std::vector<double> target, non_target;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (support.labels[static_cast<std::size_t>(i)] != c) continue;
      for (Eigen::Index j = 0; j < x.rows(); ++j) {
        if (j == i) continue;
        const double d = (x.row(i) - x.row(j)).norm();
        if (support.labels[static_cast<std::size_t>(j)] == c) {
          if (j > i) target.push_back(d);
        } else {
          non_target.push_back(d);
        }
      }
    }
    ClassDistances cd;
    if (family == DistanceFamily::kGaussian) {
      cd.target = fit_gaussian(target);
      cd.non_target = fit_gaussian(non_target);
    } else {
      const auto [tlo, thi] = std::minmax_element(target.begin(), target.end());
      const auto [nlo, nhi] = std::minmax_element(non_target.begin(), non_target.end());
      const double lo = std::min(*tlo, *nlo), hi = std::max(*thi, *nhi);
      cd.target = fit_histogram(target, lo, hi);
      cd.non_target = fit_histogram(non_target, lo, hi);
    }
    dm.classes.emplace(c, std::move(cd));
  }
  return dm;
}

std::string_view aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::kMinDistance: return "min_distance";
    case Aggregation::kMeanDistance: return "mean_distance";
    case Aggregation::kNearestMean: return "nearest_mean";
  }
  return "nearest_mean";
}

Aggregation aggregation_from_name(std::string_view name) {
  if (name == "min_distance") return Aggregation::kMinDistance;
  if (name == "mean_distance") return Aggregation::kMeanDistance;
  if (name == "nearest_mean") return Aggregation::kNearestMean;
  throw ConfigError("unknown aggregation '" + std::string(name) + "'");
}

LlrScore llr_classify(const RowVectord& query, const SupportSet& support, const DistanceModel& dm,
                      Aggregation aggregation) {
  if (query.size() != support.embeddings.cols())
    throw ShapeError("llr: query dimension " + std::to_string(query.size()) + " vs support " +
                     std::to_string(support.embeddings.cols()));
  LlrScore s;
  for (const auto& [c, cd] : dm.classes) {
    std::vector<double> d;
    for (Eigen::Index i = 0; i < support.embeddings.rows(); ++i)
      if (support.labels[static_cast<std::size_t>(i)] == c) d.push_back((support.embeddings.row(i) - query).norm());
    if (d.empty())
      throw PreconditionError("llr: class '" + std::string(label_name(c)) + "' has no support samples");
    std::sort(d.begin(), d.end());
    double agg = d.front();
    if (aggregation != Aggregation::kMinDistance) {
      const std::size_t m = aggregation == Aggregation::kMeanDistance
                                ? d.size()
                                : std::min<std::size_t>(kNearestMeanCount, d.size());
      agg = std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m), 0.0) / static_cast<double>(m);
    }
    s.classes.push_back(c);
    s.distance.push_back(agg);
    s.llr.push_back(cd.target.log_pdf(agg) - cd.non_target.log_pdf(agg));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.llr.size(); ++i)
    if (s.llr[i] > s.llr[best]) best = i;
  s.predicted = s.classes[best];
  return s;
}

UnseenPredictions unseen_class_protocol(const Embeddings& queries, const SupportSet& support,
                                        const std::vector<LabelClass>& trained, LabelClass new_class,
                                        const UnseenConfig& cfg) {
  if (std::find(trained.begin(), trained.end(), new_class) != trained.end())
    throw ConfigError("new class '" + std::string(label_name(new_class)) + "' is already a trained class");
  if (support.count(new_class) < 2)
    throw PreconditionError("support set needs at least 2 samples of the new class '" +
                            std::string(label_name(new_class)) + "', has " +
                            std::to_string(support.count(new_class)));
  UnseenPredictions out;
  out.naive = naive_classify(queries, support, static_cast<int>(trained.size()) + 1, cfg.knn_k, cfg.seed);
  const DistanceModel dm = fit_distance_model(support, cfg.family);
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out.llr.push_back(llr_classify(queries.row(i), support, dm, cfg.aggregation));
  return out;
}

}  // namespace hwcls
