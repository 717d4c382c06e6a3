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

#include "testkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "hwcls/layers.hpp"
#include "hwcls/metrics.hpp"
#include "hwcls/network.hpp"

namespace hwcls::testkit {

namespace {

using Mat = RowMatrix<double>;
using Vec = Eigen::VectorXd;

Mat randn(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

Vec randv(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Vec flat(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unflat(const Vec& v, Eigen::Index r, Eigen::Index c) { return Eigen::Map<const Mat>(v.data(), r, c); }

Vec concat(std::initializer_list<Vec> parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  Vec out(n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

void record(GradCheck& g, const Vec& analytic, const Vec& numeric) {
  g.max_rel_error = std::max(g.max_rel_error, rel_error(analytic, numeric));
  ++g.instances;
}

}  // namespace

double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

GradCheck check_conv(int instances, std::uint64_t seed) {
  GradCheck g{"conv2d", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    layers::Conv2d<double> conv;
    auto& geo = conv.geom;
    geo.in_channels = uniform(rng, 1, 3);
    geo.in_height = uniform(rng, 3, 7);
    geo.in_width = uniform(rng, 3, 7);
    geo.out_channels = uniform(rng, 1, 4);
    geo.kernel = uniform(rng, 0, 1) ? 3 : 1;
    geo.stride = uniform(rng, 1, 2);
    geo.pad = geo.kernel / 2;
    const Mat x = randn(rng, geo.in_channels, geo.in_height * geo.in_width);
    const Mat w = randn(rng, geo.out_channels, geo.patch_size());
    const Mat r = randn(rng, geo.out_channels, geo.out_height() * geo.out_width());
    auto loss = [&](const Mat& xx, const Mat& ww) {
      typename layers::Conv2d<double>::Cache c;
      return (conv.forward(xx, ww, c).array() * r.array()).sum();
    };
    typename layers::Conv2d<double>::Cache cache;
    conv.forward(x, w, cache);
    Mat dw = Mat::Zero(w.rows(), w.cols());
    const Mat dx = conv.backward(r, w, cache, dw);
    const Vec analytic = concat({flat(dx), flat(dw)});
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) {
          return loss(unflat(v.head(x.size()), x.rows(), x.cols()), unflat(v.tail(w.size()), w.rows(), w.cols()));
        },
        concat({flat(x), flat(w)}));
    record(g, analytic, numeric);
  }
  return g;
}

GradCheck check_instance_norm(int instances, std::uint64_t seed) {
  GradCheck g{"instance_norm", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    layers::InstanceNorm<double> norm;
    const int c = uniform(rng, 1, 3), n = uniform(rng, 2, 12);
    const Mat x = randn(rng, c, n, 2.0);
    const Vec gamma = randv(rng, c), beta = randv(rng, c);
    const Mat r = randn(rng, c, n);
    auto loss = [&](const Mat& xx, const Vec& gg, const Vec& bb) {
      typename layers::InstanceNorm<double>::Cache cache;
      return (norm.forward(xx, gg, bb, cache).array() * r.array()).sum();
    };
    typename layers::InstanceNorm<double>::Cache cache;
    norm.forward(x, gamma, beta, cache);
    Vec dgamma = Vec::Zero(c), dbeta = Vec::Zero(c);
    const Mat dx = norm.backward(r, gamma, cache, dgamma, dbeta);
    const Vec analytic = concat({flat(dx), dgamma, dbeta});
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) {
          return loss(unflat(v.head(x.size()), c, n), v.segment(x.size(), c), v.tail(c));
        },
        concat({flat(x), gamma, beta}));
    record(g, analytic, numeric);
  }
  return g;
}

GradCheck check_relu(int instances, std::uint64_t seed) {
  GradCheck g{"relu", 0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.05, 2.0);
  for (int it = 0; it < instances; ++it) {
    const int c = uniform(rng, 1, 4), n = uniform(rng, 1, 10);
    Mat x(c, n);
    // Keep inputs away from the kink so central differences are exact.
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = (uniform(rng, 0, 1) ? 1.0 : -1.0) * mag(rng);
    const Mat r = randn(rng, c, n);
    const Mat dx = layers::relu_backward<double>(r, layers::relu<double>(x));
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) { return (layers::relu<double>(unflat(v, c, n)).array() * r.array()).sum(); }, flat(x));
    record(g, flat(dx), numeric);
  }
  return g;
}

GradCheck check_avg_pool(int instances, std::uint64_t seed) {
  GradCheck g{"global_avg_pool", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int c = uniform(rng, 1, 5), n = uniform(rng, 1, 12);
    const Mat x = randn(rng, c, n);
    const Vec r = randv(rng, c);
    const Mat dx = layers::global_avg_pool_backward<double>(r, n);
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) { return layers::global_avg_pool<double>(unflat(v, c, n)).dot(r); }, flat(x));
    record(g, flat(dx), numeric);
  }
  return g;
}

GradCheck check_linear(int instances, std::uint64_t seed) {
  GradCheck g{"linear", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int in = uniform(rng, 1, 8), out = uniform(rng, 1, 6);
    const Vec x = randv(rng, in), b = randv(rng, out), r = randv(rng, out);
    const Mat w = randn(rng, out, in);
    Mat dw = Mat::Zero(out, in);
    Vec db = Vec::Zero(out);
    const Vec dx = layers::linear_backward<double>(r, x, w, dw, db);
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) {
          const Mat ww = unflat(v.segment(in, w.size()), out, in);
          return layers::linear<double>(v.head(in), ww, v.tail(out)).dot(r);
        },
        concat({x, flat(w), b}));
    record(g, concat({dx, flat(dw), db}), numeric);
  }
  return g;
}

GradCheck check_network(int instances, std::uint64_t seed) {
  GradCheck g{"resnet", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    ModelConfig cfg;
    cfg.input_height = 8;
    cfg.input_width = 10;
    cfg.stem_channels = uniform(rng, 2, 3);
    cfg.stem_stride = uniform(rng, 1, 2);
    cfg.stages.clear();
    int halvings = cfg.stem_stride == 2 ? 1 : 0;
    const int n_stages = uniform(rng, 1, 2);
    for (int s = 0; s < n_stages; ++s) {
      StageConfig st;
      st.channels = uniform(rng, 2, 4);
      st.blocks = uniform(rng, 1, 2);
      st.stride = halvings < 2 ? uniform(rng, 1, 2) : 1;
      if (st.stride == 2) ++halvings;
      cfg.stages.push_back(st);
    }
    cfg.embedding_dim = 3;
    if (uniform(rng, 0, 1)) cfg.num_classes = 3;
    validate_model_config(cfg);
    auto params = init_parameters<double>(cfg, rng());
    for (auto& [name, p] : params) p.values() += randv(rng, p.size(), 0.1);
    const Network<double> net(cfg);
    const Mat x = randn(rng, 1, cfg.input_height * cfg.input_width);
    const Vec r = randv(rng, cfg.output_dim());

    typename Network<double>::Trace trace;
    net.forward_sample(params, x, &trace);
    auto grads = zeros_like(params);
    const Mat dx = net.backward_sample_input(params, trace, r, grads);

    std::vector<std::pair<std::string, Eigen::Index>> layout;  // name, size
    std::vector<Vec> parts{flat(dx)};
    std::vector<Vec> values{flat(x)};
    for (const auto& [name, t] : params) {
      layout.emplace_back(name, t.size());
      parts.push_back(grads.at(name).values());
      values.push_back(t.values());
    }
    auto join = [](const std::vector<Vec>& vs) {
      Eigen::Index n = 0;
      for (const auto& v : vs) n += v.size();
      Vec out(n);
      Eigen::Index at = 0;
      for (const auto& v : vs) out.segment(at, v.size()) = v, at += v.size();
      return out;
    };
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) {
          Parameters<double> p = params;
          Eigen::Index at = x.size();
          for (const auto& [name, size] : layout) {
            p.at(name).values() = v.segment(at, size);
            at += size;
          }
          return net.forward_sample(p, unflat(v.head(x.size()), 1, x.size()), nullptr).dot(r);
        },
        join(values));
    record(g, join(parts), numeric);
  }
  return g;
}

GradCheck check_softmax_ce(int instances, std::uint64_t seed) {
  GradCheck g{"softmax_cross_entropy", 0, 0.0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int b = uniform(rng, 1, 5), c = uniform(rng, 2, 6);
    const Mat logits = randn(rng, b, c, 3.0);
    std::vector<int> labels;
    for (int i = 0; i < b; ++i) labels.push_back(uniform(rng, 0, c - 1));
    const auto res = softmax_cross_entropy<double>(logits, labels);
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) { return softmax_cross_entropy<double>(unflat(v, b, c), labels).loss; }, flat(logits));
    record(g, flat(res.grad), numeric);
  }
  return g;
}

GradCheck check_triplet(int instances, std::uint64_t seed) {
  GradCheck g{"triplet_loss", 0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> margin_dist(0.2, 4.0);
  while (g.instances < instances) {
    const int b = uniform(rng, 1, 4), d = uniform(rng, 1, 6);
    const Mat a = randn(rng, b, d), p = randn(rng, b, d), n = randn(rng, b, d);
    const double margin = margin_dist(rng);
    bool near_kink = false;
    for (int i = 0; i < b; ++i) {
      const double h = (a.row(i) - p.row(i)).squaredNorm() - (a.row(i) - n.row(i)).squaredNorm() + margin;
      near_kink = near_kink || std::abs(h) < 1e-3;
    }
    if (near_kink) continue;
    const auto res = triplet_loss<double>(a, p, n, margin);
    const Eigen::Index s = a.size();
    const Vec numeric = numeric_gradient(
        [&](const Vec& v) {
          return triplet_loss<double>(unflat(v.head(s), b, d), unflat(v.segment(s, s), b, d),
                                      unflat(v.tail(s), b, d), margin)
              .loss;
        },
        concat({flat(a), flat(p), flat(n)}));
    record(g, concat({flat(res.grad_anchor), flat(res.grad_positive), flat(res.grad_negative)}), numeric);
  }
  return g;
}

std::vector<GradCheck> all_gradient_checks(int instances, std::uint64_t seed) {
  return {check_conv(instances, derive_seed(seed, 1)),
          check_instance_norm(instances, derive_seed(seed, 2)),
          check_relu(instances, derive_seed(seed, 3)),
          check_avg_pool(instances, derive_seed(seed, 4)),
          check_linear(instances, derive_seed(seed, 5)),
          check_network(instances, derive_seed(seed, 6)),
          check_softmax_ce(instances, derive_seed(seed, 7)),
          check_triplet(instances, derive_seed(seed, 8))};
}

RowMatrix<double> conv_direct(const RowMatrix<double>& x, const RowMatrix<double>& weight, int in_h, int in_w,
                              int kernel, int stride, int pad) {
  const int cin = static_cast<int>(x.rows()), cout = static_cast<int>(weight.rows());
  const int ho = (in_h + 2 * pad - kernel) / stride + 1, wo = (in_w + 2 * pad - kernel) / stride + 1;
  RowMatrix<double> y = RowMatrix<double>::Zero(cout, ho * wo);
  for (int o = 0; o < cout; ++o)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        double acc = 0.0;
        for (int c = 0; c < cin; ++c)
          for (int ky = 0; ky < kernel; ++ky)
            for (int kx = 0; kx < kernel; ++kx) {
              const int iy = oy * stride - pad + ky, ix = ox * stride - pad + kx;
              if (iy < 0 || iy >= in_h || ix < 0 || ix >= in_w) continue;
              acc += weight(o, (c * kernel + ky) * kernel + kx) * x(c, iy * in_w + ix);
            }
        y(o, oy * wo + ox) = acc;
      }
  return y;
}

LabelClass knn_oracle(const RowVectord& query, const SupportSet& support, int k) {
  std::vector<std::tuple<double, Eigen::Index>> all;
  for (Eigen::Index i = 0; i < support.embeddings.rows(); ++i)
    all.emplace_back((support.embeddings.row(i) - query).norm(), i);
  std::sort(all.begin(), all.end());
  std::map<LabelClass, int> count;
  std::map<LabelClass, double> total;
  for (int i = 0; i < k; ++i) {
    const auto [d, idx] = all[static_cast<std::size_t>(i)];
    const LabelClass c = support.labels[static_cast<std::size_t>(idx)];
    ++count[c];
    total[c] += d;
  }
  int most = 0;
  for (const auto& [c, n] : count) most = std::max(most, n);
  std::optional<LabelClass> best;
  double best_mean = 0.0;
  for (const auto& [c, n] : count) {
    if (n != most) continue;
    const double mean = total[c] / n;
    if (!best || mean < best_mean) best = c, best_mean = mean;
  }
  return *best;
}

std::vector<int> lloyd_oracle(const Embeddings& x, Embeddings centroids, int max_iter) {
  const Eigen::Index n = x.rows(), k = centroids.rows();
  auto nearest = [&](Eigen::Index i, double* out_d) {
    int arg = 0;
    double best = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      double d = 0.0;
      for (Eigen::Index t = 0; t < x.cols(); ++t) d += (x(i, t) - centroids(j, t)) * (x(i, t) - centroids(j, t));
      if (j == 0 || d < best) best = d, arg = static_cast<int>(j);
    }
    if (out_d) *out_d = best;
    return arg;
  };
  std::vector<int> assign(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) assign[static_cast<std::size_t>(i)] = nearest(i, &dist[static_cast<std::size_t>(i)]);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<bool> reseeded(static_cast<std::size_t>(n), false);
    for (Eigen::Index j = 0; j < k; ++j) {
      RowVectord sum = RowVectord::Zero(x.cols());
      int members = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (assign[static_cast<std::size_t>(i)] == j) sum += x.row(i), ++members;
      if (members > 0) {
        centroids.row(j) = sum / members;
        continue;
      }
      // Empty cluster: the unclaimed point farthest from its centroid.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (reseeded[static_cast<std::size_t>(i)]) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      reseeded[static_cast<std::size_t>(far)] = true;
      centroids.row(j) = x.row(far);
    }
    std::vector<int> next(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] = nearest(i, &dist[static_cast<std::size_t>(i)]);
    const bool done = next == assign;
    assign = next;
    if (done) break;
  }
  return assign;
}

std::vector<Triplet> batch_hard_oracle(const std::vector<int>& labels, const Embeddings& e) {
  const int n = static_cast<int>(labels.size());
  Mat d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = (e.row(i) - e.row(j)).squaredNorm();
  std::vector<Triplet> out;
  for (int a = 0; a < n; ++a) {
    std::vector<int> pos, neg;
    for (int j = 0; j < n; ++j)
      if (j != a) (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(a)] ? pos : neg).push_back(j);
    if (pos.empty() || neg.empty()) continue;
    double far = -1.0, near = 0.0;
    for (int j : pos) far = std::max(far, d(a, j));
    near = d(a, neg.front());
    for (int j : neg) near = std::min(near, d(a, j));
    // Smallest index attaining the extreme.
    const int p = *std::find_if(pos.begin(), pos.end(), [&](int j) { return d(a, j) == far; });
    const int q = *std::find_if(neg.begin(), neg.end(), [&](int j) { return d(a, j) == near; });
    out.push_back({a, p, q});
  }
  return out;
}

std::optional<int> otsu_oracle(const GrayImage& image) {
  // Exact rational comparison of w0*w1*(mu0 - mu1)^2 over every threshold,
  // with pixels partitioned directly.
  using Wide = __int128;
  std::optional<int> best_t;
  Wide best_num = 0, best_den = 1;
  for (int t = 1; t < 256; ++t) {
    std::int64_t w0 = 0, w1 = 0, s0 = 0, s1 = 0;
    for (Eigen::Index i = 0; i < image.size(); ++i) {
      const int v = image(i);
      if (v < t) ++w0, s0 += v;
      else ++w1, s1 += v;
    }
    if (w0 == 0 || w1 == 0) continue;
    // w0*w1*(s0/w0 - s1/w1)^2 = (s0*w1 - s1*w0)^2 / (w0*w1)
    const Wide diff = static_cast<Wide>(s0) * w1 - static_cast<Wide>(s1) * w0;
    const Wide num = diff * diff, den = static_cast<Wide>(w0) * w1;
    if (!best_t || num * best_den > best_num * den) best_t = t, best_num = num, best_den = den;
  }
  return best_t;
}

Embeddings random_points(int n, int d, bool quantized, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Embeddings x(n, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = quantized ? uniform(rng, 0, 3) : normal(rng);
  return x;
}

OracleCheck knn_equivalence(int instances, std::uint64_t seed) {
  OracleCheck c{"knn_label", 0, 0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int n = uniform(rng, 1, 50), d = uniform(rng, 1, 8), classes = uniform(rng, 1, 5);
    SupportSet s;
    s.embeddings = random_points(n, d, uniform(rng, 0, 1), rng());
    for (int i = 0; i < n; ++i) s.labels.push_back(static_cast<LabelClass>(uniform(rng, 0, classes - 1)));
    RowVectord q = uniform(rng, 0, 2) == 0 ? RowVectord(s.embeddings.row(uniform(rng, 0, n - 1)))
                                           : RowVectord(random_points(1, d, false, rng()).row(0));
    const int k = uniform(rng, 1, n);
    if (knn_label(q, s, k) != knn_oracle(q, s, k)) ++c.mismatches;
    ++c.instances;
  }
  return c;
}

OracleCheck kmeans_equivalence(int instances, std::uint64_t seed) {
  OracleCheck c{"kmeans", 0, 0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int n = uniform(rng, 1, 50), d = uniform(rng, 1, 8), k = uniform(rng, 1, std::min(n, 6));
    const Embeddings x = random_points(n, d, uniform(rng, 0, 1), rng());
    const std::uint64_t s = rng();
    if (kmeans(x, k, s).assignments != lloyd_oracle(x, kmeans_pp_init(x, k, s))) ++c.mismatches;
    ++c.instances;
  }
  return c;
}

OracleCheck batch_hard_equivalence(int instances, std::uint64_t seed) {
  OracleCheck c{"batch_hard", 0, 0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int n = uniform(rng, 2, 50), d = uniform(rng, 1, 8), classes = uniform(rng, 1, 4);
    const Embeddings e = random_points(n, d, uniform(rng, 0, 1), rng());
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) labels.push_back(uniform(rng, 0, classes - 1));
    if (mine_triplets(labels, MiningStrategy::kBatchHard, &e, 0) != batch_hard_oracle(labels, e)) ++c.mismatches;
    ++c.instances;
  }
  return c;
}

OracleCheck otsu_equivalence(int instances, std::uint64_t seed) {
  OracleCheck c{"otsu_threshold", 0, 0};
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int rows = uniform(rng, 1, 7), cols = uniform(rng, 1, 7);
    GrayImage img(rows, cols);
    std::vector<int> levels;
    const int mode = uniform(rng, 0, 2);
    const int n_levels = uniform(rng, 1, 4);
    for (int l = 0; l < n_levels; ++l) levels.push_back(uniform(rng, 0, 255));
    for (Eigen::Index i = 0; i < img.size(); ++i)
      img(i) = static_cast<std::uint8_t>(mode == 0 ? uniform(rng, 0, 255)
                                                   : levels[static_cast<std::size_t>(
                                                         uniform(rng, 0, static_cast<int>(levels.size()) - 1))]);
    if (otsu_threshold(img) != otsu_oracle(img)) ++c.mismatches;
    ++c.instances;
  }
  return c;
}

IdentityCheck metric_identities(int instances, std::uint64_t seed) {
  IdentityCheck out;
  std::mt19937_64 rng(seed);
  for (int it = 0; it < instances; ++it) {
    const int k = uniform(rng, 2, 5), n = uniform(rng, 1, 300);
    std::vector<LabelClass> order;
    for (int c = 0; c < k; ++c) order.push_back(static_cast<LabelClass>(c));
    std::vector<LabelClass> truth, pred;
    for (int i = 0; i < n; ++i) {
      truth.push_back(static_cast<LabelClass>(uniform(rng, 0, k - 1)));
      pred.push_back(static_cast<LabelClass>(uniform(rng, 0, k - 1)));
    }
    for (Averaging avg : {Averaging::kWeighted, Averaging::kMacro}) {
      const MetricsReport perfect = metrics(confusion(truth, truth, order), avg);
      for (double v : {perfect.accuracy, perfect.precision, perfect.recall, perfect.f1})
        out.max_perfect_deviation = std::max(out.max_perfect_deviation, std::abs(v - 1.0));
    }
    const MetricsReport r = metrics(confusion(truth, pred, order), Averaging::kWeighted);
    out.max_recall_deviation = std::max(out.max_recall_deviation, std::abs(r.recall - r.accuracy));
    ++out.instances;
  }
  return out;
}

}  // namespace hwcls::testkit
