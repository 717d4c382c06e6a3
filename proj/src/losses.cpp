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

#include "hwcls/losses.hpp"

#include <random>

namespace hwcls {

std::string_view mining_name(MiningStrategy s) {
  return s == MiningStrategy::kRandom ? "random" : "batch_hard";
}

MiningStrategy mining_from_name(std::string_view name) {
  if (name == "random") return MiningStrategy::kRandom;
  if (name == "batch_hard") return MiningStrategy::kBatchHard;
  throw ConfigError("unknown mining strategy '" + std::string(name) + "'");
}

std::vector<Triplet> mine_triplets(const std::vector<int>& labels, MiningStrategy strategy,
                                   const RowMatrix<double>* embeddings, std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  if (strategy == MiningStrategy::kBatchHard) {
    if (!embeddings) throw PreconditionError("batch_hard mining needs embeddings");
    if (embeddings->rows() != n)
      throw ShapeError("mine_triplets: " + std::to_string(embeddings->rows()) +
                       " embeddings for " + std::to_string(n) + " labels");
  }
  std::mt19937_64 rng(seed);
  std::vector<Triplet> out;
  std::vector<int> pos, neg;
  for (int a = 0; a < n; ++a) {
    pos.clear();
    neg.clear();
    for (int j = 0; j < n; ++j) {
      if (j == a) continue;
      (labels[j] == labels[a] ? pos : neg).push_back(j);
    }
    if (pos.empty() || neg.empty()) continue;
    Triplet t{a, pos.front(), neg.front()};
    if (strategy == MiningStrategy::kRandom) {
      t.positive = pos[std::uniform_int_distribution<std::size_t>(0, pos.size() - 1)(rng)];
      t.negative = neg[std::uniform_int_distribution<std::size_t>(0, neg.size() - 1)(rng)];
    } else {
      const auto& e = *embeddings;
      double best_pos = -1.0, best_neg = 0.0;
      for (int j : pos) {
        const double d = (e.row(a) - e.row(j)).squaredNorm();
        if (d > best_pos) best_pos = d, t.positive = j;
      }
      bool first = true;
      for (int j : neg) {
        const double d = (e.row(a) - e.row(j)).squaredNorm();
        if (first || d < best_neg) best_neg = d, t.negative = j, first = false;
      }
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace hwcls
