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

#ifndef HWCLS_REPORT_HPP
#define HWCLS_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "hwcls/metrics.hpp"

namespace hwcls {

struct ReportInput {
  MetricsReport metrics;
  ConfusionMatrix confusion;
  const PcaResult* pca = nullptr;     // optional scatter
  std::vector<LabelClass> pca_labels;  // one per PCA row
  nlohmann::json extra = nlohmann::json::object();  // merged into metrics.json
};

/// Writes metrics.json, confusion.csv, plots/confusion.svg and, with PCA
/// data, pca.csv and plots/pca.svg. Output bytes depend only on the input.
void emit_report(const ReportInput& in, const std::string& out_dir);

std::string confusion_csv(const ConfusionMatrix& cm);
std::string pca_csv(const PcaResult& pca, const std::vector<LabelClass>& labels);
std::string confusion_svg(const ConfusionMatrix& cm);
std::string pca_svg(const PcaResult& pca, const std::vector<LabelClass>& labels);

/// Fixed-format number rendering used by every text output.
std::string format_number(double v, int precision = 9);

}  // namespace hwcls

#endif  // HWCLS_REPORT_HPP
