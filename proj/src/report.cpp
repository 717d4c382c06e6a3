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

#include "hwcls/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace hwcls {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, kNumLabelClasses> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                                "#d62728", "#9467bd"};

const char* class_color(LabelClass c) { return kPalette[static_cast<std::size_t>(c)]; }

}  // namespace

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "actual";
  for (LabelClass c : cm.classes) out += "," + std::string(label_name(c));
  out += "\n";
  for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
    out += label_name(cm.classes[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) out += "," + std::to_string(cm.counts(i, j));
    out += "\n";
  }
  return out;
}

std::string pca_csv(const PcaResult& pca, const std::vector<LabelClass>& labels) {
  std::string out = "x,y,label\n";
  for (Eigen::Index i = 0; i < pca.projection.rows(); ++i) {
    const double y = pca.projection.cols() > 1 ? pca.projection(i, 1) : 0.0;
    out += format_number(pca.projection(i, 0)) + "," + format_number(y) + "," +
           std::string(label_name(labels[static_cast<std::size_t>(i)])) + "\n";
  }
  return out;
}

std::string confusion_svg(const ConfusionMatrix& cm) {
  const int k = static_cast<int>(cm.classes.size());
  const int cell = 60, left = 110, top = 40;
  const int w = left + k * cell + 20, h = top + k * cell + 30;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"15\">predicted</text>\n";
  s << "<text x=\"5\" y=\"" << top - 5 << "\">actual</text>\n";
  for (int i = 0; i < k; ++i) {
    const double row = static_cast<double>(cm.counts.row(i).sum());
    s << "<text x=\"5\" y=\"" << top + i * cell + cell / 2 + 4 << "\">"
      << label_name(cm.classes[static_cast<std::size_t>(i)]) << "</text>\n";
    s << "<text x=\"" << left + i * cell + 4 << "\" y=\"" << top - 5 << "\">"
      << label_name(cm.classes[static_cast<std::size_t>(i)]) << "</text>\n";
    for (int j = 0; j < k; ++j) {
      const double frac = row > 0 ? static_cast<double>(cm.counts(i, j)) / row : 0.0;
      const int shade = 255 - static_cast<int>(frac * 200.0 + 0.5);
      s << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#888\"/>\n";
      s << "<text x=\"" << left + j * cell + cell / 2 << "\" y=\"" << top + i * cell + cell / 2 + 4
        << "\" text-anchor=\"middle\">" << cm.counts(i, j) << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string pca_svg(const PcaResult& pca, const std::vector<LabelClass>& labels) {
  const int size = 400, pad = 30;
  const Eigen::Index n = pca.projection.rows();
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pca.projection(i, 0), y = pca.projection.cols() > 1 ? pca.projection(i, 1) : 0.0;
    if (i == 0 || x < xmin) xmin = x;
    if (i == 0 || x > xmax) xmax = x;
    if (i == 0 || y < ymin) ymin = y;
    if (i == 0 || y > ymax) ymax = y;
  }
  const double sx = xmax > xmin ? (size - 2 * pad) / (xmax - xmin) : 1.0;
  const double sy = ymax > ymin ? (size - 2 * pad) / (ymax - ymin) : 1.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 110 << "\" height=\"" << size
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"white\" stroke=\"#888\"/>\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pad + (pca.projection(i, 0) - xmin) * sx;
    const double y = size - pad - ((pca.projection.cols() > 1 ? pca.projection(i, 1) : 0.0) - ymin) * sy;
    s << "<circle cx=\"" << format_number(x, 6) << "\" cy=\"" << format_number(y, 6) << "\" r=\"2.5\" fill=\""
      << class_color(labels[static_cast<std::size_t>(i)]) << "\" fill-opacity=\"0.7\"/>\n";
  }
  std::vector<LabelClass> present(labels.begin(), labels.end());
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  for (std::size_t i = 0; i < present.size(); ++i) {
    const int y = 20 + static_cast<int>(i) * 16;
    s << "<circle cx=\"" << size + 12 << "\" cy=\"" << y - 4 << "\" r=\"4\" fill=\"" << class_color(present[i])
      << "\"/>\n<text x=\"" << size + 20 << "\" y=\"" << y << "\">" << label_name(present[i]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_report(const ReportInput& in, const std::string& out_dir) {
  if (in.pca) {
    if (in.pca->projection.rows() == 0) throw PreconditionError("report: empty PCA input");
    if (static_cast<Eigen::Index>(in.pca_labels.size()) != in.pca->projection.rows())
      throw PreconditionError("report: PCA label count does not match points");
  }
  nlohmann::json j = metrics_to_json(in.metrics);
  nlohmann::json classes = nlohmann::json::array();
  for (LabelClass c : in.confusion.classes) classes.push_back(label_name(c));
  nlohmann::json counts = nlohmann::json::array();
  for (Eigen::Index i = 0; i < in.confusion.counts.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < in.confusion.counts.cols(); ++c) row.push_back(in.confusion.counts(i, c));
    counts.push_back(row);
  }
  j["confusion"] = {{"classes", classes}, {"counts", counts}};
  if (in.pca) j["pca_explained_ratio"] = in.pca->explained_ratio;
  for (const auto& [key, value] : in.extra.items()) j[key] = value;

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "plots", ec);
  if (ec) throw IoError(out_dir, "cannot create directory: " + ec.message());
  const fs::path dir(out_dir);
  write_file((dir / "metrics.json").string(), j.dump(2) + "\n");
  write_file((dir / "confusion.csv").string(), confusion_csv(in.confusion));
  write_file((dir / "plots" / "confusion.svg").string(), confusion_svg(in.confusion));
  if (in.pca) {
    write_file((dir / "pca.csv").string(), pca_csv(*in.pca, in.pca_labels));
    write_file((dir / "plots" / "pca.svg").string(), pca_svg(*in.pca, in.pca_labels));
  }
}

}  // namespace hwcls
