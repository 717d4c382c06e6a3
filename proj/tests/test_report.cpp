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

#include <algorithm>
#include <filesystem>

#include "hwcls/report.hpp"
#include "testkit.hpp"

using namespace hwcls;
namespace fs = std::filesystem;

namespace {

constexpr LabelClass kA = LabelClass::kWord, kB = LabelClass::kNumber, kC = LabelClass::kDate;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("reports are byte identical for identical input") {
  const std::vector<LabelClass> y = {kA, kB, kC, kA, kB, kC}, p = {kA, kB, kB, kA, kC, kC};
  const Embeddings x = testkit::random_points(6, 4, false, 1);
  const PcaResult pca = pca_project(x, 2);
  ReportInput in{metrics(confusion(y, p, {kA, kB, kC})), confusion(y, p, {kA, kB, kC}), &pca, y, {}};
  in.extra["note"] = "toy";
  const fs::path a = fresh_dir("hwcls_report_a"), b = fresh_dir("hwcls_report_b");
  emit_report(in, a.string());
  emit_report(in, b.string());
  for (const char* f : {"metrics.json", "confusion.csv", "pca.csv", "plots/confusion.svg", "plots/pca.svg"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(read_file((a / f).string()) == read_file((b / f).string()));
  }
  const std::string csv = read_file((a / "pca.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 6 rows
  CHECK(csv.rfind("x,y,label\n", 0) == 0);
  CHECK(read_file((a / "confusion.csv").string()).rfind("actual,word,number,date\n", 0) == 0);
  const auto j = nlohmann::json::parse(read_file((a / "metrics.json").string()));
  CHECK(j.at("note") == "toy");
  CHECK(j.at("confusion").at("counts")[1][2] == 1);
}

TEST_CASE("empty PCA input fails before writing") {
  const std::vector<LabelClass> y = {kA};
  PcaResult empty;
  ReportInput in{metrics(confusion(y, y, {kA})), confusion(y, y, {kA}), &empty, {}, {}};
  const fs::path dir = fresh_dir("hwcls_report_empty");
  CHECK_THROWS_AS(emit_report(in, dir.string()), PreconditionError);
  CHECK(!fs::exists(dir));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0, 3) == "0.333");
}

}  // TEST_SUITE
