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

#include "hwcls/common.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace hwcls {

namespace {

constexpr std::array<std::string_view, kNumLabelClasses> kLabelNames = {
    "word", "number", "date", "alphanumeric", "zip_code"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view label_name(LabelClass c) {
  return kLabelNames.at(static_cast<int>(c));
}

std::optional<LabelClass> parse_label(std::string_view name) {
  for (int i = 0; i < kNumLabelClasses; ++i)
    if (kLabelNames[i] == name) return static_cast<LabelClass>(i);
  return std::nullopt;
}

LabelClass label_from_name(std::string_view name) {
  auto c = parse_label(name);
  if (!c) throw ConfigError("unknown class name '" + std::string(name) + "'");
  return *c;
}

std::vector<LabelClass> parse_label_list(std::string_view csv) {
  std::vector<LabelClass> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    auto token = csv.substr(start, end - start);
    if (!token.empty()) out.push_back(label_from_name(token));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty class list");
  return out;
}

std::vector<LabelClass> all_label_classes() {
  std::vector<LabelClass> out;
  for (int i = 0; i < kNumLabelClasses; ++i)
    out.push_back(static_cast<LabelClass>(i));
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(path, "write failed");
}

}  // namespace hwcls
