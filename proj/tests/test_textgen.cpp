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
#include <cctype>
#include <regex>

#include "hwcls/textgen.hpp"

using namespace hwcls;

namespace {

// Independent calendar check.
bool valid_date(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return d <= len[m - 1] + (m == 2 && leap ? 1 : 0);
}

}  // namespace

TEST_SUITE("textgen") {

TEST_CASE("zip codes are five digits") {
  const std::regex re("^[0-9]{5}$");
  for (std::uint64_t s = 0; s < 200; ++s) CHECK(std::regex_match(generate_text(LabelClass::kZipCode, {}, s), re));
}

TEST_CASE("numbers are decimal and below ten to the tenth") {
  const std::regex re("^(0|[1-9][0-9]{0,9})$");
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::string t = generate_text(LabelClass::kNumber, {}, s);
    CHECK(std::regex_match(t, re));
    CHECK(std::stoull(t) < 10000000000ULL);
  }
}

TEST_CASE("dates parse as calendar dates") {
  TextConfig cfg;
  cfg.date_patterns = {"DD.MM.YYYY"};
  const std::regex re("^([0-9]{2})\\.([0-9]{2})\\.([0-9]{4})$");
  for (std::uint64_t s = 0; s < 500; ++s) {
    const std::string t = generate_text(LabelClass::kDate, cfg, s);
    std::smatch m;
    REQUIRE(std::regex_match(t, m, re));
    const int d = std::stoi(m[1]), mo = std::stoi(m[2]), y = std::stoi(m[3]);
    CHECK(valid_date(y, mo, d));
    CHECK(y >= cfg.min_year);
    CHECK(y <= cfg.max_year);
  }
  cfg.date_patterns = {"D/M/YY"};
  const std::regex short_re("^[0-9]{1,2}/[0-9]{1,2}/[0-9]{2}$");
  for (std::uint64_t s = 0; s < 50; ++s) CHECK(std::regex_match(generate_text(LabelClass::kDate, cfg, s), short_re));
}

TEST_CASE("days in month") {
  CHECK(days_in_month(2000, 2) == 29);
  CHECK(days_in_month(1900, 2) == 28);
  CHECK(days_in_month(2004, 2) == 29);
  CHECK(days_in_month(2003, 4) == 30);
  CHECK(days_in_month(2003, 12) == 31);
}

TEST_CASE("alphanumerics mix letters and digits") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::string t = generate_text(LabelClass::kAlphanumeric, {}, s);
    CHECK(t.size() >= 4);
    CHECK(t.size() <= 12);
    CHECK(std::any_of(t.begin(), t.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); }));
    CHECK(std::any_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }));
    CHECK(std::all_of(t.begin(), t.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); }));
  }
}

TEST_CASE("words come from the list and need one") {
  TextConfig cfg;
  CHECK_THROWS_AS(generate_text(LabelClass::kWord, cfg, 1), ConfigError);
  cfg.wordlist = {"alpha", "beta"};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::string w = generate_text(LabelClass::kWord, cfg, s);
    CHECK((w == "alpha" || w == "beta"));
  }
}

TEST_CASE("generation is seeded") {
  for (LabelClass c : {LabelClass::kNumber, LabelClass::kDate, LabelClass::kZipCode, LabelClass::kAlphanumeric})
    CHECK(generate_text(c, {}, 42) == generate_text(c, {}, 42));
}

}  // TEST_SUITE
