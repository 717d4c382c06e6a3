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

#ifndef HWCLS_TEXTGEN_HPP
#define HWCLS_TEXTGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hwcls/common.hpp"

namespace hwcls {

/// Controls what generate_text produces for each class.
///
/// Date patterns use the tokens DD/D (day), MM/M (month), YYYY/YY (year);
/// any other character is copied literally.
struct TextConfig {
  std::vector<std::string> date_patterns = {"DD.MM.YYYY", "D.M.YY", "DD-MM-YYYY"};
  int min_year = 1850;
  int max_year = 2020;
  int max_number_digits = 10;
  int min_alnum_length = 4;
  int max_alnum_length = 12;
  std::vector<std::string> wordlist;
};

/// Reads a UTF-8 wordlist, one word per line; blank lines are dropped.
std::vector<std::string> load_wordlist(const std::string& path);

/// Draws a random string of the given class:
///   number       1..10 digits, no leading zero unless single digit
///   date         one of cfg.date_patterns with a calendar-valid date
///   zip_code     exactly 5 digits
///   alphanumeric 4..12 chars of [a-z0-9], at least one letter and one digit
///   word         uniform pick from cfg.wordlist (ConfigError if empty)
std::string generate_text(LabelClass cls, const TextConfig& cfg,
                          std::uint64_t rng_seed);

int days_in_month(int year, int month);

}  // namespace hwcls

#endif  // HWCLS_TEXTGEN_HPP
