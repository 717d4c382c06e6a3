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

#include "hwcls/textgen.hpp"

#include <random>
#include <sstream>

namespace hwcls {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

char digit(std::mt19937_64& rng, int lo = 0) {
  return static_cast<char>('0' + uniform(rng, lo, 9));
}

char letter(std::mt19937_64& rng) {
  return static_cast<char>('a' + uniform(rng, 0, 25));
}

std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

std::string format_date(const std::string& pattern, int day, int month, int year) {
  std::string out;
  std::size_t i = 0;
  auto starts = [&](const char* tok) { return pattern.compare(i, std::char_traits<char>::length(tok), tok) == 0; };
  while (i < pattern.size()) {
    if (starts("YYYY")) {
      out += std::to_string(year);
      i += 4;
    } else if (starts("YY")) {
      out += two_digits(year % 100);
      i += 2;
    } else if (starts("DD")) {
      out += two_digits(day);
      i += 2;
    } else if (starts("D")) {
      out += std::to_string(day);
      i += 1;
    } else if (starts("MM")) {
      out += two_digits(month);
      i += 2;
    } else if (starts("M")) {
      out += std::to_string(month);
      i += 1;
    } else {
      out.push_back(pattern[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) throw PreconditionError("month out of range");
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return kDays[month - 1] + (month == 2 && leap ? 1 : 0);
}

std::vector<std::string> load_wordlist(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

std::string generate_text(LabelClass cls, const TextConfig& cfg,
                          std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  switch (cls) {
    case LabelClass::kNumber: {
      if (cfg.max_number_digits < 1) throw ConfigError("max_number_digits must be >= 1");
      const int len = uniform(rng, 1, cfg.max_number_digits);
      std::string s;
      s.push_back(digit(rng, len > 1 ? 1 : 0));
      for (int i = 1; i < len; ++i) s.push_back(digit(rng));
      return s;
    }
    case LabelClass::kZipCode: {
      std::string s;
      for (int i = 0; i < 5; ++i) s.push_back(digit(rng));
      return s;
    }
    case LabelClass::kDate: {
      if (cfg.date_patterns.empty()) throw ConfigError("no date patterns configured");
      const auto& pattern =
          cfg.date_patterns[static_cast<std::size_t>(
              uniform(rng, 0, static_cast<int>(cfg.date_patterns.size()) - 1))];
      const int year = uniform(rng, cfg.min_year, cfg.max_year);
      const int month = uniform(rng, 1, 12);
      const int day = uniform(rng, 1, days_in_month(year, month));
      return format_date(pattern, day, month, year);
    }
    case LabelClass::kAlphanumeric: {
      if (cfg.min_alnum_length < 2 || cfg.max_alnum_length < cfg.min_alnum_length)
        throw ConfigError("alphanumeric length range must satisfy 2 <= min <= max");
      const int len = uniform(rng, cfg.min_alnum_length, cfg.max_alnum_length);
      std::string s;
      bool has_letter = false, has_digit = false;
      for (int i = 0; i < len; ++i) {
        if (uniform(rng, 0, 1) == 0) {
          s.push_back(letter(rng));
          has_letter = true;
        } else {
          s.push_back(digit(rng));
          has_digit = true;
        }
      }
      // len >= 2, so replacing one character never removes the other kind.
      if (!has_letter) s[static_cast<std::size_t>(uniform(rng, 0, len - 1))] = letter(rng);
      if (!has_digit) s[static_cast<std::size_t>(uniform(rng, 0, len - 1))] = digit(rng);
      return s;
    }
    case LabelClass::kWord: {
      if (cfg.wordlist.empty()) throw ConfigError("word class needs a non-empty wordlist");
      return cfg.wordlist[static_cast<std::size_t>(
          uniform(rng, 0, static_cast<int>(cfg.wordlist.size()) - 1))];
    }
  }
  throw PreconditionError("generate_text: unknown class");
}

}  // namespace hwcls
