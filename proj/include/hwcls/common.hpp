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

#ifndef HWCLS_COMMON_HPP
#define HWCLS_COMMON_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hwcls {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition of an operation (bad argument, empty input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or usage; the CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IndexError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Malformed input stream; carries the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// The text classes a sample can belong to. The numeric value is the
/// canonical class index used for tie-breaking.
enum class LabelClass : int {
  kWord = 0,
  kNumber = 1,
  kDate = 2,
  kAlphanumeric = 3,
  kZipCode = 4,
};

inline constexpr int kNumLabelClasses = 5;

std::string_view label_name(LabelClass c);
std::optional<LabelClass> parse_label(std::string_view name);
/// Like parse_label but throws ConfigError naming the bad token.
LabelClass label_from_name(std::string_view name);
/// Parses "word,number,date".
std::vector<LabelClass> parse_label_list(std::string_view csv);
std::vector<LabelClass> all_label_classes();

/// Mixes a base seed with a stream index (splitmix64 finalizer); used to
/// derive independent per-sample seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Reads a whole file as bytes; throws IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace hwcls

#endif  // HWCLS_COMMON_HPP
