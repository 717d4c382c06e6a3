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

#ifndef HWCLS_IMAGE_HPP
#define HWCLS_IMAGE_HPP

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace hwcls {

/// 8-bit grayscale image, rows x cols, 255 = white background.
using GrayImage =
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major float image, used for intermediate resampling.
template <typename Scalar>
using ImageArray =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Reads an 8-bit PNG and converts it to grayscale (RGB is averaged with
/// Rec.601 weights, alpha is composited onto white).
GrayImage read_png(const std::string& path);

/// Writes an 8-bit grayscale PNG. Output bytes depend only on the pixels.
void write_png(const std::string& path, const GrayImage& image);

}  // namespace hwcls

#endif  // HWCLS_IMAGE_HPP
