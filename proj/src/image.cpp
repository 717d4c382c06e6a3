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

#include "hwcls/image.hpp"

#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "hwcls/common.hpp"

namespace hwcls {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

GrayImage read_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw IoError(path, std::string("png read: ") + img.message);
  img.format = PNG_FORMAT_GRAY;
  GrayImage out(img.height, img.width);
  png_color background{255, 255, 255};
  if (!png_image_finish_read(&img, &background, out.data(),
                             static_cast<png_int_32>(img.width), nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw IoError(path, "png decode: " + msg);
  }
  return out;
}

void write_png(const std::string& path, const GrayImage& image) {
  if (image.size() == 0) throw PreconditionError("write_png: empty image");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError(path, "cannot open for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path, "png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path, "png encode failed");
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols()),
               static_cast<png_uint_32>(image.rows()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.rows()));
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    rows[static_cast<std::size_t>(r)] =
        const_cast<png_bytep>(image.data() + r * image.cols());
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace hwcls
