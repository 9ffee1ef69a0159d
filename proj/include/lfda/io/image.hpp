/* Copyright 2026 The LFDA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LFDA_IO_IMAGE_HPP_
#define LFDA_IO_IMAGE_HPP_

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfda/core/tensor.hpp"

namespace lfda {

// RGB image file I/O. Supported: PNG and binary PPM (P6), 8 or 16 bits per
// channel. Samples are scaled to [0,1] on load; writers round to the target
// bit depth, so an 8-bit load -> save -> load cycle is lossless.

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return f;
}

// Raw interleaved RGB samples plus their bit depth.
struct RawImage {
  size_t h = 0, w = 0;
  int bit_depth = 8;
  std::vector<uint16_t> rgb;  // h*w*3, values in [0, 2^bit_depth - 1]
};

inline RawImage read_png(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<uint8_t> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png decode error: " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  depth = png_get_bit_depth(png, info);
  size_t stride = png_get_rowbytes(png, info);
  rows.resize(stride * h);
  row_ptrs.resize(h);
  for (size_t y = 0; y < h; ++y) row_ptrs[y] = rows.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RawImage out;
  out.h = h;
  out.w = w;
  out.bit_depth = depth;
  out.rgb.resize(size_t(h) * w * 3);
  if (depth == 8) {
    for (size_t i = 0; i < out.rgb.size(); ++i) out.rgb[i] = rows[i];
  } else if (depth == 16) {
    // PNG stores 16-bit samples big-endian.
    for (size_t i = 0; i < out.rgb.size(); ++i) {
      out.rgb[i] = uint16_t(rows[2 * i] << 8 | rows[2 * i + 1]);
    }
  } else {
    throw std::runtime_error("unsupported png bit depth in " + path);
  }
  return out;
}

inline void write_png(const std::string& path, const RawImage& img) {
  FilePtr f = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<uint8_t> rows;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png encode error: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(img.w), png_uint_32(img.h),
               img.bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  size_t stride = img.w * 3 * (img.bit_depth / 8);
  rows.resize(stride * img.h);
  if (img.bit_depth == 8) {
    for (size_t i = 0; i < img.rgb.size(); ++i) rows[i] = uint8_t(img.rgb[i]);
  } else {
    for (size_t i = 0; i < img.rgb.size(); ++i) {
      rows[2 * i] = uint8_t(img.rgb[i] >> 8);
      rows[2 * i + 1] = uint8_t(img.rgb[i]);
    }
  }
  row_ptrs.resize(img.h);
  for (size_t y = 0; y < img.h; ++y) row_ptrs[y] = rows.data() + y * stride;
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline int ppm_read_token(std::FILE* f) {
  int c;
  do {
    c = std::fgetc(f);
    if (c == '#') {
      while (c != '\n' && c != EOF) c = std::fgetc(f);
    }
  } while (std::isspace(c));
  int value = 0;
  bool any = false;
  while (std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = std::fgetc(f);
  }
  if (!any) throw std::runtime_error("malformed ppm header");
  return value;
}

inline RawImage read_ppm(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  int c0 = std::fgetc(f.get());
  int c1 = std::fgetc(f.get());
  if (c0 != 'P' || c1 != '6')
    throw std::runtime_error("not a binary ppm (P6): " + path);
  size_t w = size_t(ppm_read_token(f.get()));
  size_t h = size_t(ppm_read_token(f.get()));
  int maxval = ppm_read_token(f.get());
  if (maxval != 255 && maxval != 65535)
    throw std::runtime_error("unsupported ppm maxval in " + path);

  RawImage out;
  out.h = h;
  out.w = w;
  out.bit_depth = maxval == 255 ? 8 : 16;
  out.rgb.resize(h * w * 3);
  size_t bytes_per = maxval == 255 ? 1 : 2;
  std::vector<uint8_t> buf(out.rgb.size() * bytes_per);
  if (std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
    throw std::runtime_error("truncated ppm data in " + path);
  if (maxval == 255) {
    for (size_t i = 0; i < out.rgb.size(); ++i) out.rgb[i] = buf[i];
  } else {
    // PPM 16-bit samples are big-endian.
    for (size_t i = 0; i < out.rgb.size(); ++i)
      out.rgb[i] = uint16_t(buf[2 * i] << 8 | buf[2 * i + 1]);
  }
  return out;
}

inline void write_ppm(const std::string& path, const RawImage& img) {
  FilePtr f = open_file(path, "wb");
  int maxval = img.bit_depth == 8 ? 255 : 65535;
  std::fprintf(f.get(), "P6\n%zu %zu\n%d\n", img.w, img.h, maxval);
  if (img.bit_depth == 8) {
    std::vector<uint8_t> buf(img.rgb.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = uint8_t(img.rgb[i]);
    std::fwrite(buf.data(), 1, buf.size(), f.get());
  } else {
    std::vector<uint8_t> buf(img.rgb.size() * 2);
    for (size_t i = 0; i < img.rgb.size(); ++i) {
      buf[2 * i] = uint8_t(img.rgb[i] >> 8);
      buf[2 * i + 1] = uint8_t(img.rgb[i]);
    }
    std::fwrite(buf.data(), 1, buf.size(), f.get());
  }
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

template <typename T>
struct LoadedImage {
  Image<T> image;
  int bit_depth = 8;
};

template <typename T = float>
LoadedImage<T> load_image(const std::string& path) {
  detail::RawImage raw;
  if (detail::has_suffix(path, ".png")) {
    raw = detail::read_png(path);
  } else if (detail::has_suffix(path, ".ppm")) {
    raw = detail::read_ppm(path);
  } else {
    throw std::runtime_error("unsupported image extension: " + path);
  }
  LoadedImage<T> out;
  out.bit_depth = raw.bit_depth;
  out.image = Image<T>(raw.h, raw.w, 3);
  T scale = T(1) / T((1u << raw.bit_depth) - 1);
  for (size_t i = 0; i < raw.rgb.size(); ++i) {
    out.image[i] = T(raw.rgb[i]) * scale;
  }
  return out;
}

// Writes samples in [0,1] at the requested bit depth; format by extension.
template <typename T>
void save_image(const std::string& path, const Image<T>& img,
                int bit_depth = 8) {
  if (img.c() != 3) throw std::invalid_argument("save_image expects RGB");
  if (bit_depth != 8 && bit_depth != 16)
    throw std::invalid_argument("bit depth must be 8 or 16");
  detail::RawImage raw;
  raw.h = img.h();
  raw.w = img.w();
  raw.bit_depth = bit_depth;
  raw.rgb.resize(img.size());
  double maxval = double((1u << bit_depth) - 1);
  for (size_t i = 0; i < img.size(); ++i) {
    double v = std::clamp(double(img[i]), 0.0, 1.0);
    raw.rgb[i] = uint16_t(std::lround(v * maxval));
  }
  if (detail::has_suffix(path, ".png")) {
    detail::write_png(path, raw);
  } else if (detail::has_suffix(path, ".ppm")) {
    detail::write_ppm(path, raw);
  } else {
    throw std::runtime_error("unsupported image extension: " + path);
  }
}

}  // namespace lfda

#endif  // LFDA_IO_IMAGE_HPP_
