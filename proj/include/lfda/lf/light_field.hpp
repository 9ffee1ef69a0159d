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
#ifndef LFDA_LF_LIGHT_FIELD_HPP_
#define LFDA_LF_LIGHT_FIELD_HPP_

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfda/core/tensor.hpp"
#include "lfda/io/image.hpp"

namespace lfda {

inline constexpr size_t kViewsPerRow = 8;

// U x V grid of sub-aperture images. views[v][u] indexing is row-major with
// v (the vertical angular index) as the slow axis, matching the on-disk
// naming view_VV_UU. All views share one spatial size; samples live in [0,1].
template <typename T>
struct LightFieldGrid {
  size_t u_count = 0, v_count = 0;
  size_t height = 0, width = 0;
  std::vector<Image<T>> views;  // v_count * u_count, row-major in v

  Image<T>& view(size_t v, size_t u) { return views[v * u_count + u]; }
  const Image<T>& view(size_t v, size_t u) const {
    return views[v * u_count + u];
  }
};

// One row of 8 SAIs, the codec's unit of work.
template <typename T>
struct SAIRow {
  std::array<Image<T>, kViewsPerRow> sais;
  int row_index = 0;
  size_t height() const { return sais[0].h(); }
  size_t width() const { return sais[0].w(); }
};

// Conditioning input of the i-th disparity module: 4 stacked planes
// (view i, the row-center view, and two constant position-index planes).
template <typename T>
struct FeatureTensor {
  Tensor4<T> tensor;  // 4 x h x w x 3
  int view_index = 0;
  int row_index = 0;
};

// Identical spatial window cut from all 8 SAIs of one row.
template <typename T>
struct PatchSample {
  Tensor4<T> patch;  // 8 x p x p x 3
  int row_index = 0;
  size_t s0 = 0, t0 = 0;  // top-left offset (row, col) in the source SAIs
};

// On-disk layout of a SAI directory: <prefix>VV_UU.<ext>, zero-padded to two
// digits, zero-based, v (row) first. ext empty means auto-detect png/ppm.
struct SaiNaming {
  std::string prefix = "view_";
  std::string ext;
};

namespace detail {

inline std::string view_basename(const SaiNaming& naming, size_t v, size_t u,
                                 const std::string& ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%02zu_%02zu.%s", naming.prefix.c_str(), v,
                u, ext.c_str());
  return buf;
}

inline std::string find_view_file(const std::filesystem::path& dir,
                                  const SaiNaming& naming, size_t v,
                                  size_t u) {
  std::vector<std::string> exts;
  if (!naming.ext.empty()) {
    exts.push_back(naming.ext);
  } else {
    exts = {"png", "ppm"};
  }
  for (const auto& e : exts) {
    auto p = dir / view_basename(naming, v, u, e);
    if (std::filesystem::exists(p)) return p.string();
  }
  return {};
}

}  // namespace detail

// Scans a SAI directory and loads the full U x V grid. The grid extent is
// detected from the files present; every view inside that extent must exist
// and all views must share one spatial size.
template <typename T = float>
LightFieldGrid<T> load_sai_grid(const std::string& directory,
                                const SaiNaming& naming = {}) {
  namespace fs = std::filesystem;
  fs::path dir(directory);
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + directory);

  size_t u_count = 0, v_count = 0;
  while (!detail::find_view_file(dir, naming, 0, u_count).empty()) ++u_count;
  while (!detail::find_view_file(dir, naming, v_count, 0).empty()) ++v_count;
  if (u_count == 0 || v_count == 0)
    throw std::runtime_error("no views matching " + naming.prefix +
                             "VV_UU.{png,ppm} in " + directory);

  LightFieldGrid<T> grid;
  grid.u_count = u_count;
  grid.v_count = v_count;
  grid.views.resize(u_count * v_count);
  for (size_t v = 0; v < v_count; ++v) {
    for (size_t u = 0; u < u_count; ++u) {
      std::string path = detail::find_view_file(dir, naming, v, u);
      if (path.empty()) {
        throw std::runtime_error("missing view (" + std::to_string(v) + "," +
                                 std::to_string(u) + ") in " + directory);
      }
      auto loaded = load_image<T>(path);
      if (grid.height == 0) {
        grid.height = loaded.image.h();
        grid.width = loaded.image.w();
      } else if (loaded.image.h() != grid.height ||
                 loaded.image.w() != grid.width) {
        throw std::runtime_error("inconsistent view dimensions in " + path);
      }
      grid.view(v, u) = std::move(loaded.image);
    }
  }
  return grid;
}

template <typename T>
void save_sai_grid(const std::string& directory, const LightFieldGrid<T>& grid,
                   const SaiNaming& naming = {.prefix = "view_", .ext = "png"},
                   int bit_depth = 8) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  std::string ext = naming.ext.empty() ? "png" : naming.ext;
  for (size_t v = 0; v < grid.v_count; ++v) {
    for (size_t u = 0; u < grid.u_count; ++u) {
      auto name = detail::view_basename(naming, v, u, ext);
      save_image((fs::path(directory) / name).string(), grid.view(v, u),
                 bit_depth);
    }
  }
}

// Keeps the centered target x target view window; offset = floor((count -
// target) / 2) per axis, biasing odd leftovers toward the top-left.
template <typename T>
LightFieldGrid<T> center_crop_views(const LightFieldGrid<T>& grid,
                                    size_t target) {
  if (grid.u_count < target || grid.v_count < target) {
    throw std::invalid_argument(
        "cannot crop " + std::to_string(grid.v_count) + "x" +
        std::to_string(grid.u_count) + " grid to " + std::to_string(target));
  }
  size_t off_u = (grid.u_count - target) / 2;
  size_t off_v = (grid.v_count - target) / 2;
  LightFieldGrid<T> out;
  out.u_count = out.v_count = target;
  out.height = grid.height;
  out.width = grid.width;
  out.views.reserve(target * target);
  for (size_t v = 0; v < target; ++v) {
    for (size_t u = 0; u < target; ++u) {
      out.views.push_back(grid.view(v + off_v, u + off_u));
    }
  }
  return out;
}

template <typename T>
SAIRow<T> extract_row(const LightFieldGrid<T>& grid, int r) {
  if (grid.u_count != kViewsPerRow || grid.v_count != kViewsPerRow)
    throw std::invalid_argument("extract_row expects an 8x8 grid");
  if (r < 0 || size_t(r) >= kViewsPerRow)
    throw std::out_of_range("row index out of range: " + std::to_string(r));
  SAIRow<T> row;
  row.row_index = r;
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    row.sais[i] = grid.view(size_t(r), i);
  }
  return row;
}

struct FeatureOptions {
  int row_center = 3;          // index of the "center" SAI within the row
  double index_offset = 3.5;   // subtracted from angular indices
};

// f^i = [x(i), x(center), const u-plane, const v-plane], u = i - offset,
// v = row - offset. The constant planes carry the view's angular position so
// the disparity modules can learn the grid's rigid parallax structure.
template <typename T>
FeatureTensor<T> build_feature_tensor(const SAIRow<T>& row, int i,
                                      const FeatureOptions& opts = {}) {
  if (i < 0 || size_t(i) >= kViewsPerRow)
    throw std::out_of_range("view index out of range: " + std::to_string(i));
  size_t h = row.height(), w = row.width();
  FeatureTensor<T> f;
  f.view_index = i;
  f.row_index = row.row_index;
  f.tensor = Tensor4<T>(4, h, w, 3);
  set_slice(f.tensor, 0, row.sais[size_t(i)]);
  set_slice(f.tensor, 1, row.sais[size_t(opts.row_center)]);
  T u = T(double(i) - opts.index_offset);
  T v = T(double(row.row_index) - opts.index_offset);
  for (size_t y = 0; y < h; ++y) {
    for (size_t x = 0; x < w; ++x) {
      for (size_t c = 0; c < 3; ++c) {
        f.tensor(2, y, x, c) = u;
        f.tensor(3, y, x, c) = v;
      }
    }
  }
  return f;
}

template <typename T>
Tensor4<T> row_to_tensor(const SAIRow<T>& row) {
  Tensor4<T> x(kViewsPerRow, row.height(), row.width(), 3);
  for (size_t i = 0; i < kViewsPerRow; ++i) set_slice(x, i, row.sais[i]);
  return x;
}

template <typename T>
SAIRow<T> tensor_to_row(const Tensor4<T>& x, int row_index) {
  SAIRow<T> row;
  row.row_index = row_index;
  for (size_t i = 0; i < kViewsPerRow; ++i) row.sais[i] = slice_image(x, i);
  return row;
}

// Emits every p x p window at stride-aligned offsets, cut identically from
// all 8 SAIs of each row. Windows never cross the image border.
template <typename T>
std::vector<PatchSample<T>> extract_patches(const LightFieldGrid<T>& grid,
                                            size_t p = 64, size_t stride = 16) {
  if (p > grid.height || p > grid.width)
    throw std::invalid_argument("patch size exceeds SAI size");
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  std::vector<PatchSample<T>> out;
  size_t ny = (grid.height - p) / stride + 1;
  size_t nx = (grid.width - p) / stride + 1;
  out.reserve(grid.v_count * ny * nx);
  for (size_t r = 0; r < grid.v_count; ++r) {
    for (size_t sy = 0; sy < ny; ++sy) {
      for (size_t sx = 0; sx < nx; ++sx) {
        PatchSample<T> sample;
        sample.row_index = int(r);
        sample.s0 = sy * stride;
        sample.t0 = sx * stride;
        sample.patch = Tensor4<T>(kViewsPerRow, p, p, 3);
        for (size_t i = 0; i < grid.u_count; ++i) {
          const Image<T>& src = grid.view(r, i);
          for (size_t y = 0; y < p; ++y) {
            for (size_t x = 0; x < p; ++x) {
              for (size_t c = 0; c < 3; ++c) {
                sample.patch(i, y, x, c) = src(sample.s0 + y, sample.t0 + x, c);
              }
            }
          }
        }
        out.push_back(std::move(sample));
      }
    }
  }
  return out;
}

// Dataset manifest: plain text, one grid directory per line. Blank lines and
// lines starting with '#' are skipped.
inline std::vector<std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<std::string> dirs;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    dirs.push_back(line);
  }
  return dirs;
}

}  // namespace lfda

#endif  // LFDA_LF_LIGHT_FIELD_HPP_
