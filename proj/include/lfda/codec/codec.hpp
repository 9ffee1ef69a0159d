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
#ifndef LFDA_CODEC_CODEC_HPP_
#define LFDA_CODEC_CODEC_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lfda/codec/container.hpp"
#include "lfda/core/parallel.hpp"
#include "lfda/entropy/cdf.hpp"
#include "lfda/entropy/quantize.hpp"
#include "lfda/entropy/range_coder.hpp"
#include "lfda/lf/light_field.hpp"
#include "lfda/nn/model.hpp"
#include "lfda/nn/ops.hpp"
#include "lfda/warp/warp.hpp"

namespace lfda {

// Frozen coding tables; rebuilt deterministically from the checkpoint on
// both sides (the container stores only the model_id binding).
struct CodecTables {
  CdfTable color;
  CdfTable disparity;
};

template <typename T>
CodecTables build_codec_tables(const Model<T>& m) {
  return {build_cdf_table(m.prior_color), build_cdf_table(m.prior_disparity)};
}

// Optional window into the coding pipeline for tests and debug dumps.
template <typename T>
struct RowLatents {
  Tensor4<T> y_hat;
  std::vector<Tensor4<T>> z_hat;
  std::vector<Image<T>> flows;  // decode side only
};

template <typename T>
RowPayload encode_row(const SAIRow<T>& row, const Model<T>& model,
                      const CodecTables& tables,
                      RowLatents<T>* latents = nullptr) {
  if (row.height() % 16 != 0 || row.width() % 16 != 0) {
    throw std::invalid_argument("encode_row: dims must be padded to 16");
  }
  RowPayload p;
  p.row_index = uint8_t(row.row_index);
  Tensor4<T> x = row_to_tensor(row);
  Tensor4<T> y = transform_forward(model.color_analysis, x);
  Tensor4<T> y_hat = quantize(y, QuantizerMode::kRound);
  p.color_bytes = range_encode(flatten_channel_major(y_hat), tables.color);
  if (latents) {
    latents->y_hat = y_hat;
    latents->z_hat.clear();
  }
  if (model.config.use_disparity) {
    for (size_t i = 0; i < kViewsPerRow; ++i) {
      FeatureTensor<T> f = build_feature_tensor(row, int(i));
      Tensor4<T> z = transform_forward(model.disp_a(i), f.tensor);
      Tensor4<T> z_hat = quantize(z, QuantizerMode::kRound);
      p.disparity_bytes[i] =
          range_encode(flatten_channel_major(z_hat), tables.disparity);
      if (latents) latents->z_hat.push_back(z_hat);
    }
  }
  return p;
}

// Reconstructs the padded row tensor (8 x padded_h x padded_w x 3), clamped
// to [0,1]. Cropping to true dims happens at the grid level.
template <typename T>
Tensor4<T> decode_row(const RowPayload& p, const ContainerHeader& hdr,
                      const Model<T>& model, const CodecTables& tables,
                      RowLatents<T>* latents = nullptr) {
  const size_t ph = hdr.padded_h, pw = hdr.padded_w;
  const size_t ly = size_t(model.config.color_bottleneck);
  const size_t n_y = kViewsPerRow * (ph / 16) * (pw / 16) * ly;
  Tensor4<T> y_hat = unflatten_channel_major<T>(
      range_decode(p.color_bytes, tables.color, n_y), kViewsPerRow, ph / 16,
      pw / 16, ly);
  if (latents) {
    latents->y_hat = y_hat;
    latents->z_hat.clear();
    latents->flows.clear();
  }
  Tensor4<T> x_tilde = transform_forward(model.color_synthesis, y_hat);
  Tensor4<T> x_hat;
  if (model.config.use_disparity) {
    std::vector<Image<T>> maps;
    const size_t lz = size_t(model.config.disparity_bottleneck);
    const size_t n_z = 4 * (ph / 8) * (pw / 8) * lz;
    for (size_t i = 0; i < kViewsPerRow; ++i) {
      Tensor4<T> z_hat = unflatten_channel_major<T>(
          range_decode(p.disparity_bytes[i], tables.disparity, n_z), 4, ph / 8,
          pw / 8, lz);
      Tensor4<T> d = transform_forward(model.disp_s(i), z_hat);
      maps.push_back(slice_image(d, 0));
      if (latents) {
        latents->z_hat.push_back(z_hat);
        latents->flows.push_back(maps.back());
      }
    }
    x_hat = assemble_reconstruction(x_tilde, maps);
  } else {
    x_hat = std::move(x_tilde);
  }
  T* d = x_hat.data();
  for (size_t i = 0; i < x_hat.size(); ++i) d[i] = std::clamp(d[i], T(0), T(1));
  return x_hat;
}

template <typename T>
SAIRow<T> pad_row(const SAIRow<T>& row, size_t ph, size_t pw) {
  SAIRow<T> out;
  out.row_index = row.row_index;
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    out.sais[i] = replicate_pad(row.sais[i], ph, pw);
  }
  return out;
}

template <typename T>
Bytes encode_lightfield(const LightFieldGrid<T>& grid, const Model<T>& model,
                        int threads = 1) {
  if (grid.u_count != kViewsPerRow || grid.v_count != kViewsPerRow) {
    throw std::invalid_argument("encode_lightfield: expects an 8x8 grid");
  }
  if (grid.height == 0 || grid.width == 0) {
    throw std::invalid_argument("encode_lightfield: empty grid");
  }
  if (grid.height > 0xFFFF || grid.width > 0xFFFF) {
    throw std::invalid_argument("encode_lightfield: dims exceed u16");
  }
  if (grid.views[0].c() != 3) {
    throw std::invalid_argument("encode_lightfield: color_channels must be 3");
  }
  ContainerHeader hdr;
  hdr.model_id = model_id(model);
  hdr.h = uint16_t(grid.height);
  hdr.w = uint16_t(grid.width);
  hdr.padded_h = uint16_t(round_up(grid.height, 16));
  hdr.padded_w = uint16_t(round_up(grid.width, 16));
  const CodecTables tables = build_codec_tables(model);
  std::array<RowPayload, kViewsPerRow> payloads;
  parallel_for(kViewsPerRow, threads, [&](size_t r) {
    SAIRow<T> row = pad_row(extract_row(grid, int(r)), hdr.padded_h, hdr.padded_w);
    payloads[r] = encode_row(row, model, tables);
  });
  return assemble_container(hdr, payloads);
}

template <typename T>
LightFieldGrid<T> decode_lightfield(const Bytes& bytes, const Model<T>& model,
                                    int threads = 1) {
  ParsedContainer pc = parse_container(bytes);
  const uint64_t id = model_id(model);
  if (pc.header.model_id != id) {
    throw std::runtime_error("decode: model_id mismatch (container was made "
                             "with a different checkpoint)");
  }
  if (pc.header.u_count != kViewsPerRow || pc.header.v_count != kViewsPerRow ||
      pc.header.color_channels != 3) {
    throw std::runtime_error("decode: unsupported grid layout");
  }
  const CodecTables tables = build_codec_tables(model);
  LightFieldGrid<T> grid;
  grid.u_count = kViewsPerRow;
  grid.v_count = kViewsPerRow;
  grid.height = pc.header.h;
  grid.width = pc.header.w;
  grid.views.resize(kViewsPerRow * kViewsPerRow);
  parallel_for(kViewsPerRow, threads, [&](size_t r) {
    Tensor4<T> x_hat = decode_row(pc.rows[r], pc.header, model, tables);
    for (size_t i = 0; i < kViewsPerRow; ++i) {
      grid.views[r * kViewsPerRow + i] =
          crop_image(slice_image(x_hat, i), grid.height, grid.width);
    }
  });
  return grid;
}

// Decodes one row without touching the other payloads (they are skipped
// over structurally while parsing the container).
template <typename T>
SAIRow<T> decode_single_row(const Bytes& bytes, const Model<T>& model, int r,
                            RowLatents<T>* latents = nullptr) {
  if (r < 0 || size_t(r) >= kViewsPerRow) {
    throw std::out_of_range("row index out of range");
  }
  ParsedContainer pc = parse_container(bytes);
  if (pc.header.model_id != model_id(model)) {
    throw std::runtime_error("decode: model_id mismatch");
  }
  const CodecTables tables = build_codec_tables(model);
  Tensor4<T> x_hat = decode_row(pc.rows[size_t(r)], pc.header, model, tables,
                                latents);
  SAIRow<T> row;
  row.row_index = r;
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    row.sais[i] =
        crop_image(slice_image(x_hat, i), pc.header.h, pc.header.w);
  }
  return row;
}

inline double container_bpp(size_t container_bytes, size_t h, size_t w) {
  return double(container_bytes) * 8.0 /
         (double(kViewsPerRow) * kViewsPerRow * double(h) * double(w));
}

}  // namespace lfda

#endif  // LFDA_CODEC_CODEC_HPP_
