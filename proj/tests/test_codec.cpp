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
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "lfda/codec/codec.hpp"
#include "lfda/lf/synthetic.hpp"
#include "lfda/nn/model.hpp"

namespace lfda {
namespace {

// Full-depth stacks (the bitstream geometry assumes 4 color / 3 disparity
// layers) but with few channels so every test stays fast.
ModelConfig small_config(uint64_t seed = 11) {
  ModelConfig c;
  c.color_hidden = 8;
  c.color_bottleneck = 8;
  c.disparity_hidden = 6;
  c.disparity_bottleneck = 4;
  c.seed = seed;
  return c;
}

LightFieldGrid<float> small_grid(size_t hw = 32, uint64_t seed = 7) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.height = hw;
  cfg.width = hw;
  cfg.dx_per_view = 0.5;
  cfg.dy_per_view = 0.25;
  return make_parallax_grid<float>(cfg);
}

TEST(Codec, EncodeIsDeterministicAndThreadInvariant) {
  auto model = make_model<float>(small_config());
  auto grid = small_grid();
  Bytes a = encode_lightfield(grid, model, 1);
  Bytes b = encode_lightfield(grid, model, 1);
  Bytes c = encode_lightfield(grid, model, 8);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Codec, ContainerStartsWithMagicAndEndsWithCrc) {
  auto model = make_model<float>(small_config());
  Bytes bytes = encode_lightfield(small_grid(), model);
  ASSERT_GT(bytes.size(), kHeaderBytes + 4);
  EXPECT_EQ(std::memcmp(bytes.data(), kContainerMagic, 4), 0);
  EXPECT_EQ(bytes[4], kContainerVersion);
  uint32_t stored = uint32_t(bytes[bytes.size() - 4]) |
                    uint32_t(bytes[bytes.size() - 3]) << 8 |
                    uint32_t(bytes[bytes.size() - 2]) << 16 |
                    uint32_t(bytes[bytes.size() - 1]) << 24;
  EXPECT_EQ(stored, crc32_ieee({bytes.data(), bytes.size() - 4}));
}

TEST(Codec, DecodeRecoversGeometryAndRange) {
  auto model = make_model<float>(small_config());
  auto grid = small_grid();
  Bytes bytes = encode_lightfield(grid, model);
  auto rec = decode_lightfield(bytes, model);
  EXPECT_EQ(rec.u_count, 8u);
  EXPECT_EQ(rec.v_count, 8u);
  EXPECT_EQ(rec.height, grid.height);
  EXPECT_EQ(rec.width, grid.width);
  ASSERT_EQ(rec.views.size(), 64u);
  for (const auto& v : rec.views) {
    ASSERT_EQ(v.h(), grid.height);
    ASSERT_EQ(v.w(), grid.width);
    ASSERT_EQ(v.c(), 3u);
    for (size_t i = 0; i < v.size(); ++i) {
      ASSERT_GE(v.data()[i], 0.0f);
      ASSERT_LE(v.data()[i], 1.0f);
    }
  }
}

TEST(Codec, ParallelDecodeMatchesSerial) {
  auto model = make_model<float>(small_config());
  Bytes bytes = encode_lightfield(small_grid(), model);
  auto rec1 = decode_lightfield(bytes, model, 1);
  auto rec8 = decode_lightfield(bytes, model, 8);
  ASSERT_EQ(rec1.views.size(), rec8.views.size());
  for (size_t v = 0; v < rec1.views.size(); ++v) {
    const auto& x = rec1.views[v];
    const auto& y = rec8.views[v];
    ASSERT_EQ(x.size(), y.size());
    ASSERT_EQ(std::memcmp(x.data(), y.data(), x.size() * sizeof(float)), 0)
        << "view " << v;
  }
}

// The decoder must see exactly the latents the encoder quantized; this is
// what makes the rate estimate meaningful and the stream reproducible.
TEST(Codec, QuantizedLatentsSurviveTheBitstream) {
  auto model = make_model<float>(small_config());
  auto grid = small_grid();
  Bytes bytes = encode_lightfield(grid, model);

  const CodecTables tables = build_codec_tables(model);
  SAIRow<float> row = extract_row(grid, 2);  // 32x32 needs no padding
  RowLatents<float> enc;
  encode_row(row, model, tables, &enc);

  RowLatents<float> dec;
  decode_single_row(bytes, model, 2, &dec);

  ASSERT_EQ(enc.y_hat.size(), dec.y_hat.size());
  for (size_t i = 0; i < enc.y_hat.size(); ++i) {
    ASSERT_EQ(enc.y_hat.data()[i], dec.y_hat.data()[i]) << "y index " << i;
  }
  ASSERT_EQ(enc.z_hat.size(), kViewsPerRow);
  ASSERT_EQ(dec.z_hat.size(), kViewsPerRow);
  for (size_t k = 0; k < kViewsPerRow; ++k) {
    ASSERT_EQ(enc.z_hat[k].size(), dec.z_hat[k].size());
    for (size_t i = 0; i < enc.z_hat[k].size(); ++i) {
      ASSERT_EQ(enc.z_hat[k].data()[i], dec.z_hat[k].data()[i])
          << "view " << k << " index " << i;
    }
  }
  // Decode-side flow maps exist per view and keep the clamped range.
  ASSERT_EQ(dec.flows.size(), kViewsPerRow);
  for (const auto& f : dec.flows) {
    ASSERT_EQ(f.h(), grid.height);
    ASSERT_EQ(f.w(), grid.width);
    ASSERT_EQ(f.c(), 2u);
    for (size_t i = 0; i < f.size(); ++i) ASSERT_LT(std::abs(f.data()[i]), 16.0f);
  }
}

TEST(Codec, SingleRowMatchesFullDecode) {
  auto model = make_model<float>(small_config());
  auto grid = small_grid();
  Bytes bytes = encode_lightfield(grid, model);
  auto full = decode_lightfield(bytes, model);
  SAIRow<float> row = decode_single_row(bytes, model, 5);
  EXPECT_EQ(row.row_index, 5);
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    const auto& a = full.views[5 * kViewsPerRow + i];
    const auto& b = row.sais[i];
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0);
  }
  EXPECT_THROW(decode_single_row(bytes, model, 8), std::out_of_range);
  EXPECT_THROW(decode_single_row(bytes, model, -1), std::out_of_range);
}

TEST(Codec, OddDimensionsArePaddedAndCroppedBack) {
  auto model = make_model<float>(small_config());
  auto grid = small_grid(24, 9);  // pads to 32x32 internally
  Bytes bytes = encode_lightfield(grid, model);
  ParsedContainer pc = parse_container(bytes);
  EXPECT_EQ(pc.header.h, 24);
  EXPECT_EQ(pc.header.w, 24);
  EXPECT_EQ(pc.header.padded_h, 32);
  EXPECT_EQ(pc.header.padded_w, 32);
  auto rec = decode_lightfield(bytes, model);
  EXPECT_EQ(rec.height, 24u);
  EXPECT_EQ(rec.width, 24u);
  EXPECT_EQ(rec.views[0].h(), 24u);

  // encode_row itself refuses unpadded input; padding is the caller's job.
  const CodecTables tables = build_codec_tables(model);
  SAIRow<float> row = extract_row(grid, 0);
  EXPECT_THROW(encode_row(row, model, tables), std::invalid_argument);
}

TEST(Codec, ReportedBppMatchesFileSizeExactly) {
  auto model = make_model<float>(small_config());
  for (size_t hw : {size_t(32), size_t(24)}) {
    auto grid = small_grid(hw);
    Bytes bytes = encode_lightfield(grid, model);
    double bpp = container_bpp(bytes.size(), grid.height, grid.width);
    double pixels = 64.0 * double(grid.height) * double(grid.width);
    EXPECT_EQ(std::llround(bpp * pixels), int64_t(bytes.size()) * 8);
  }
}

TEST(Codec, TamperedStreamIsRejected) {
  auto model = make_model<float>(small_config());
  Bytes bytes = encode_lightfield(small_grid(), model);
  Bytes bad = bytes;
  bad[bad.size() / 2] ^= 0x40;
  try {
    decode_lightfield(bad, model);
    FAIL() << "corrupt stream decoded";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("CRC"), std::string::npos);
  }
  Bytes tiny(bytes.begin(), bytes.begin() + 8);
  EXPECT_THROW(parse_container(tiny), std::runtime_error);
  Bytes cut(bytes.begin(), bytes.end() - 10);
  EXPECT_THROW(decode_lightfield(cut, model), std::runtime_error);
}

TEST(Codec, WrongModelIsRejected) {
  auto enc_model = make_model<float>(small_config(11));
  auto dec_model = make_model<float>(small_config(12));
  Bytes bytes = encode_lightfield(small_grid(), enc_model);
  try {
    decode_lightfield(bytes, dec_model);
    FAIL() << "model_id mismatch not detected";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("model_id"), std::string::npos);
  }
  EXPECT_THROW(decode_single_row(bytes, dec_model, 0), std::runtime_error);
}

TEST(Codec, RejectsBadGrids) {
  auto model = make_model<float>(small_config());
  LightFieldGrid<float> empty;
  EXPECT_THROW(encode_lightfield(empty, model), std::invalid_argument);

  auto grid = small_grid();
  grid.u_count = 4;  // no longer 8x8
  EXPECT_THROW(encode_lightfield(grid, model), std::invalid_argument);
}

TEST(Codec, NoDisparityVariantRoundTrips) {
  auto cfg = small_config();
  cfg.use_disparity = false;
  auto model = make_model<float>(cfg);
  auto grid = small_grid();
  Bytes bytes = encode_lightfield(grid, model);
  ParsedContainer pc = parse_container(bytes);
  for (const auto& row : pc.rows) {
    for (const auto& d : row.disparity_bytes) EXPECT_TRUE(d.empty());
  }
  auto rec = decode_lightfield(bytes, model);
  EXPECT_EQ(rec.height, grid.height);

  auto full = make_model<float>(small_config());
  Bytes with_disp = encode_lightfield(grid, full);
  EXPECT_LT(bytes.size(), with_disp.size());
}

TEST(Codec, SharedDisparityWeightsRoundTrip) {
  auto cfg = small_config();
  cfg.share_disparity_weights = true;
  auto model = make_model<float>(cfg);
  auto grid = small_grid();
  Bytes bytes = encode_lightfield(grid, model);
  auto rec = decode_lightfield(bytes, model);
  EXPECT_EQ(rec.views.size(), 64u);
}

}  // namespace
}  // namespace lfda
