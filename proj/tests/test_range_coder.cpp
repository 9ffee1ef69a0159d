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

#include <random>

#include "lfda/entropy/cdf.hpp"
#include "lfda/entropy/range_coder.hpp"
#include "testing/oracles.hpp"

namespace lfda {
namespace {

// A table with the given per-symbol counts over [v_min, v_max] + escape.
CdfTable table_from_counts(int32_t v_min,
                           const std::vector<uint32_t>& counts) {
  CdfTable t;
  t.channels = 1;
  t.v_min = {v_min};
  t.v_max = {v_min + int32_t(counts.size()) - 2};
  t.cum.resize(1);
  auto& cum = t.cum[0];
  cum.assign(counts.size() + 1, 0);
  uint64_t sum = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    sum += counts[i];
    cum[i + 1] = uint32_t(sum);
  }
  if (sum != CdfTable::kTotal) throw std::logic_error("bad test table");
  return t;
}

// Uniform table over [-2, 1]: 4 values of 16383 counts + escape of 4.
CdfTable uniform4_table() {
  return table_from_counts(-2, {16383, 16383, 16383, 16383, 4});
}

TEST(RangeCoder, EmptyStreamIsFourBytes) {
  RangeEncoder enc;
  auto bytes = enc.finish();
  EXPECT_EQ(bytes.size(), 4u);
  auto out = range_decode(bytes, uniform4_table(), 0);
  EXPECT_TRUE(out.empty());
}

TEST(RangeCoder, UniformFourSymbolsNearEntropy) {
  // 1000 symbols at ~2 bits each. Budgeted worst case: 2 bits * 1000
  // + tiny model loss (escape slot) + 4 flush bytes = at most 2032 bits.
  auto table = uniform4_table();
  std::mt19937_64 rng(99);
  std::vector<int32_t> values(1000);
  for (auto& v : values) v = int32_t(rng() % 4) - 2;
  auto bytes = range_encode(values, table);
  EXPECT_LE(bytes.size() * 8, 2032u);
  EXPECT_GE(bytes.size() * 8, 2000u);  // can't beat entropy
  auto decoded = range_decode(bytes, table, values.size());
  ASSERT_TRUE(decoded == values);
}

TEST(RangeCoder, SkewedDistributionCompresses) {
  // p(0) ~ 65521/65536: long zero runs cost almost nothing.
  auto table = table_from_counts(-1, {7, 65521, 7, 1});
  std::vector<int32_t> values(10000, 0);
  values[137] = 1;
  values[9000] = -1;
  auto bytes = range_encode(values, table);
  EXPECT_LT(bytes.size(), 40u);  // ~3.3 bits of payload + escapes + flush
  auto decoded = range_decode(bytes, table, values.size());
  ASSERT_TRUE(decoded == values);
}

TEST(RangeCoder, EscapeRoundTrip) {
  auto table = uniform4_table();
  std::vector<int32_t> values = {0, 5000, -2, -32767, 1, 32767, 0, 9};
  auto bytes = range_encode(values, table);
  auto decoded = range_decode(bytes, table, values.size());
  ASSERT_TRUE(decoded == values);
  // Each escape costs ~16 bits of raw payload on top of the escape symbol.
  EXPECT_GT(bytes.size() * 8, 4u * 16);
}

TEST(RangeCoder, MagnitudeOverflowThrows) {
  auto table = uniform4_table();
  std::vector<int32_t> values = {0, 32768};
  EXPECT_THROW(range_encode(values, table), std::invalid_argument);
  values[1] = -32768;
  EXPECT_THROW(range_encode(values, table), std::invalid_argument);
}

TEST(RangeCoder, Raw16IsExactlySixteenBits) {
  // 100 raw values: 100*16 bits + 32 flush bits, no more.
  RangeEncoder enc;
  std::mt19937_64 rng(1);
  std::vector<uint16_t> raws(100);
  for (auto& r : raws) r = uint16_t(rng());
  for (auto r : raws) enc.encode_raw16(r);
  auto bytes = enc.finish();
  EXPECT_EQ(bytes.size(), 100u * 2 + 4);
  RangeDecoder dec(bytes);
  for (auto r : raws) ASSERT_EQ(dec.decode_raw16(), r);
}

TEST(RangeCoder, TruncatedStreamThrows) {
  auto table = uniform4_table();
  std::mt19937_64 rng(5);
  std::vector<int32_t> values(400);
  for (auto& v : values) v = int32_t(rng() % 4) - 2;
  auto bytes = range_encode(values, table);
  Bytes cut(bytes.begin(), bytes.begin() + long(bytes.size()) / 2);
  EXPECT_THROW(range_decode(cut, table, values.size()), std::runtime_error);
  Bytes tiny = {1, 2, 3};
  EXPECT_THROW({ RangeDecoder dec(tiny); }, std::runtime_error);
}

TEST(RangeCoder, ChannelMajorBlocks) {
  // Two channels with disjoint supports; values laid out channel-major.
  CdfTable t;
  t.channels = 2;
  t.v_min = {0, 100};
  t.v_max = {1, 101};
  t.cum = {{0, 30000, 65530, 65536}, {0, 5000, 65500, 65536}};
  std::vector<int32_t> values = {0, 1, 1, 0,          // channel 0
                                 100, 101, 100, 100}; // channel 1
  auto bytes = range_encode(values, t);
  auto decoded = range_decode(bytes, t, values.size());
  ASSERT_TRUE(decoded == values);
  EXPECT_THROW(range_encode({0, 1, 0}, t), std::invalid_argument);
}

TEST(RangeCoder, TenThousandRandomTablesRoundTrip) {
  // The acceptance gate runs this at full scale; keep a smaller smoke copy
  // in the unit suite.
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 500; ++trial) {
    // Random support and random skew.
    int span = 1 + int(rng() % 40);
    int32_t v_min = -int32_t(rng() % 30);
    std::vector<double> mass(size_t(span) + 1);
    double sum = 0;
    for (auto& m : mass) {
      m = std::pow(double(rng() % 1000 + 1) / 1000.0, 3.0);
      sum += m;
    }
    std::vector<uint32_t> counts(mass.size());
    uint64_t csum = 0;
    for (size_t i = 0; i < mass.size(); ++i) {
      counts[i] = uint32_t(std::max<int64_t>(
          1, llround(mass[i] / sum * double(CdfTable::kTotal))));
      csum += counts[i];
    }
    while (csum > CdfTable::kTotal) {  // crude deterministic repair
      size_t big = size_t(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
      uint32_t take =
          uint32_t(std::min<uint64_t>(counts[big] - 1, csum - CdfTable::kTotal));
      counts[big] -= take;
      csum -= take;
    }
    if (csum < CdfTable::kTotal) counts[0] += uint32_t(CdfTable::kTotal - csum);
    auto table = table_from_counts(v_min, counts);

    size_t n = 1 + rng() % 300;
    std::vector<int32_t> values(n);
    for (auto& v : values) {
      if (rng() % 20 == 0) {
        v = int32_t(rng() % 65535) - 32767;  // escape path
      } else {
        v = v_min + int32_t(rng() % size_t(span));
      }
    }
    auto bytes = range_encode(values, table);
    auto decoded = range_decode(bytes, table, n);
    ASSERT_TRUE(decoded == values) << "trial " << trial;
  }
}

TEST(RangeCoder, DecoderConsumesWholeStream) {
  auto table = uniform4_table();
  std::vector<int32_t> values(64, 1);
  auto bytes = range_encode(values, table);
  RangeDecoder dec(bytes);
  for (size_t i = 0; i < values.size(); ++i) {
    auto scaled = dec.decode_scaled();
    const auto& cum = table.cum[0];
    size_t s =
        size_t(std::upper_bound(cum.begin(), cum.end(), scaled) - cum.begin()) -
        1;
    dec.consume(cum[s], cum[s + 1] - cum[s]);
    ASSERT_EQ(table.v_min[0] + int32_t(s), 1);
  }
  EXPECT_LE(dec.consumed(), bytes.size());
}

}  // namespace
}  // namespace lfda
