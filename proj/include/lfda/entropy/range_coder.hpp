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
#ifndef LFDA_ENTROPY_RANGE_CODER_HPP_
#define LFDA_ENTROPY_RANGE_CODER_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lfda/core/bytes.hpp"
#include "lfda/entropy/cdf.hpp"

namespace lfda {

// 32-bit renormalizing range coder, 16-bit probability precision. Carries
// propagate back into already-emitted bytes; flush is always exactly four
// bytes, so the empty message costs 4 bytes.
class RangeEncoder {
 public:
  static constexpr uint32_t kTopBits = 24;
  static constexpr uint32_t kPrecision = 16;

  // Appends the interval [cum, cum+freq) / 2^16. The top interval is widened
  // to absorb the truncation remainder of range / 2^16.
  void encode(uint32_t cum, uint32_t freq) {
    const uint32_t r = range_ >> kPrecision;
    low_ += uint64_t(r) * cum;
    if (low_ >> 32) {
      propagate_carry();
      low_ &= 0xFFFFFFFFull;
    }
    if (cum + freq == (1u << kPrecision)) {
      range_ -= r * cum;
    } else {
      range_ = r * freq;
    }
    while (range_ < (1u << kTopBits)) {
      buf_.push_back(uint8_t(low_ >> 24));
      low_ = (low_ << 8) & 0xFFFFFFFFull;
      range_ <<= 8;
    }
  }

  // Raw 16-bit value: a frequency-1 slot, exactly 16 bits of payload.
  void encode_raw16(uint16_t v) { encode(v, 1); }

  std::vector<uint8_t> finish() {
    for (int i = 0; i < 4; ++i) {
      buf_.push_back(uint8_t(low_ >> 24));
      low_ = (low_ << 8) & 0xFFFFFFFFull;
    }
    return std::move(buf_);
  }

 private:
  void propagate_carry() {
    size_t i = buf_.size();
    while (i-- > 0) {
      if (++buf_[i] != 0) return;
    }
    throw std::logic_error("range encoder carry out of stream");
  }

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  std::vector<uint8_t> buf_;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* data, size_t size) : data_(data), size_(size) {
    if (size_ < 4) throw std::runtime_error("range stream shorter than flush");
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | data_[pos_++];
  }
  explicit RangeDecoder(const std::vector<uint8_t>& bytes)
      : RangeDecoder(bytes.data(), bytes.size()) {}

  // Cumulative-count coordinate of the pending symbol in [0, 2^16).
  uint32_t decode_scaled() {
    const uint32_t r = range_ >> RangeEncoder::kPrecision;
    uint32_t scaled = (code_ - low_) / r;  // modular difference handles carry
    if (scaled > 0xFFFF) scaled = 0xFFFF;
    return scaled;
  }

  // Must mirror the encoder call for the symbol located via decode_scaled.
  void consume(uint32_t cum, uint32_t freq) {
    const uint32_t r = range_ >> RangeEncoder::kPrecision;
    low_ += r * cum;
    if (cum + freq == (1u << RangeEncoder::kPrecision)) {
      range_ -= r * cum;
    } else {
      range_ = r * freq;
    }
    while (range_ < (1u << RangeEncoder::kTopBits)) {
      if (pos_ >= size_) {
        throw std::runtime_error("range decoder underflow: truncated stream");
      }
      code_ = (code_ << 8) | data_[pos_++];
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  uint16_t decode_raw16() {
    uint32_t v = decode_scaled();
    consume(v, 1);
    return uint16_t(v);
  }

  size_t consumed() const { return pos_; }

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  uint32_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Encodes integer values laid out as `table.channels` equal channel-major
// blocks. In-support values use the learned histogram; outliers cost an
// escape plus 16 raw bits. Magnitudes above 32767 are a caller bug: the
// transforms bound latents well inside the alphabet.
inline std::vector<uint8_t> range_encode(const std::vector<int32_t>& values,
                                         const CdfTable& table) {
  if (table.channels <= 0 || values.size() % size_t(table.channels) != 0) {
    throw std::invalid_argument("range_encode: size not channel-divisible");
  }
  const size_t per_ch = values.size() / size_t(table.channels);
  RangeEncoder enc;
  for (size_t i = 0; i < values.size(); ++i) {
    const int ch = per_ch ? int(i / per_ch) : 0;
    const int32_t v = values[i];
    if (v < -32767 || v > 32767) {
      throw std::invalid_argument("range_encode: symbol magnitude > 32767");
    }
    const auto& cum = table.cum[size_t(ch)];
    if (v >= table.v_min[size_t(ch)] && v <= table.v_max[size_t(ch)]) {
      const size_t s = size_t(v - table.v_min[size_t(ch)]);
      enc.encode(cum[s], cum[s + 1] - cum[s]);
    } else {
      const size_t esc = size_t(table.escape_symbol(ch));
      enc.encode(cum[esc], cum[esc + 1] - cum[esc]);
      enc.encode_raw16(uint16_t(v + 32768));
    }
  }
  return enc.finish();
}

inline std::vector<int32_t> range_decode(const std::vector<uint8_t>& bytes,
                                         const CdfTable& table, size_t n) {
  if (table.channels <= 0 || n % size_t(table.channels) != 0) {
    throw std::invalid_argument("range_decode: size not channel-divisible");
  }
  const size_t per_ch = n / size_t(table.channels);
  RangeDecoder dec(bytes);
  std::vector<int32_t> out(n);
  for (size_t i = 0; i < n; ++i) {
    const int ch = per_ch ? int(i / per_ch) : 0;
    const auto& cum = table.cum[size_t(ch)];
    const uint32_t scaled = dec.decode_scaled();
    // Last entry of cum is 2^16 > scaled, so upper_bound stays in range.
    size_t s =
        size_t(std::upper_bound(cum.begin(), cum.end(), scaled) - cum.begin()) -
        1;
    dec.consume(cum[s], cum[s + 1] - cum[s]);
    if (int(s) == table.escape_symbol(ch)) {
      out[i] = int32_t(dec.decode_raw16()) - 32768;
    } else {
      out[i] = table.v_min[size_t(ch)] + int32_t(s);
    }
  }
  return out;
}

}  // namespace lfda

#endif  // LFDA_ENTROPY_RANGE_CODER_HPP_
