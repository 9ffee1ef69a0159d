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
#ifndef LFDA_CORE_BYTES_HPP_
#define LFDA_CORE_BYTES_HPP_

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfda {

using Bytes = std::vector<uint8_t>;

// Little-endian serializer. All multi-byte integers in the container and
// checkpoint formats go through these two classes.
class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) {
    out_.push_back(uint8_t(v));
    out_.push_back(uint8_t(v >> 8));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(uint8_t(v >> (8 * i)));
  }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void f64(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void raw(std::span<const uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void str(const std::string& s) {
    if (s.size() > 0xFFFF) throw std::length_error("string too long");
    u16(uint16_t(s.size()));
    raw({reinterpret_cast<const uint8_t*>(s.data()), s.size()});
  }

  size_t size() const { return out_.size(); }

 private:
  Bytes& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    auto p = take(2);
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
  }
  uint32_t u32() {
    auto p = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    auto p = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    return v;
  }
  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::span<const uint8_t> raw(size_t n) { return take(n); }
  std::string str() {
    size_t n = u16();
    auto p = take(n);
    return std::string(reinterpret_cast<const char*>(p.data()), n);
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const uint8_t> take(size_t n) {
    if (n > remaining()) {
      throw std::out_of_range("byte stream truncated at offset " +
                              std::to_string(pos_));
    }
    auto p = in_.subspan(pos_, n);
    pos_ += n;
    return p;
  }

  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace lfda

#endif  // LFDA_CORE_BYTES_HPP_
