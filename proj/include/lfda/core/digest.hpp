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
#ifndef LFDA_CORE_DIGEST_HPP_
#define LFDA_CORE_DIGEST_HPP_

#include <cstdint>
#include <cstring>
#include <span>

namespace lfda {

// Incremental FNV-1a (64-bit). Used for the 8-byte model_id binding a
// bitstream to the exact checkpoint that produced it.
class Digest64 {
 public:
  void update(std::span<const uint8_t> bytes) {
    for (uint8_t b : bytes) {
      state_ ^= b;
      state_ *= 0x100000001B3ull;
    }
  }
  void update_f32(const float* values, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      uint32_t bits;
      std::memcpy(&bits, &values[i], 4);
      uint8_t b[4] = {uint8_t(bits), uint8_t(bits >> 8), uint8_t(bits >> 16),
                      uint8_t(bits >> 24)};
      update({b, 4});
    }
  }
  uint64_t value() const { return state_; }

 private:
  uint64_t state_ = 0xCBF29CE484222325ull;
};

}  // namespace lfda

#endif  // LFDA_CORE_DIGEST_HPP_
