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
#ifndef LFDA_CORE_RANDOM_HPP_
#define LFDA_CORE_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace lfda {

using Rng = std::mt19937_64;

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}
}  // namespace detail

// Derives independent, reproducible substream seeds from a base seed and up
// to three counters. All stochastic components (patch shuffling, quantizer
// noise, initialization) key their RNG this way, which is what makes
// checkpoint resume replay the identical sequence without serializing
// generator state.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0,
                            uint64_t c = 0) {
  uint64_t s = detail::splitmix64(base ^ 0x5851F42D4C957F2Dull);
  s = detail::splitmix64(s ^ a);
  s = detail::splitmix64(s ^ b);
  s = detail::splitmix64(s ^ c);
  return s;
}

}  // namespace lfda

#endif  // LFDA_CORE_RANDOM_HPP_
