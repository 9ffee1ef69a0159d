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
#ifndef LFDA_ENTROPY_QUANTIZE_HPP_
#define LFDA_ENTROPY_QUANTIZE_HPP_

#include <cmath>
#include <cstdint>

#include "lfda/core/random.hpp"
#include "lfda/core/tensor.hpp"

namespace lfda {

// NOISE adds seeded uniform dither on [-0.5, 0.5) (training rate surrogate);
// ROUND rounds half away from zero (inference); STE rounds forward and the
// caller treats its gradient as identity (training distortion path).
enum class QuantizerMode { kNoise, kRound, kSte };

template <typename T>
Tensor4<T> quantize(const Tensor4<T>& y, QuantizerMode mode,
                    uint64_t seed = 0) {
  Tensor4<T> out(y.d(), y.h(), y.w(), y.c());
  const T* src = y.data();
  T* dst = out.data();
  if (mode == QuantizerMode::kNoise) {
    Rng rng(seed);
    for (size_t i = 0; i < y.size(); ++i) {
      // 53 uniform mantissa bits -> [0,1), shifted to [-0.5, 0.5).
      double u = double(rng() >> 11) * 0x1p-53 - 0.5;
      dst[i] = src[i] + T(u);
    }
  } else {
    for (size_t i = 0; i < y.size(); ++i) dst[i] = std::round(src[i]);
  }
  return out;
}

}  // namespace lfda

#endif  // LFDA_ENTROPY_QUANTIZE_HPP_
