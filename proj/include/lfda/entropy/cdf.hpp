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
#ifndef LFDA_ENTROPY_CDF_HPP_
#define LFDA_ENTROPY_CDF_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lfda/core/tensor.hpp"
#include "lfda/entropy/prior.hpp"

namespace lfda {

// Frozen per-channel histogram for range coding: integer support
// [v_min, v_max] plus one escape symbol (raw-bypass path for out-of-support
// values). Cumulative counts at 16-bit precision; every symbol, escape
// included, holds count >= 1 and the totals are exactly 2^16. Tables are
// rebuilt from the checkpoint, never serialized into bitstreams.
struct CdfTable {
  static constexpr uint32_t kTotal = 1u << 16;
  static constexpr double kTailMass = 1e-4;

  int channels = 0;
  std::vector<int32_t> v_min;
  std::vector<int32_t> v_max;
  std::vector<std::vector<uint32_t>> cum;  // per channel, size nsym+1

  int num_symbols(int ch) const { return int(cum[size_t(ch)].size()) - 1; }
  int escape_symbol(int ch) const { return num_symbols(ch) - 1; }
};

// Builds a table from any per-channel CDF evaluator `cdf(ch, x) -> double`
// (monotone in x, limits 0 and 1). Support bounds come from a two-sided
// tail_mass/2 quantile search over the signed 16-bit alphabet.
template <typename CdfFn>
CdfTable build_cdf_table_from(int channels, CdfFn&& cdf,
                              double tail_mass = CdfTable::kTailMass) {
  constexpr int32_t kLo = -32767;
  constexpr int32_t kHi = 32767;
  CdfTable t;
  t.channels = channels;
  t.v_min.resize(size_t(channels));
  t.v_max.resize(size_t(channels));
  t.cum.resize(size_t(channels));
  for (int ch = 0; ch < channels; ++ch) {
    const double half_tail = tail_mass / 2;
    // Largest v with mass below the bin's left edge <= tail/2.
    int32_t lo = kLo, hi = kHi, v_min = kLo;
    while (lo <= hi) {
      int32_t mid = lo + (hi - lo) / 2;
      if (cdf(ch, double(mid) - 0.5) <= half_tail) {
        v_min = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    // Smallest v with mass above the bin's right edge <= tail/2.
    lo = kLo, hi = kHi;
    int32_t v_max = kHi;
    while (lo <= hi) {
      int32_t mid = lo + (hi - lo) / 2;
      if (1.0 - cdf(ch, double(mid) + 0.5) <= half_tail) {
        v_max = mid;
        hi = mid - 1;
      } else {
        lo = mid + 1;
      }
    }
    if (v_max < v_min) std::swap(v_min, v_max);
    t.v_min[size_t(ch)] = v_min;
    t.v_max[size_t(ch)] = v_max;

    const size_t span = size_t(v_max - v_min + 1);
    std::vector<double> mass(span + 1, 0.0);  // +1 escape
    double in_support = 0;
    for (size_t i = 0; i < span; ++i) {
      double v = double(v_min + int32_t(i));
      mass[i] = std::max(0.0, cdf(ch, v + 0.5) - cdf(ch, v - 0.5));
      in_support += mass[i];
    }
    mass[span] = std::max(0.0, 1.0 - in_support);

    std::vector<uint32_t> counts(span + 1);
    uint64_t sum = 0;
    for (size_t i = 0; i <= span; ++i) {
      counts[i] = uint32_t(std::max<int64_t>(
          1, llround(mass[i] * double(CdfTable::kTotal))));
      sum += counts[i];
    }
    // Deterministic repair to an exact 2^16 total: spend the difference on
    // the currently largest count (first index on ties).
    while (sum != CdfTable::kTotal) {
      size_t big = size_t(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
      if (sum < CdfTable::kTotal) {
        counts[big] += uint32_t(CdfTable::kTotal - sum);
        sum = CdfTable::kTotal;
      } else {
        uint32_t take = uint32_t(
            std::min<uint64_t>(counts[big] - 1, sum - CdfTable::kTotal));
        if (take == 0) {
          throw std::runtime_error("cdf table: support too large for 16-bit");
        }
        counts[big] -= take;
        sum -= take;
      }
    }
    auto& cum = t.cum[size_t(ch)];
    cum.assign(span + 2, 0);
    for (size_t i = 0; i <= span; ++i) cum[i + 1] = cum[i] + counts[i];
  }
  return t;
}

template <typename T>
CdfTable build_cdf_table(const FactorizedPrior<T>& prior,
                         double tail_mass = CdfTable::kTailMass) {
  return build_cdf_table_from(
      prior.channels,
      [&prior](int ch, double x) { return double(prior_cdf(prior, ch, T(x))); },
      tail_mass);
}

// Coding order: channel-major, then depth, height, width.
template <typename T>
std::vector<int32_t> flatten_channel_major(const Tensor4<T>& q) {
  std::vector<int32_t> out;
  out.reserve(q.size());
  for (size_t c = 0; c < q.c(); ++c) {
    for (size_t d = 0; d < q.d(); ++d) {
      for (size_t h = 0; h < q.h(); ++h) {
        for (size_t w = 0; w < q.w(); ++w) {
          out.push_back(int32_t(std::lround(double(q(d, h, w, c)))));
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> unflatten_channel_major(const std::vector<int32_t>& v, size_t d,
                                   size_t h, size_t w, size_t c) {
  if (v.size() != d * h * w * c) {
    throw std::invalid_argument("unflatten size mismatch");
  }
  Tensor4<T> out(d, h, w, c);
  size_t i = 0;
  for (size_t cc = 0; cc < c; ++cc) {
    for (size_t dd = 0; dd < d; ++dd) {
      for (size_t hh = 0; hh < h; ++hh) {
        for (size_t ww = 0; ww < w; ++ww) {
          out(dd, hh, ww, cc) = T(v[i++]);
        }
      }
    }
  }
  return out;
}

}  // namespace lfda

#endif  // LFDA_ENTROPY_CDF_HPP_
