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
#ifndef LFDA_ENTROPY_PRIOR_HPP_
#define LFDA_ENTROPY_PRIOR_HPP_

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfda/core/random.hpp"
#include "lfda/core/tensor.hpp"

namespace lfda {

// Fully factorized learned prior. Each channel carries an independent
// univariate CDF c(v) = sigmoid(L(v)) where L is a small monotone network:
// four affine stages of width (1,3,3,3,1) with softplus-positive matrices and
// tanh gating between stages. Probability mass of the integer bin at v is
// c(v+0.5) - c(v-0.5), floored at kLikelihoodFloor.
template <typename T>
struct FactorizedPrior {
  static constexpr int kStages = 4;
  static constexpr std::array<int, kStages + 1> kDims = {1, 3, 3, 3, 1};
  static constexpr T kLikelihoodFloor = T(1e-9);

  int channels = 0;
  // Stage k: matrix_raw [channels][kDims[k+1]][kDims[k]] (softplus applied),
  // bias [channels][kDims[k+1]], factor_raw [channels][kDims[k+1]] (tanh
  // applied; absent on the last stage).
  std::array<std::vector<T>, kStages> matrix_raw;
  std::array<std::vector<T>, kStages> bias;
  std::array<std::vector<T>, kStages - 1> factor_raw;
};

template <typename T>
FactorizedPrior<T> make_prior(int channels, Rng& rng) {
  FactorizedPrior<T> p;
  p.channels = channels;
  const auto& dims = FactorizedPrior<T>::kDims;
  // Spreads the initial CDF over roughly [-10, 10] so early training sees
  // informative gradients across the whole latent range.
  const double scale = std::pow(10.0, 1.0 / FactorizedPrior<T>::kStages);
  for (int k = 0; k < FactorizedPrior<T>::kStages; ++k) {
    const int r_in = dims[size_t(k)];
    const int r_out = dims[size_t(k) + 1];
    const double init = std::log(std::expm1(1.0 / scale / r_out));
    p.matrix_raw[size_t(k)].assign(size_t(channels) * r_out * r_in, T(init));
    p.bias[size_t(k)].resize(size_t(channels) * r_out);
    for (auto& b : p.bias[size_t(k)]) {
      b = T((double(rng() >> 11) * 0x1p-53) - 0.5);
    }
    if (k < FactorizedPrior<T>::kStages - 1) {
      p.factor_raw[size_t(k)].assign(size_t(channels) * r_out, T(0));
    }
  }
  return p;
}

template <typename T>
FactorizedPrior<T> zeros_like(const FactorizedPrior<T>& p) {
  FactorizedPrior<T> g = p;
  for (auto& v : g.matrix_raw) std::fill(v.begin(), v.end(), T(0));
  for (auto& v : g.bias) std::fill(v.begin(), v.end(), T(0));
  for (auto& v : g.factor_raw) std::fill(v.begin(), v.end(), T(0));
  return g;
}

template <typename T, typename F>
void visit_params(FactorizedPrior<T>& p, F&& f) {
  for (auto& v : p.matrix_raw) f(v);
  for (auto& v : p.bias) f(v);
  for (auto& v : p.factor_raw) f(v);
}

namespace detail {

template <typename T>
T softplus(T x) {
  // log(1 + e^x), overflow-safe.
  if (x > T(30)) return x;
  return std::log1p(std::exp(x));
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) {
    T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  T e = std::exp(x);
  return e / (T(1) + e);
}

// One logit evaluation with optional tape for the backward pass. Work
// vectors are at most width 3; everything runs on the stack.
template <typename T>
struct PriorTape {
  // Per stage: pre-gate linear outputs and stage inputs.
  std::array<std::array<T, 3>, FactorizedPrior<T>::kStages> lin;
  std::array<std::array<T, 3>, FactorizedPrior<T>::kStages> in;
};

template <typename T>
T prior_logit(const FactorizedPrior<T>& p, int ch, T v,
              PriorTape<T>* tape = nullptr) {
  const auto& dims = FactorizedPrior<T>::kDims;
  std::array<T, 3> cur = {v, 0, 0};
  int cur_n = 1;
  for (int k = 0; k < FactorizedPrior<T>::kStages; ++k) {
    const int r_in = dims[size_t(k)];
    const int r_out = dims[size_t(k) + 1];
    const T* M = p.matrix_raw[size_t(k)].data() + size_t(ch) * r_out * r_in;
    const T* b = p.bias[size_t(k)].data() + size_t(ch) * r_out;
    std::array<T, 3> next = {0, 0, 0};
    if (tape) {
      for (int i = 0; i < r_in; ++i) tape->in[size_t(k)][size_t(i)] = cur[size_t(i)];
    }
    for (int i = 0; i < r_out; ++i) {
      T acc = b[i];
      for (int j = 0; j < r_in; ++j) {
        acc += softplus(M[i * r_in + j]) * cur[size_t(j)];
      }
      if (tape) tape->lin[size_t(k)][size_t(i)] = acc;
      if (k < FactorizedPrior<T>::kStages - 1) {
        const T* a = p.factor_raw[size_t(k)].data() + size_t(ch) * r_out;
        acc += std::tanh(a[i]) * std::tanh(acc);
      }
      next[size_t(i)] = acc;
    }
    cur = next;
    cur_n = r_out;
  }
  (void)cur_n;
  return cur[0];
}

// Backpropagates d(logit)/d(everything): scale * dlogit flows into the
// parameter gradient buffers and the returned value is d(logit)/dv * scale.
template <typename T>
T prior_logit_backward(const FactorizedPrior<T>& p, int ch,
                       const PriorTape<T>& tape, T scale,
                       FactorizedPrior<T>* grads) {
  const auto& dims = FactorizedPrior<T>::kDims;
  std::array<T, 3> g = {scale, 0, 0};
  for (int k = FactorizedPrior<T>::kStages - 1; k >= 0; --k) {
    const int r_in = dims[size_t(k)];
    const int r_out = dims[size_t(k) + 1];
    const T* M = p.matrix_raw[size_t(k)].data() + size_t(ch) * r_out * r_in;
    std::array<T, 3> glin = {0, 0, 0};
    for (int i = 0; i < r_out; ++i) {
      T go = g[size_t(i)];
      if (k < FactorizedPrior<T>::kStages - 1) {
        const T* a = p.factor_raw[size_t(k)].data() + size_t(ch) * r_out;
        T ta = std::tanh(a[i]);
        T tl = std::tanh(tape.lin[size_t(k)][size_t(i)]);
        if (grads) {
          grads->factor_raw[size_t(k)][size_t(ch) * r_out + size_t(i)] +=
              go * tl * (T(1) - ta * ta);
        }
        glin[size_t(i)] = go * (T(1) + ta * (T(1) - tl * tl));
      } else {
        glin[size_t(i)] = go;
      }
    }
    std::array<T, 3> gin = {0, 0, 0};
    for (int i = 0; i < r_out; ++i) {
      if (grads) {
        grads->bias[size_t(k)][size_t(ch) * r_out + size_t(i)] +=
            glin[size_t(i)];
      }
      for (int j = 0; j < r_in; ++j) {
        T raw = M[i * r_in + j];
        T w = softplus(raw);
        if (grads) {
          // d softplus / d raw = sigmoid(raw).
          grads->matrix_raw[size_t(k)][size_t(ch) * r_out * r_in +
                                       size_t(i) * r_in + size_t(j)] +=
              glin[size_t(i)] * tape.in[size_t(k)][size_t(j)] * sigmoid(raw);
        }
        gin[size_t(j)] += glin[size_t(i)] * w;
      }
    }
    g = gin;
  }
  return g[0];
}

}  // namespace detail

template <typename T>
T prior_cdf(const FactorizedPrior<T>& p, int ch, T v) {
  return detail::sigmoid(detail::prior_logit(p, ch, v));
}

// Bin mass c(v+0.5) - c(v-0.5), evaluated with the sign trick so the
// difference stays accurate deep in either tail, then floored.
template <typename T>
T prior_likelihood(const FactorizedPrior<T>& p, int ch, T v) {
  T lo = detail::prior_logit(p, ch, v - T(0.5));
  T hi = detail::prior_logit(p, ch, v + T(0.5));
  T sign = (lo + hi) > T(0) ? T(-1) : T(1);
  T raw = std::abs(detail::sigmoid(sign * hi) - detail::sigmoid(sign * lo));
  return std::max(raw, FactorizedPrior<T>::kLikelihoodFloor);
}

// Returns the floored likelihood and accumulates gradients of
// `outer_scale * likelihood` into *grad_v and prior-shaped grads. Where the
// floor is active the raw-likelihood gradient is still propagated (the rate
// loss always pushes likelihood upward, so pass-through is the right policy).
template <typename T>
T prior_likelihood_backward(const FactorizedPrior<T>& p, int ch, T v,
                            T outer_scale, T* grad_v,
                            FactorizedPrior<T>* grads) {
  detail::PriorTape<T> tape_lo, tape_hi;
  T lo = detail::prior_logit(p, ch, v - T(0.5), &tape_lo);
  T hi = detail::prior_logit(p, ch, v + T(0.5), &tape_hi);
  T s_lo = detail::sigmoid(lo);
  T s_hi = detail::sigmoid(hi);
  T sign = (lo + hi) > T(0) ? T(-1) : T(1);
  T raw = std::abs(detail::sigmoid(sign * hi) - detail::sigmoid(sign * lo));
  // d p / d hi = sigmoid'(hi), d p / d lo = -sigmoid'(lo).
  T d_hi = s_hi * (T(1) - s_hi);
  T d_lo = s_lo * (T(1) - s_lo);
  T gv = T(0);
  gv += detail::prior_logit_backward(p, ch, tape_hi, outer_scale * d_hi, grads);
  gv += detail::prior_logit_backward(p, ch, tape_lo, -outer_scale * d_lo, grads);
  if (grad_v) *grad_v += gv;
  return std::max(raw, FactorizedPrior<T>::kLikelihoodFloor);
}

// -sum log2 likelihood over a tensor whose channel axis matches the prior.
template <typename T>
T estimate_rate_bits(const Tensor4<T>& v, const FactorizedPrior<T>& p) {
  if (v.c() != size_t(p.channels)) {
    throw std::invalid_argument("prior channel mismatch");
  }
  const T* d = v.data();
  const size_t C = v.c();
  double bits = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    bits -= std::log2(double(prior_likelihood(p, int(i % C), d[i])));
  }
  return T(bits);
}

// Gradient version: accumulates d(rate)/dv into grad_v (same shape) and
// parameter gradients into grads; returns the rate in bits.
template <typename T>
T estimate_rate_bits_backward(const Tensor4<T>& v, const FactorizedPrior<T>& p,
                              T outer_scale, Tensor4<T>* grad_v,
                              FactorizedPrior<T>* grads) {
  const T* d = v.data();
  T* gv = grad_v ? grad_v->data() : nullptr;
  const size_t C = v.c();
  const T inv_ln2 = T(1) / std::log(T(2));
  double bits = 0;
  detail::PriorTape<T> tape_lo, tape_hi;
  for (size_t i = 0; i < v.size(); ++i) {
    int ch = int(i % C);
    T lo = detail::prior_logit(p, ch, d[i] - T(0.5), &tape_lo);
    T hi = detail::prior_logit(p, ch, d[i] + T(0.5), &tape_hi);
    T s_lo = detail::sigmoid(lo);
    T s_hi = detail::sigmoid(hi);
    T sign = (lo + hi) > T(0) ? T(-1) : T(1);
    T raw = std::abs(detail::sigmoid(sign * hi) - detail::sigmoid(sign * lo));
    T p_i = std::max(raw, FactorizedPrior<T>::kLikelihoodFloor);
    // rate_i = -log2(p_i): d rate / d p = -1 / (p ln 2).
    T coeff = -outer_scale * inv_ln2 / p_i;
    T gvi = detail::prior_logit_backward(p, ch, tape_hi,
                                         coeff * s_hi * (T(1) - s_hi), grads);
    gvi += detail::prior_logit_backward(p, ch, tape_lo,
                                        -coeff * s_lo * (T(1) - s_lo), grads);
    if (gv) gv[i] += gvi;
    bits -= std::log2(double(p_i));
  }
  return T(bits);
}

}  // namespace lfda

#endif  // LFDA_ENTROPY_PRIOR_HPP_
