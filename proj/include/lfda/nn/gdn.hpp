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
#ifndef LFDA_NN_GDN_HPP_
#define LFDA_NN_GDN_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfda/core/tensor.hpp"

namespace lfda {

// Generalized divisive normalization across channels:
//   y_i = x_i / sqrt(beta_i + sum_j gamma_ij * x_j^2)
// The inverse flavor multiplies by the same root instead of dividing.
// beta/gamma are stored through a square reparameterization so the effective
// values stay positive under unconstrained gradient steps:
//   beta = beta_raw^2 + kBetaFloor, gamma = gamma_raw^2.
template <typename T>
struct GdnLayer {
  static constexpr T kBetaFloor = T(1e-6);

  bool inverse = false;
  int channels = 0;
  std::vector<T> beta_raw;   // [channels]
  std::vector<T> gamma_raw;  // [channels][channels], row = output channel
};

template <typename T>
GdnLayer<T> make_gdn(int channels, bool inverse) {
  GdnLayer<T> l;
  l.inverse = inverse;
  l.channels = channels;
  l.beta_raw.assign(size_t(channels),
                    std::sqrt(T(1) - GdnLayer<T>::kBetaFloor));
  l.gamma_raw.assign(size_t(channels) * channels, T(0));
  for (int i = 0; i < channels; ++i) {
    l.gamma_raw[size_t(i) * channels + i] = std::sqrt(T(0.1));
  }
  return l;
}

// Pooled denominators S (positions x channels) reused by the backward pass.
template <typename T>
struct GdnCache {
  std::vector<T> s;
};

namespace detail {

template <typename T>
using GdnMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
void gdn_pool(const Tensor4<T>& x, const GdnLayer<T>& layer,
              std::vector<T>& x2, std::vector<T>& s) {
  const long C = layer.channels;
  const long n = long(x.size()) / C;
  x2.resize(x.size());
  s.resize(x.size());
  const T* xd = x.data();
  for (size_t i = 0; i < x.size(); ++i) x2[i] = xd[i] * xd[i];
  GdnMat<T> gamma(C, C);
  for (long i = 0; i < C; ++i) {
    for (long j = 0; j < C; ++j) {
      T raw = layer.gamma_raw[size_t(i) * C + j];
      gamma(i, j) = raw * raw;
    }
  }
  Eigen::Map<const GdnMat<T>> x2m(x2.data(), n, C);
  Eigen::Map<GdnMat<T>> sm(s.data(), n, C);
  sm.noalias() = x2m * gamma.transpose();
  for (long i = 0; i < C; ++i) {
    T raw = layer.beta_raw[size_t(i)];
    sm.col(i).array() += raw * raw + GdnLayer<T>::kBetaFloor;
  }
}

}  // namespace detail

template <typename T>
Tensor4<T> gdn_forward(const Tensor4<T>& x, const GdnLayer<T>& layer,
                       GdnCache<T>* cache = nullptr) {
  if (x.c() != size_t(layer.channels)) {
    throw std::invalid_argument("gdn channel mismatch");
  }
  std::vector<T> x2;
  std::vector<T> s_local;
  std::vector<T>& s = cache ? cache->s : s_local;
  detail::gdn_pool(x, layer, x2, s);
  Tensor4<T> y(x.d(), x.h(), x.w(), x.c());
  const T* xd = x.data();
  T* yd = y.data();
  if (layer.inverse) {
    for (size_t i = 0; i < x.size(); ++i) yd[i] = xd[i] * std::sqrt(s[i]);
  } else {
    for (size_t i = 0; i < x.size(); ++i) yd[i] = xd[i] / std::sqrt(s[i]);
  }
  return y;
}

// Accumulates into grad_in / grad_beta_raw / grad_gamma_raw (any may be
// null). `cache` must come from the forward call on the same x.
template <typename T>
void gdn_backward(const Tensor4<T>& x, const GdnLayer<T>& layer,
                  const GdnCache<T>& cache, const Tensor4<T>& grad_out,
                  Tensor4<T>* grad_in, std::vector<T>* grad_beta_raw,
                  std::vector<T>* grad_gamma_raw) {
  using detail::GdnMat;
  const long C = layer.channels;
  const long n = long(x.size()) / C;
  const T* xd = x.data();
  const T* gd = grad_out.data();
  const std::vector<T>& s = cache.s;

  // t[p,i]: shared factor g*x*S^(-3/2) for GDN, g*x*S^(-1/2) for IGDN.
  std::vector<T> t(x.size());
  if (layer.inverse) {
    for (size_t i = 0; i < x.size(); ++i) t[i] = gd[i] * xd[i] / std::sqrt(s[i]);
  } else {
    for (size_t i = 0; i < x.size(); ++i) {
      T r = T(1) / std::sqrt(s[i]);
      t[i] = gd[i] * xd[i] * r * r * r;
    }
  }

  GdnMat<T> gamma(C, C);
  for (long i = 0; i < C; ++i) {
    for (long j = 0; j < C; ++j) {
      T raw = layer.gamma_raw[size_t(i) * C + j];
      gamma(i, j) = raw * raw;
    }
  }
  Eigen::Map<const GdnMat<T>> tm(t.data(), n, C);

  if (grad_in) {
    GdnMat<T> tg(n, C);  // (t * Gamma)[p,m] = sum_i t[p,i] gamma_im
    tg.noalias() = tm * gamma;
    T* gi = grad_in->data();
    const T sgn = layer.inverse ? T(1) : T(-1);
    for (long p = 0; p < n; ++p) {
      for (long c = 0; c < C; ++c) {
        size_t i = size_t(p) * C + c;
        T root = std::sqrt(s[i]);
        T direct = layer.inverse ? gd[i] * root : gd[i] / root;
        gi[i] += direct + sgn * xd[i] * tg(p, c);
      }
    }
  }

  const T half = layer.inverse ? T(0.5) : T(-0.5);
  if (grad_beta_raw) {
    for (long c = 0; c < C; ++c) {
      T acc = 0;
      for (long p = 0; p < n; ++p) acc += t[size_t(p) * C + c];
      // d beta / d beta_raw = 2 * beta_raw.
      (*grad_beta_raw)[size_t(c)] += half * acc * 2 * layer.beta_raw[size_t(c)];
    }
  }
  if (grad_gamma_raw) {
    std::vector<T> x2(x.size());
    for (size_t i = 0; i < x.size(); ++i) x2[i] = xd[i] * xd[i];
    Eigen::Map<const GdnMat<T>> x2m(x2.data(), n, C);
    GdnMat<T> gg(C, C);
    gg.noalias() = tm.transpose() * x2m;
    for (long i = 0; i < C; ++i) {
      for (long j = 0; j < C; ++j) {
        size_t idx = size_t(i) * C + j;
        (*grad_gamma_raw)[idx] +=
            half * gg(i, j) * 2 * layer.gamma_raw[idx];
      }
    }
  }
}

}  // namespace lfda

#endif  // LFDA_NN_GDN_HPP_
