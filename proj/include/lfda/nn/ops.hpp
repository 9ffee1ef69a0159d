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
#ifndef LFDA_NN_OPS_HPP_
#define LFDA_NN_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfda/core/tensor.hpp"

namespace lfda {

// Smooth range limiter y = t * tanh(x / t); identity-like near zero,
// saturates at +-t. Used to bound flow magnitudes and latent symbols.
template <typename T>
Tensor4<T> soft_clamp_forward(const Tensor4<T>& x, T t) {
  Tensor4<T> y(x.d(), x.h(), x.w(), x.c());
  const T* xd = x.data();
  T* yd = y.data();
  for (size_t i = 0; i < x.size(); ++i) yd[i] = t * std::tanh(xd[i] / t);
  return y;
}

template <typename T>
void soft_clamp_backward(const Tensor4<T>& x, T t, const Tensor4<T>& grad_out,
                         Tensor4<T>* grad_in) {
  const T* xd = x.data();
  const T* gd = grad_out.data();
  T* gi = grad_in->data();
  for (size_t i = 0; i < x.size(); ++i) {
    T th = std::tanh(xd[i] / t);
    gi[i] += gd[i] * (T(1) - th * th);
  }
}

// Mean over the depth axis: (d,h,w,c) -> (1,h,w,c).
template <typename T>
Tensor4<T> depth_mean_forward(const Tensor4<T>& x) {
  Tensor4<T> y(1, x.h(), x.w(), x.c());
  const size_t plane = x.h() * x.w() * x.c();
  const T inv = T(1) / T(x.d());
  const T* xd = x.data();
  T* yd = y.data();
  for (size_t i = 0; i < plane; ++i) yd[i] = 0;
  for (size_t d = 0; d < x.d(); ++d) {
    const T* s = xd + d * plane;
    for (size_t i = 0; i < plane; ++i) yd[i] += s[i] * inv;
  }
  return y;
}

template <typename T>
void depth_mean_backward(size_t depth, const Tensor4<T>& grad_out,
                         Tensor4<T>* grad_in) {
  const size_t plane = grad_out.size();
  const T inv = T(1) / T(depth);
  const T* gd = grad_out.data();
  T* gi = grad_in->data();
  for (size_t d = 0; d < depth; ++d) {
    T* s = gi + d * plane;
    for (size_t i = 0; i < plane; ++i) s[i] += gd[i] * inv;
  }
}

// Edge-replicate pad to the target size (grow-only).
template <typename T>
Image<T> replicate_pad(const Image<T>& img, size_t target_h, size_t target_w) {
  if (target_h < img.h() || target_w < img.w()) {
    throw std::invalid_argument("replicate_pad target smaller than image");
  }
  Image<T> out(target_h, target_w, img.c());
  for (size_t y = 0; y < target_h; ++y) {
    size_t sy = std::min(y, img.h() - 1);
    for (size_t x = 0; x < target_w; ++x) {
      size_t sx = std::min(x, img.w() - 1);
      for (size_t c = 0; c < img.c(); ++c) out(y, x, c) = img(sy, sx, c);
    }
  }
  return out;
}

template <typename T>
Image<T> crop_image(const Image<T>& img, size_t h, size_t w) {
  if (h > img.h() || w > img.w()) {
    throw std::invalid_argument("crop_image target larger than image");
  }
  Image<T> out(h, w, img.c());
  for (size_t y = 0; y < h; ++y) {
    for (size_t x = 0; x < w; ++x) {
      for (size_t c = 0; c < img.c(); ++c) out(y, x, c) = img(y, x, c);
    }
  }
  return out;
}

inline size_t round_up(size_t n, size_t multiple) {
  return (n + multiple - 1) / multiple * multiple;
}

}  // namespace lfda

#endif  // LFDA_NN_OPS_HPP_
