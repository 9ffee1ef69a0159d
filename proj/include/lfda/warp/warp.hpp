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
#ifndef LFDA_WARP_WARP_HPP_
#define LFDA_WARP_WARP_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfda/core/tensor.hpp"

namespace lfda {

// Backward bilinear warp with clamp-to-edge sampling:
//   out(s, t) = image(s + dy(s,t), t + dx(s,t))
// flow has 2 channels, (dx, dy) in pixels. Outside the frame the sample is
// the nearest border texel (the map is piecewise linear, then constant).
// Coordinates and blend weights run in double regardless of T: fractional
// parts of single-precision coordinates at magnitude ~10^2 carry ~1e-6 of
// rounding, which would land verbatim in the output.
template <typename T>
Image<T> bilinear_warp(const Image<T>& image, const Image<T>& flow) {
  if (flow.h() != image.h() || flow.w() != image.w() || flow.c() != 2) {
    throw std::invalid_argument("bilinear_warp: flow must be h x w x 2");
  }
  const long h = long(image.h()), w = long(image.w());
  const size_t C = image.c();
  Image<T> out(image.h(), image.w(), C);
  for (long s = 0; s < h; ++s) {
    for (long t = 0; t < w; ++t) {
      double y = std::clamp(double(s) + double(flow(size_t(s), size_t(t), 1)),
                            0.0, double(h - 1));
      double x = std::clamp(double(t) + double(flow(size_t(s), size_t(t), 0)),
                            0.0, double(w - 1));
      long y0 = long(std::floor(y)), x0 = long(std::floor(x));
      long y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
      double fy = y - double(y0), fx = x - double(x0);
      for (size_t c = 0; c < C; ++c) {
        double v00 = double(image(size_t(y0), size_t(x0), c));
        double v01 = double(image(size_t(y0), size_t(x1), c));
        double v10 = double(image(size_t(y1), size_t(x0), c));
        double v11 = double(image(size_t(y1), size_t(x1), c));
        out(size_t(s), size_t(t), c) =
            T((1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
              fy * ((1.0 - fx) * v10 + fx * v11));
      }
    }
  }
  return out;
}

// Accumulates gradients w.r.t. the source image and the flow. At border
// clamps the flow gradient vanishes (the sampled value is constant there),
// which falls out of the tap differences below.
template <typename T>
void bilinear_warp_backward(const Image<T>& image, const Image<T>& flow,
                            const Image<T>& grad_out, Image<T>* grad_image,
                            Image<T>* grad_flow) {
  const long h = long(image.h()), w = long(image.w());
  const size_t C = image.c();
  for (long s = 0; s < h; ++s) {
    for (long t = 0; t < w; ++t) {
      double yr = double(s) + double(flow(size_t(s), size_t(t), 1));
      double xr = double(t) + double(flow(size_t(s), size_t(t), 0));
      bool y_in = yr > 0.0 && yr < double(h - 1);
      bool x_in = xr > 0.0 && xr < double(w - 1);
      double y = std::clamp(yr, 0.0, double(h - 1));
      double x = std::clamp(xr, 0.0, double(w - 1));
      long y0 = long(std::floor(y)), x0 = long(std::floor(x));
      long y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
      double fy = y - double(y0), fx = x - double(x0);
      double gdx = 0, gdy = 0;
      for (size_t c = 0; c < C; ++c) {
        double g = double(grad_out(size_t(s), size_t(t), c));
        double v00 = double(image(size_t(y0), size_t(x0), c));
        double v01 = double(image(size_t(y0), size_t(x1), c));
        double v10 = double(image(size_t(y1), size_t(x0), c));
        double v11 = double(image(size_t(y1), size_t(x1), c));
        if (grad_image) {
          (*grad_image)(size_t(y0), size_t(x0), c) +=
              T(g * (1.0 - fy) * (1.0 - fx));
          (*grad_image)(size_t(y0), size_t(x1), c) += T(g * (1.0 - fy) * fx);
          (*grad_image)(size_t(y1), size_t(x0), c) += T(g * fy * (1.0 - fx));
          (*grad_image)(size_t(y1), size_t(x1), c) += T(g * fy * fx);
        }
        if (x_in) gdx += g * ((1.0 - fy) * (v01 - v00) + fy * (v11 - v10));
        if (y_in) gdy += g * ((1.0 - fx) * (v10 - v00) + fx * (v11 - v01));
      }
      if (grad_flow) {
        (*grad_flow)(size_t(s), size_t(t), 0) += T(gdx);
        (*grad_flow)(size_t(s), size_t(t), 1) += T(gdy);
      }
    }
  }
}

// x_hat(i) = bilinear_warp(x_tilde(i), maps[i]) for every view of the row.
template <typename T>
Tensor4<T> assemble_reconstruction(const Tensor4<T>& x_tilde,
                                   const std::vector<Image<T>>& maps) {
  if (maps.size() != x_tilde.d()) {
    throw std::invalid_argument("assemble_reconstruction: need one map per view");
  }
  Tensor4<T> out(x_tilde.d(), x_tilde.h(), x_tilde.w(), x_tilde.c());
  for (size_t i = 0; i < maps.size(); ++i) {
    set_slice(out, i, bilinear_warp(slice_image(x_tilde, i), maps[i]));
  }
  return out;
}

template <typename T>
void assemble_reconstruction_backward(const Tensor4<T>& x_tilde,
                                      const std::vector<Image<T>>& maps,
                                      const Tensor4<T>& grad_out,
                                      Tensor4<T>* grad_x_tilde,
                                      std::vector<Image<T>>* grad_maps) {
  for (size_t i = 0; i < maps.size(); ++i) {
    Image<T> gi = grad_x_tilde ? zeros_like(slice_image(x_tilde, i)) : Image<T>();
    bilinear_warp_backward(slice_image(x_tilde, i), maps[i],
                           slice_image(grad_out, i),
                           grad_x_tilde ? &gi : nullptr,
                           grad_maps ? &(*grad_maps)[i] : nullptr);
    if (grad_x_tilde) {
      Image<T> cur = slice_image(*grad_x_tilde, i);
      T* a = cur.data();
      const T* b = gi.data();
      for (size_t k = 0; k < gi.size(); ++k) a[k] += b[k];
      set_slice(*grad_x_tilde, i, cur);
    }
  }
}

}  // namespace lfda

#endif  // LFDA_WARP_WARP_HPP_
