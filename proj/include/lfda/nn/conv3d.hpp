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
#ifndef LFDA_NN_CONV3D_HPP_
#define LFDA_NN_CONV3D_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "lfda/core/tensor.hpp"

namespace lfda {

enum class ConvMode { kDown, kUp };

// Strided 3D convolution layer. kDown is a same-padded strided
// cross-correlation with output extent ceil(in/stride). kUp is its exact
// adjoint (transposed convolution) with output extent in*stride, which keeps
// analysis/synthesis shape contracts symmetric by construction.
//
// Weights are always stored in the layout of the downsampling convolution:
// [kd][kh][kw][src][dst] with (src,dst) = (in,out) for kDown and (out,in)
// for kUp. Bias has out_channels entries in both modes.
template <typename T>
struct Conv3DLayer {
  ConvMode mode = ConvMode::kDown;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  std::array<int, 3> stride = {1, 2, 2};
  std::vector<T> weights;
  std::vector<T> bias;

  size_t weight_count() const {
    return size_t(kernel) * kernel * kernel * in_channels * out_channels;
  }
};

template <typename T>
Conv3DLayer<T> make_conv3d(ConvMode mode, int in_channels, int out_channels,
                           std::array<int, 3> stride, int kernel = 3) {
  Conv3DLayer<T> l;
  l.mode = mode;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.kernel = kernel;
  l.stride = stride;
  l.weights.assign(size_t(kernel) * kernel * kernel * in_channels *
                       out_channels,
                   T(0));
  l.bias.assign(size_t(out_channels), T(0));
  return l;
}

namespace detail {

// Geometry of one down-mode convolution (also the "virtual" down conv whose
// adjoint realizes the up mode).
struct ConvGeom {
  size_t in[3];   // source extent
  size_t out[3];  // strided extent
  int pad_lo[3];
  int k;
  int stride[3];

  static ConvGeom down(size_t d, size_t h, size_t w, int k,
                       const std::array<int, 3>& stride) {
    ConvGeom g;
    g.k = k;
    size_t in[3] = {d, h, w};
    for (int a = 0; a < 3; ++a) {
      g.in[a] = in[a];
      g.stride[a] = stride[a];
      g.out[a] = (in[a] + size_t(stride[a]) - 1) / size_t(stride[a]);
      long total = long(g.out[a] - 1) * stride[a] + k - long(in[a]);
      if (total < 0) total = 0;
      g.pad_lo[a] = int(total / 2);
    }
    return g;
  }

  size_t positions() const { return out[0] * out[1] * out[2]; }
  size_t patch_len(int channels) const {
    return size_t(k) * k * k * size_t(channels);
  }
};

// Gathers k^3 x C patches around every output position into `col`
// (positions x k^3*C, row-major). Out-of-range taps read as zero.
template <typename T>
void im2col(const Tensor4<T>& x, const ConvGeom& g, std::vector<T>& col) {
  const int k = g.k;
  const size_t C = x.c();
  const size_t row_len = g.patch_len(int(C));
  col.assign(g.positions() * row_len, T(0));
  const size_t in_hw = g.in[1] * g.in[2];
  const T* src = x.data();
  size_t pos = 0;
  for (size_t od = 0; od < g.out[0]; ++od) {
    for (size_t oh = 0; oh < g.out[1]; ++oh) {
      for (size_t ow = 0; ow < g.out[2]; ++ow, ++pos) {
        T* row = col.data() + pos * row_len;
        long d0 = long(od) * g.stride[0] - g.pad_lo[0];
        long h0 = long(oh) * g.stride[1] - g.pad_lo[1];
        long w0 = long(ow) * g.stride[2] - g.pad_lo[2];
        for (int kd = 0; kd < k; ++kd) {
          long d = d0 + kd;
          if (d < 0 || d >= long(g.in[0])) continue;
          for (int kh = 0; kh < k; ++kh) {
            long h = h0 + kh;
            if (h < 0 || h >= long(g.in[1])) continue;
            for (int kw = 0; kw < k; ++kw) {
              long w = w0 + kw;
              if (w < 0 || w >= long(g.in[2])) continue;
              const T* s = src + ((size_t(d) * in_hw + size_t(h) * g.in[2] +
                                   size_t(w)) *
                                  C);
              std::memcpy(row + (size_t(kd) * k * k + size_t(kh) * k +
                                 size_t(kw)) *
                                    C,
                          s, C * sizeof(T));
            }
          }
        }
      }
    }
  }
}

// Scatter-add of a col matrix back into a tensor; the adjoint of im2col.
template <typename T>
void col2im(const std::vector<T>& col, const ConvGeom& g, Tensor4<T>& x) {
  const int k = g.k;
  const size_t C = x.c();
  const size_t row_len = g.patch_len(int(C));
  const size_t in_hw = g.in[1] * g.in[2];
  T* dst = x.data();
  size_t pos = 0;
  for (size_t od = 0; od < g.out[0]; ++od) {
    for (size_t oh = 0; oh < g.out[1]; ++oh) {
      for (size_t ow = 0; ow < g.out[2]; ++ow, ++pos) {
        const T* row = col.data() + pos * row_len;
        long d0 = long(od) * g.stride[0] - g.pad_lo[0];
        long h0 = long(oh) * g.stride[1] - g.pad_lo[1];
        long w0 = long(ow) * g.stride[2] - g.pad_lo[2];
        for (int kd = 0; kd < k; ++kd) {
          long d = d0 + kd;
          if (d < 0 || d >= long(g.in[0])) continue;
          for (int kh = 0; kh < k; ++kh) {
            long h = h0 + kh;
            if (h < 0 || h >= long(g.in[1])) continue;
            for (int kw = 0; kw < k; ++kw) {
              long w = w0 + kw;
              if (w < 0 || w >= long(g.in[2])) continue;
              T* s = dst + ((size_t(d) * in_hw + size_t(h) * g.in[2] +
                             size_t(w)) *
                            C);
              const T* r = row + (size_t(kd) * k * k + size_t(kh) * k +
                                  size_t(kw)) *
                                     C;
              for (size_t c = 0; c < C; ++c) s[c] += r[c];
            }
          }
        }
      }
    }
  }
}

template <typename T>
using RowMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

template <typename T>
ConvGeom up_geom(const Tensor4<T>& up_input, const Conv3DLayer<T>& layer) {
  return ConvGeom::down(up_input.d() * size_t(layer.stride[0]),
                        up_input.h() * size_t(layer.stride[1]),
                        up_input.w() * size_t(layer.stride[2]), layer.kernel,
                        layer.stride);
}

}  // namespace detail

template <typename T>
void check_conv_input(const Tensor4<T>& x, const Conv3DLayer<T>& layer) {
  if (x.c() != size_t(layer.in_channels)) {
    throw std::invalid_argument("conv3d channel mismatch: input has " +
                                std::to_string(x.c()) + ", layer expects " +
                                std::to_string(layer.in_channels));
  }
}

template <typename T>
Tensor4<T> conv3d_forward(const Tensor4<T>& x, const Conv3DLayer<T>& layer) {
  check_conv_input(x, layer);
  using namespace detail;
  if (layer.mode == ConvMode::kDown) {
    ConvGeom g = ConvGeom::down(x.d(), x.h(), x.w(), layer.kernel, layer.stride);
    std::vector<T> col;
    im2col(x, g, col);
    Tensor4<T> y(g.out[0], g.out[1], g.out[2], size_t(layer.out_channels));
    ConstMatMap<T> colm(col.data(), long(g.positions()),
                        long(g.patch_len(layer.in_channels)));
    ConstMatMap<T> wm(layer.weights.data(),
                      long(g.patch_len(layer.in_channels)),
                      long(layer.out_channels));
    MatMap<T> ym(y.data(), long(g.positions()), long(layer.out_channels));
    ym.noalias() = colm * wm;
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bm(
        layer.bias.data(), long(layer.out_channels));
    ym.rowwise() += bm.transpose();
    return y;
  }
  // Up mode: scatter x * W^T through the virtual down geometry, then bias.
  ConvGeom g = up_geom(x, layer);
  if (g.positions() != x.size() / x.c()) {
    throw std::logic_error("up conv geometry mismatch");
  }
  std::vector<T> gcol(g.positions() * g.patch_len(layer.out_channels));
  ConstMatMap<T> xm(x.data(), long(g.positions()), long(layer.in_channels));
  ConstMatMap<T> wm(layer.weights.data(), long(g.patch_len(layer.out_channels)),
                    long(layer.in_channels));
  detail::MatMap<T> gcolm(gcol.data(), long(g.positions()),
                          long(g.patch_len(layer.out_channels)));
  gcolm.noalias() = xm * wm.transpose();
  Tensor4<T> y(g.in[0], g.in[1], g.in[2], size_t(layer.out_channels));
  col2im(gcol, g, y);
  T* yd = y.data();
  size_t n = y.size() / y.c();
  for (size_t i = 0; i < n; ++i) {
    for (size_t c = 0; c < y.c(); ++c) yd[i * y.c() + c] += layer.bias[c];
  }
  return y;
}

// Accumulates gradients; grad buffers must be pre-sized (zeroed or carrying
// partial sums). grad_in may be null for the first layer of a network.
template <typename T>
void conv3d_backward(const Tensor4<T>& x, const Conv3DLayer<T>& layer,
                     const Tensor4<T>& grad_out, Tensor4<T>* grad_in,
                     std::vector<T>* grad_weights, std::vector<T>* grad_bias) {
  using namespace detail;
  if (layer.mode == ConvMode::kDown) {
    ConvGeom g = ConvGeom::down(x.d(), x.h(), x.w(), layer.kernel, layer.stride);
    const long rows = long(g.positions());
    const long patch = long(g.patch_len(layer.in_channels));
    ConstMatMap<T> gom(grad_out.data(), rows, long(layer.out_channels));
    if (grad_bias) {
      Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gb(grad_bias->data(),
                                                         long(layer.out_channels));
      gb.noalias() += gom.colwise().sum().transpose();
    }
    std::vector<T> col;
    if (grad_weights) {
      im2col(x, g, col);
      ConstMatMap<T> colm(col.data(), rows, patch);
      MatMap<T> gw(grad_weights->data(), patch, long(layer.out_channels));
      gw.noalias() += colm.transpose() * gom;
    }
    if (grad_in) {
      std::vector<T> gcol(size_t(rows) * size_t(patch));
      MatMap<T> gcolm(gcol.data(), rows, patch);
      ConstMatMap<T> wm(layer.weights.data(), patch, long(layer.out_channels));
      gcolm.noalias() = gom * wm.transpose();
      col2im(gcol, g, *grad_in);
    }
    return;
  }
  // Up mode.
  ConvGeom g = up_geom(x, layer);
  const long rows = long(g.positions());
  const long patch = long(g.patch_len(layer.out_channels));
  if (grad_bias) {
    ConstMatMap<T> gom(grad_out.data(), long(grad_out.size() / grad_out.c()),
                       long(layer.out_channels));
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> gb(grad_bias->data(),
                                                       long(layer.out_channels));
    gb.noalias() += gom.colwise().sum().transpose();
  }
  std::vector<T> col;
  im2col(grad_out, g, col);  // patches of the A-shaped output gradient
  ConstMatMap<T> colm(col.data(), rows, patch);
  if (grad_weights) {
    ConstMatMap<T> xm(x.data(), rows, long(layer.in_channels));
    MatMap<T> gw(grad_weights->data(), patch, long(layer.in_channels));
    gw.noalias() += colm.transpose() * xm;
  }
  if (grad_in) {
    ConstMatMap<T> wm(layer.weights.data(), patch, long(layer.in_channels));
    MatMap<T> gim(grad_in->data(), rows, long(layer.in_channels));
    gim.noalias() += colm * wm;
  }
}

// Output shape helper used by the stream-layout logic in the codec.
template <typename T>
std::array<size_t, 3> conv3d_output_extent(const Tensor4<T>& x,
                                           const Conv3DLayer<T>& layer) {
  if (layer.mode == ConvMode::kDown) {
    auto g = detail::ConvGeom::down(x.d(), x.h(), x.w(), layer.kernel,
                                    layer.stride);
    return {g.out[0], g.out[1], g.out[2]};
  }
  return {x.d() * size_t(layer.stride[0]), x.h() * size_t(layer.stride[1]),
          x.w() * size_t(layer.stride[2])};
}

}  // namespace lfda

#endif  // LFDA_NN_CONV3D_HPP_
