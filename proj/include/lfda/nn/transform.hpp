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
#ifndef LFDA_NN_TRANSFORM_HPP_
#define LFDA_NN_TRANSFORM_HPP_

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "lfda/core/random.hpp"
#include "lfda/core/tensor.hpp"
#include "lfda/nn/conv3d.hpp"
#include "lfda/nn/gdn.hpp"
#include "lfda/nn/ops.hpp"

namespace lfda {

enum class TransformRole {
  kColorAnalysis,
  kColorSynthesis,
  kDisparityAnalysis,
  kDisparitySynthesis,
};

// Magnitude bound applied to analysis outputs so every quantized symbol fits
// comfortably inside the coder's signed 16-bit alphabet.
template <typename T>
constexpr T kLatentClamp = T(4096);

// Flow magnitude bound in pixels for disparity synthesis outputs.
template <typename T>
constexpr T kFlowClamp = T(16);

// A stack of strided 3D convolutions with (I)GDN between them:
// conv_0, gdn_0, conv_1, gdn_1, ..., conv_{n-1}. The last conv is always
// linear. Analysis stacks end in a latent soft clamp; the disparity
// synthesis stack ends in a depth mean-reduce followed by a flow clamp.
template <typename T>
struct TransformStack {
  TransformRole role = TransformRole::kColorAnalysis;
  std::vector<Conv3DLayer<T>> convs;
  std::vector<GdnLayer<T>> gdns;  // convs.size() - 1 entries
  T clamp_t = T(0);               // 0 = no terminal soft clamp
  bool reduce_depth = false;      // mean over depth before the clamp
};

// Intermediates retained by a traced forward pass for exact reverse-mode
// gradients. conv_in[i] feeds convs[i]; gdn_in[i] feeds gdns[i].
template <typename T>
struct TransformTrace {
  std::vector<Tensor4<T>> conv_in;
  std::vector<Tensor4<T>> gdn_in;
  std::vector<GdnCache<T>> gdn_cache;
  Tensor4<T> reduce_in;
  Tensor4<T> clamp_in;
};

namespace detail {

template <typename T>
void he_init(Conv3DLayer<T>& layer, Rng& rng) {
  const double fan_in =
      double(layer.kernel) * layer.kernel * layer.kernel * layer.in_channels;
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (auto& w : layer.weights) w = T(dist(rng));
}

}  // namespace detail

// Channel plan: in -> hidden x (n-2) -> out, n down/up convs, GDN between.
template <typename T>
TransformStack<T> make_transform(TransformRole role, int num_layers,
                                 int in_channels, int hidden_channels,
                                 int out_channels, Rng& rng) {
  if (num_layers < 2) throw std::invalid_argument("transform needs >= 2 layers");
  const bool analysis = role == TransformRole::kColorAnalysis ||
                        role == TransformRole::kDisparityAnalysis;
  TransformStack<T> s;
  s.role = role;
  for (int i = 0; i < num_layers; ++i) {
    int ci = i == 0 ? in_channels : hidden_channels;
    int co = i == num_layers - 1 ? out_channels : hidden_channels;
    auto l = make_conv3d<T>(analysis ? ConvMode::kDown : ConvMode::kUp, ci, co,
                            {1, 2, 2});
    detail::he_init(l, rng);
    s.convs.push_back(std::move(l));
    if (i < num_layers - 1) {
      s.gdns.push_back(make_gdn<T>(co, /*inverse=*/!analysis));
    }
  }
  if (analysis) {
    s.clamp_t = kLatentClamp<T>;
  } else if (role == TransformRole::kDisparitySynthesis) {
    s.reduce_depth = true;
    s.clamp_t = kFlowClamp<T>;
  }
  return s;
}

template <typename T>
Tensor4<T> transform_forward(const TransformStack<T>& s, const Tensor4<T>& x,
                             std::type_identity_t<TransformTrace<T>>* trace =
                                 nullptr) {
  Tensor4<T> cur = x;
  if (trace) {
    trace->conv_in.clear();
    trace->gdn_in.clear();
    trace->gdn_cache.assign(s.gdns.size(), GdnCache<T>{});
  }
  for (size_t i = 0; i < s.convs.size(); ++i) {
    if (trace) trace->conv_in.push_back(cur);
    cur = conv3d_forward(cur, s.convs[i]);
    if (i < s.gdns.size()) {
      if (trace) {
        trace->gdn_in.push_back(cur);
        cur = gdn_forward(cur, s.gdns[i], &trace->gdn_cache[i]);
      } else {
        cur = gdn_forward(cur, s.gdns[i]);
      }
    }
  }
  if (s.reduce_depth) {
    if (trace) trace->reduce_in = cur;
    cur = depth_mean_forward(cur);
  }
  if (s.clamp_t > T(0)) {
    if (trace) trace->clamp_in = cur;
    cur = soft_clamp_forward(cur, s.clamp_t);
  }
  return cur;
}

// All-zero copy used as a gradient accumulator with identical layout.
template <typename T>
TransformStack<T> zeros_like(const TransformStack<T>& s) {
  TransformStack<T> g = s;
  for (auto& c : g.convs) {
    std::fill(c.weights.begin(), c.weights.end(), T(0));
    std::fill(c.bias.begin(), c.bias.end(), T(0));
  }
  for (auto& d : g.gdns) {
    std::fill(d.beta_raw.begin(), d.beta_raw.end(), T(0));
    std::fill(d.gamma_raw.begin(), d.gamma_raw.end(), T(0));
  }
  return g;
}

// Accumulates parameter gradients into `grads` (same layout as `s`) and,
// when grad_in is non-null, the input gradient into *grad_in.
template <typename T>
void transform_backward(const TransformStack<T>& s,
                        const TransformTrace<T>& trace,
                        const Tensor4<T>& grad_out,
                        std::type_identity_t<Tensor4<T>>* grad_in,
                        std::type_identity_t<TransformStack<T>>* grads) {
  Tensor4<T> g = grad_out;
  if (s.clamp_t > T(0)) {
    Tensor4<T> gi = zeros_like(trace.clamp_in);
    soft_clamp_backward(trace.clamp_in, s.clamp_t, g, &gi);
    g = std::move(gi);
  }
  if (s.reduce_depth) {
    Tensor4<T> gi = zeros_like(trace.reduce_in);
    depth_mean_backward(trace.reduce_in.d(), g, &gi);
    g = std::move(gi);
  }
  for (size_t ii = s.convs.size(); ii-- > 0;) {
    if (ii < s.gdns.size()) {
      Tensor4<T> gi = zeros_like(trace.gdn_in[ii]);
      gdn_backward(trace.gdn_in[ii], s.gdns[ii], trace.gdn_cache[ii], g, &gi,
                   grads ? &grads->gdns[ii].beta_raw : nullptr,
                   grads ? &grads->gdns[ii].gamma_raw : nullptr);
      g = std::move(gi);
    }
    const bool need_input_grad = ii > 0 || grad_in != nullptr;
    Tensor4<T> gi = need_input_grad ? zeros_like(trace.conv_in[ii])
                                    : Tensor4<T>();
    conv3d_backward(trace.conv_in[ii], s.convs[ii], g,
                    need_input_grad ? &gi : nullptr,
                    grads ? &grads->convs[ii].weights : nullptr,
                    grads ? &grads->convs[ii].bias : nullptr);
    g = std::move(gi);
  }
  if (grad_in) {
    T* a = grad_in->data();
    const T* b = g.data();
    for (size_t i = 0; i < g.size(); ++i) a[i] += b[i];
  }
}

// Deterministic parameter walk; f receives each parameter vector once.
template <typename T, typename F>
void visit_params(TransformStack<T>& s, F&& f) {
  for (auto& c : s.convs) {
    f(c.weights);
    f(c.bias);
  }
  for (auto& g : s.gdns) {
    f(g.beta_raw);
    f(g.gamma_raw);
  }
}

template <typename T>
size_t param_count(const TransformStack<T>& s) {
  size_t n = 0;
  auto& sm = const_cast<TransformStack<T>&>(s);
  visit_params(sm, [&](std::vector<T>& v) { n += v.size(); });
  return n;
}

}  // namespace lfda

#endif  // LFDA_NN_TRANSFORM_HPP_
