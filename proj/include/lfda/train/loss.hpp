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
#ifndef LFDA_TRAIN_LOSS_HPP_
#define LFDA_TRAIN_LOSS_HPP_

#include <cmath>
#include <vector>

#include "lfda/core/parallel.hpp"
#include "lfda/core/random.hpp"
#include "lfda/entropy/prior.hpp"
#include "lfda/entropy/quantize.hpp"
#include "lfda/lf/light_field.hpp"
#include "lfda/nn/model.hpp"
#include "lfda/warp/warp.hpp"

namespace lfda {

// Distortion is measured as 255^2 * MSE on [0,1] samples, i.e. MSE on the
// 8-bit scale. The lambda grid follows the same convention, which keeps the
// listed lambdas in the regime where rate and distortion actually trade off.
template <typename T>
constexpr T kDistortionScale = T(255) * T(255);

// One R-D evaluation: loss = rate_bpp + lambda * mse, where mse already
// carries the kDistortionScale factor, so the identity holds exactly.
template <typename T>
struct RdParts {
  T loss = 0;
  T rate_bpp = 0;
  T mse = 0;
};

// Rate uses additively-dithered latents (NOISE); the distortion path pushes
// hard-rounded latents through synthesis and treats rounding as identity in
// the backward pass (STE). Gradients are scaled by gscale and accumulated
// into *grads (pass nullptr for evaluation only).
template <typename T>
RdParts<T> rd_loss_sample(const Model<T>& model, T lambda,
                          const PatchSample<T>& sample, uint64_t noise_seed,
                          Model<T>* grads, T gscale) {
  const Tensor4<T>& x = sample.patch;
  const T pixels = T(x.d() * x.h() * x.w());
  const bool train = grads != nullptr;

  // ---- forward, color path
  TransformTrace<T> tr_ca;
  Tensor4<T> y = transform_forward(model.color_analysis, x,
                                   train ? &tr_ca : nullptr);
  Tensor4<T> y_noise =
      quantize(y, QuantizerMode::kNoise, derive_seed(noise_seed, 0));
  Tensor4<T> y_ste = quantize(y, QuantizerMode::kSte);
  TransformTrace<T> tr_cs;
  Tensor4<T> x_tilde = transform_forward(model.color_synthesis, y_ste,
                                         train ? &tr_cs : nullptr);

  // ---- forward, disparity paths
  const size_t n_views = model.config.use_disparity ? kViewsPerRow : 0;
  SAIRow<T> row = tensor_to_row(x, sample.row_index);
  std::vector<TransformTrace<T>> tr_da(n_views), tr_ds(n_views);
  std::vector<Tensor4<T>> f(n_views), z_noise(n_views), z_ste(n_views);
  std::vector<Image<T>> maps;
  T rate_bits = 0;
  for (size_t i = 0; i < n_views; ++i) {
    f[i] = build_feature_tensor(row, int(i)).tensor;
    Tensor4<T> z = transform_forward(model.disp_a(i), f[i],
                                     train ? &tr_da[i] : nullptr);
    z_noise[i] = quantize(z, QuantizerMode::kNoise,
                          derive_seed(noise_seed, 1 + i));
    z_ste[i] = quantize(z, QuantizerMode::kSte);
    Tensor4<T> d = transform_forward(model.disp_s(i), z_ste[i],
                                     train ? &tr_ds[i] : nullptr);
    maps.push_back(slice_image(d, 0));
  }
  Tensor4<T> x_hat = model.config.use_disparity
                         ? assemble_reconstruction(x_tilde, maps)
                         : x_tilde;

  // ---- losses
  const T* xd = x.data();
  const T* rd = x_hat.data();
  double se = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = double(rd[i]) - double(xd[i]);
    se += e * e;
  }
  const T mse = T(double(kDistortionScale<T>) * se / double(x.size()));

  const T rate_scale = gscale / pixels;
  Model<T>* g = grads;
  Tensor4<T> gy = train ? zeros_like(y) : Tensor4<T>();
  rate_bits += train
                   ? estimate_rate_bits_backward(y_noise, model.prior_color,
                                                 rate_scale, &gy,
                                                 &g->prior_color)
                   : estimate_rate_bits(y_noise, model.prior_color);
  std::vector<Tensor4<T>> gz(n_views);
  for (size_t i = 0; i < n_views; ++i) {
    if (train) {
      gz[i] = zeros_like(z_noise[i]);
      rate_bits += estimate_rate_bits_backward(z_noise[i],
                                               model.prior_disparity,
                                               rate_scale, &gz[i],
                                               &g->prior_disparity);
    } else {
      rate_bits += estimate_rate_bits(z_noise[i], model.prior_disparity);
    }
  }
  const T rate_bpp = rate_bits / pixels;

  RdParts<T> parts;
  parts.rate_bpp = rate_bpp;
  parts.mse = mse;
  parts.loss = rate_bpp + lambda * mse;
  if (!train) return parts;

  // ---- backward, distortion into x_hat
  Tensor4<T> gx_hat(x.d(), x.h(), x.w(), x.c());
  {
    const T coeff =
        gscale * lambda * kDistortionScale<T> * T(2) / T(x.size());
    T* gp = gx_hat.data();
    for (size_t i = 0; i < x.size(); ++i) gp[i] = coeff * (rd[i] - xd[i]);
  }

  Tensor4<T> gx_tilde;
  if (model.config.use_disparity) {
    gx_tilde = zeros_like(x_tilde);
    std::vector<Image<T>> gmaps;
    for (size_t i = 0; i < n_views; ++i) gmaps.push_back(zeros_like(maps[i]));
    assemble_reconstruction_backward(x_tilde, maps, gx_hat, &gx_tilde, &gmaps);
    for (size_t i = 0; i < n_views; ++i) {
      Tensor4<T> gd(1, x.h(), x.w(), 2);
      set_slice(gd, 0, gmaps[i]);
      // Through synthesis to the STE latent; rounding is identity backward,
      // so this lands directly on z.
      auto& gs = g->disparity_synthesis[i % g->disparity_synthesis.size()];
      transform_backward(model.disp_s(i), tr_ds[i], gd, &gz[i], &gs);
      auto& ga = g->disparity_analysis[i % g->disparity_analysis.size()];
      transform_backward(model.disp_a(i), tr_da[i], gz[i], nullptr, &ga);
    }
  } else {
    gx_tilde = gx_hat;
  }
  transform_backward(model.color_synthesis, tr_cs, gx_tilde, &gy,
                     &g->color_synthesis);
  transform_backward(model.color_analysis, tr_ca, gy, nullptr,
                     &g->color_analysis);
  return parts;
}

// Batch mean of rd_loss_sample. Per-sample work may run on several threads;
// each sample accumulates into its own buffer and the reduction happens in
// sample order, so results are thread-count invariant.
template <typename T>
RdParts<T> rd_loss(const Model<T>& model, T lambda,
                   const std::vector<PatchSample<T>>& batch, uint64_t seed,
                   Model<T>* grads, int threads = 1) {
  if (batch.empty()) throw std::invalid_argument("rd_loss: empty batch");
  const T gscale = T(1) / T(batch.size());
  std::vector<RdParts<T>> parts(batch.size());
  if (!grads) {
    parallel_for(batch.size(), threads, [&](size_t i) {
      parts[i] = rd_loss_sample<T>(model, lambda, batch[i],
                                   derive_seed(seed, i), nullptr, gscale);
    });
  } else if (threads <= 1 || batch.size() == 1) {
    for (size_t i = 0; i < batch.size(); ++i) {
      parts[i] = rd_loss_sample(model, lambda, batch[i], derive_seed(seed, i),
                                grads, gscale);
    }
  } else {
    std::vector<Model<T>> partial(batch.size(), zeros_like(model));
    parallel_for(batch.size(), threads, [&](size_t i) {
      parts[i] = rd_loss_sample(model, lambda, batch[i], derive_seed(seed, i),
                                &partial[i], gscale);
    });
    std::vector<std::vector<T>*> dst;
    visit_params(*grads, [&](std::vector<T>& v) { dst.push_back(&v); });
    for (size_t i = 0; i < batch.size(); ++i) {
      size_t b = 0;
      visit_params(partial[i], [&](std::vector<T>& v) {
        std::vector<T>& d = *dst[b++];
        for (size_t k = 0; k < v.size(); ++k) d[k] += v[k];
      });
    }
  }
  RdParts<T> mean;
  for (const auto& p : parts) {
    mean.rate_bpp += p.rate_bpp;
    mean.mse += p.mse;
  }
  mean.rate_bpp *= gscale;
  mean.mse *= gscale;
  // Recomposed after averaging so L = rate + lambda * mse holds exactly.
  mean.loss = mean.rate_bpp + lambda * mean.mse;
  return mean;
}

}  // namespace lfda

#endif  // LFDA_TRAIN_LOSS_HPP_
