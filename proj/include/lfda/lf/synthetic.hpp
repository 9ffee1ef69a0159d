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
#ifndef LFDA_LF_SYNTHETIC_HPP_
#define LFDA_LF_SYNTHETIC_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "lfda/core/random.hpp"
#include "lfda/lf/light_field.hpp"

namespace lfda {

// Procedural light fields with exactly known parallax. Each scene is an
// analytic texture (sinusoids + Gaussian blobs) evaluated at per-view
// shifted coordinates, so every view is a continuous resample of the same
// signal with displacement (u - 3.5) * dx_per_view, (v - 3.5) * dy_per_view.
struct SynthConfig {
  uint64_t seed = 1;
  size_t height = 128;
  size_t width = 128;
  size_t views = 8;
  double dx_per_view = 1.0;  // horizontal parallax in pixels per view step
  double dy_per_view = 0.0;  // vertical parallax in pixels per view step
  int num_waves = 7;
  int num_blobs = 20;
};

namespace detail {

struct Wave {
  double kx, ky, phase;
  double amp[3];
};
struct Blob {
  double cy, cx, inv_two_sigma2;
  double amp[3];
};

struct SynthScene {
  double base[3];
  std::vector<Wave> waves;
  std::vector<Blob> blobs;

  double eval(int c, double y, double x) const {
    double v = base[c];
    for (const auto& wv : waves) {
      v += wv.amp[c] * std::cos(wv.kx * x + wv.ky * y + wv.phase);
    }
    for (const auto& b : blobs) {
      double dy = y - b.cy, dx = x - b.cx;
      v += b.amp[c] * std::exp(-(dy * dy + dx * dx) * b.inv_two_sigma2);
    }
    return std::clamp(v, 0.0, 1.0);
  }
};

inline SynthScene make_scene(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, 0xC0FFEE));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SynthScene scene;
  for (int c = 0; c < 3; ++c) scene.base[c] = 0.35 + 0.3 * unit(rng);
  double diag = double(cfg.height + cfg.width) / 2.0;
  for (int k = 0; k < cfg.num_waves; ++k) {
    Wave w;
    // Wavelengths from ~1/2 of the image down to ~8 px.
    double wavelength = 8.0 + (diag / 2.0 - 8.0) * unit(rng) * unit(rng);
    double theta = 2.0 * M_PI * unit(rng);
    double freq = 2.0 * M_PI / wavelength;
    w.kx = freq * std::cos(theta);
    w.ky = freq * std::sin(theta);
    w.phase = 2.0 * M_PI * unit(rng);
    for (int c = 0; c < 3; ++c) w.amp[c] = 0.12 * (2.0 * unit(rng) - 1.0);
    scene.waves.push_back(w);
  }
  double margin = 8.0;
  for (int k = 0; k < cfg.num_blobs; ++k) {
    Blob b;
    b.cy = -margin + (cfg.height + 2 * margin) * unit(rng);
    b.cx = -margin + (cfg.width + 2 * margin) * unit(rng);
    double sigma = 3.0 + 18.0 * unit(rng);
    b.inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    for (int c = 0; c < 3; ++c) b.amp[c] = 0.3 * (2.0 * unit(rng) - 1.0);
    scene.blobs.push_back(b);
  }
  return scene;
}

}  // namespace detail

template <typename T = float>
LightFieldGrid<T> make_parallax_grid(const SynthConfig& cfg) {
  detail::SynthScene scene = detail::make_scene(cfg);
  LightFieldGrid<T> grid;
  grid.u_count = grid.v_count = cfg.views;
  grid.height = cfg.height;
  grid.width = cfg.width;
  grid.views.resize(cfg.views * cfg.views);
  double center = (double(cfg.views) - 1.0) / 2.0;
  for (size_t v = 0; v < cfg.views; ++v) {
    for (size_t u = 0; u < cfg.views; ++u) {
      Image<T> img(cfg.height, cfg.width, 3);
      double off_y = (double(v) - center) * cfg.dy_per_view;
      double off_x = (double(u) - center) * cfg.dx_per_view;
      for (size_t y = 0; y < cfg.height; ++y) {
        for (size_t x = 0; x < cfg.width; ++x) {
          for (int c = 0; c < 3; ++c) {
            img(y, x, size_t(c)) =
                T(scene.eval(c, double(y) + off_y, double(x) + off_x));
          }
        }
      }
      grid.view(v, u) = std::move(img);
    }
  }
  return grid;
}

}  // namespace lfda

#endif  // LFDA_LF_SYNTHETIC_HPP_
