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
#ifndef LFDA_EVAL_METRICS_HPP_
#define LFDA_EVAL_METRICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfda/core/tensor.hpp"
#include "lfda/lf/light_field.hpp"

namespace lfda {

inline constexpr double kPsnrCapDb = 100.0;
inline constexpr double kMsSsimCapDb = 60.0;

enum class LumaStandard { kBT709, kBT601 };

template <typename T>
Image<T> rgb_to_y(const Image<T>& img, LumaStandard std_ = LumaStandard::kBT709) {
  if (img.c() != 3) throw std::invalid_argument("rgb_to_y: need 3 channels");
  const double wr = std_ == LumaStandard::kBT709 ? 0.2126 : 0.299;
  const double wg = std_ == LumaStandard::kBT709 ? 0.7152 : 0.587;
  const double wb = std_ == LumaStandard::kBT709 ? 0.0722 : 0.114;
  Image<T> y(img.h(), img.w(), 1);
  for (size_t s = 0; s < img.h(); ++s) {
    for (size_t t = 0; t < img.w(); ++t) {
      y(s, t, 0) = T(wr * double(img(s, t, 0)) + wg * double(img(s, t, 1)) +
                     wb * double(img(s, t, 2)));
    }
  }
  return y;
}

template <typename T>
double mean_squared_error(const Image<T>& a, const Image<T>& b) {
  if (a.h() != b.h() || a.w() != b.w() || a.c() != b.c()) {
    throw std::invalid_argument("mse: shape mismatch");
  }
  double se = 0;
  const T* pa = a.data();
  const T* pb = b.data();
  for (size_t i = 0; i < a.size(); ++i) {
    double e = double(pa[i]) - double(pb[i]);
    se += e * e;
  }
  return se / double(a.size());
}

inline double psnr_from_mse(double mse, double peak = 1.0) {
  if (mse <= 0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

template <typename T>
double psnr(const Image<T>& ref, const Image<T>& rec, double peak = 1.0) {
  return psnr_from_mse(mean_squared_error(ref, rec), peak);
}

inline double ms_ssim_db_from_score(double score) {
  if (score >= 1.0) return kMsSsimCapDb;
  return std::min(kMsSsimCapDb, -10.0 * std::log10(1.0 - score));
}

namespace detail {

struct Plane {
  size_t h = 0, w = 0;
  std::vector<double> v;
  double& at(size_t y, size_t x) { return v[y * w + x]; }
  double at(size_t y, size_t x) const { return v[y * w + x]; }
};

template <typename T>
Plane to_plane(const Image<T>& img) {
  Plane p;
  p.h = img.h();
  p.w = img.w();
  p.v.resize(p.h * p.w);
  for (size_t i = 0; i < p.v.size(); ++i) p.v[i] = double(img.data()[i]);
  return p;
}

inline std::array<double, 11> gaussian11() {
  std::array<double, 11> g{};
  double sum = 0;
  for (int i = 0; i < 11; ++i) {
    double d = double(i) - 5.0;
    g[size_t(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += g[size_t(i)];
  }
  for (auto& x : g) x /= sum;
  return g;
}

// Separable valid-mode 11x11 Gaussian filter.
inline Plane gauss_valid(const Plane& in) {
  static const std::array<double, 11> g = gaussian11();
  Plane tmp;  // horizontal pass
  tmp.h = in.h;
  tmp.w = in.w - 10;
  tmp.v.assign(tmp.h * tmp.w, 0.0);
  for (size_t y = 0; y < in.h; ++y) {
    for (size_t x = 0; x < tmp.w; ++x) {
      double acc = 0;
      for (int k = 0; k < 11; ++k) acc += g[size_t(k)] * in.at(y, x + size_t(k));
      tmp.at(y, x) = acc;
    }
  }
  Plane out;  // vertical pass
  out.h = in.h - 10;
  out.w = tmp.w;
  out.v.assign(out.h * out.w, 0.0);
  for (size_t y = 0; y < out.h; ++y) {
    for (size_t x = 0; x < out.w; ++x) {
      double acc = 0;
      for (int k = 0; k < 11; ++k) acc += g[size_t(k)] * tmp.at(y + size_t(k), x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

// 2x2 average pooling, truncating odd edges.
inline Plane downsample2(const Plane& in) {
  Plane out;
  out.h = in.h / 2;
  out.w = in.w / 2;
  out.v.resize(out.h * out.w);
  for (size_t y = 0; y < out.h; ++y) {
    for (size_t x = 0; x < out.w; ++x) {
      out.at(y, x) = 0.25 * (in.at(2 * y, 2 * x) + in.at(2 * y, 2 * x + 1) +
                             in.at(2 * y + 1, 2 * x) + in.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

// Mean luminance and contrast-structure terms of SSIM over valid windows.
inline void ssim_terms(const Plane& x, const Plane& y, double* mean_l_cs,
                       double* mean_cs) {
  constexpr double C1 = 0.01 * 0.01;
  constexpr double C2 = 0.03 * 0.03;
  Plane x2 = x, y2 = y, xy = x;
  for (size_t i = 0; i < x.v.size(); ++i) {
    x2.v[i] = x.v[i] * x.v[i];
    y2.v[i] = y.v[i] * y.v[i];
    xy.v[i] = x.v[i] * y.v[i];
  }
  Plane mx = gauss_valid(x), my = gauss_valid(y);
  Plane mxx = gauss_valid(x2), myy = gauss_valid(y2), mxy = gauss_valid(xy);
  double acc_lcs = 0, acc_cs = 0;
  for (size_t i = 0; i < mx.v.size(); ++i) {
    double mu_x = mx.v[i], mu_y = my.v[i];
    double sx = mxx.v[i] - mu_x * mu_x;
    double sy = myy.v[i] - mu_y * mu_y;
    double sxy = mxy.v[i] - mu_x * mu_y;
    double cs = (2 * sxy + C2) / (sx + sy + C2);
    double l = (2 * mu_x * mu_y + C1) / (mu_x * mu_x + mu_y * mu_y + C1);
    acc_cs += cs;
    acc_lcs += l * cs;
  }
  *mean_cs = acc_cs / double(mx.v.size());
  *mean_l_cs = acc_lcs / double(mx.v.size());
}

inline constexpr std::array<double, 5> kMsSsimWeights = {
    0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

}  // namespace detail

// 5-scale MS-SSIM on a single-channel pair. When the image is too small for
// 5 scales (min dim < 176) the scale count drops to what fits an 11x11
// window and the canonical weights are renormalized; `warn` (if set)
// receives a note. Scores are clamped at 0 before exponentiation.
template <typename T>
double ms_ssim(const Image<T>& ref, const Image<T>& rec,
               const std::function<void(const std::string&)>& warn = nullptr) {
  if (ref.h() != rec.h() || ref.w() != rec.w() || ref.c() != 1 ||
      rec.c() != 1) {
    throw std::invalid_argument("ms_ssim: need matching single-channel images");
  }
  const size_t min_dim = std::min(ref.h(), ref.w());
  int scales = 0;
  for (int m = 1; m <= 5; ++m) {
    if (min_dim / (size_t(1) << (m - 1)) >= 11) scales = m;
  }
  if (scales == 0) {
    throw std::invalid_argument("ms_ssim: image smaller than the 11x11 window");
  }
  if (scales < 5 && warn) {
    warn("ms_ssim: only " + std::to_string(scales) + " scales fit " +
         std::to_string(ref.h()) + "x" + std::to_string(ref.w()) +
         "; weights renormalized");
  }
  double wsum = 0;
  for (int m = 0; m < scales; ++m) wsum += detail::kMsSsimWeights[size_t(m)];

  detail::Plane x = detail::to_plane(ref);
  detail::Plane y = detail::to_plane(rec);
  double score = 1.0;
  for (int m = 0; m < scales; ++m) {
    double l_cs = 0, cs = 0;
    detail::ssim_terms(x, y, &l_cs, &cs);
    const double w = detail::kMsSsimWeights[size_t(m)] / wsum;
    const double term = (m == scales - 1) ? l_cs : cs;
    score *= std::pow(std::max(term, 0.0), w);
    if (m + 1 < scales) {
      x = detail::downsample2(x);
      y = detail::downsample2(y);
    }
  }
  return score;
}

// ---------------------------------------------------------------------------
// Grid-level aggregation: per-view metric values (each capped) averaged over
// the 64 views; an alternate mode pools MSE across views before the dB map.

struct EvalOptions {
  LumaStandard luma = LumaStandard::kBT709;
  bool psnr_aggregate_mse_first = false;
  std::function<void(const std::string&)> warn;
};

struct GridMetrics {
  double psnr_y = 0;
  double psnr_rgb = 0;
  double msssim_y = 0;     // linear, averaged over views
  double msssim_y_db = 0;  // per-view dB averaged
};

template <typename T>
GridMetrics evaluate_grids(const LightFieldGrid<T>& ref,
                           const LightFieldGrid<T>& rec,
                           const EvalOptions& opts = {}) {
  if (ref.u_count != rec.u_count || ref.v_count != rec.v_count ||
      ref.height != rec.height || ref.width != rec.width) {
    throw std::invalid_argument("evaluate_grids: grid shape mismatch");
  }
  GridMetrics gm;
  double mse_y_sum = 0;
  const size_t n = ref.views.size();
  for (size_t v = 0; v < ref.v_count; ++v) {
    for (size_t u = 0; u < ref.u_count; ++u) {
      const Image<T>& a = ref.view(v, u);
      const Image<T>& b = rec.view(v, u);
      Image<T> ya = rgb_to_y(a, opts.luma);
      Image<T> yb = rgb_to_y(b, opts.luma);
      double m_y = mean_squared_error(ya, yb);
      mse_y_sum += m_y;
      gm.psnr_y += psnr_from_mse(m_y);
      gm.psnr_rgb += psnr(a, b);
      double s = ms_ssim(ya, yb, opts.warn);
      gm.msssim_y += s;
      gm.msssim_y_db += ms_ssim_db_from_score(s);
    }
  }
  gm.psnr_rgb /= double(n);
  gm.msssim_y /= double(n);
  gm.msssim_y_db /= double(n);
  if (opts.psnr_aggregate_mse_first) {
    gm.psnr_y = psnr_from_mse(mse_y_sum / double(n));
  } else {
    gm.psnr_y /= double(n);
  }
  return gm;
}

// Plain MSE between grids on [0,1] RGB, the criterion used by ablations.
template <typename T>
double grid_mse(const LightFieldGrid<T>& ref, const LightFieldGrid<T>& rec) {
  double acc = 0;
  for (size_t i = 0; i < ref.views.size(); ++i) {
    acc += mean_squared_error(ref.views[i], rec.views[i]);
  }
  return acc / double(ref.views.size());
}

}  // namespace lfda

#endif  // LFDA_EVAL_METRICS_HPP_
