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
#ifndef LFDA_EVAL_BD_HPP_
#define LFDA_EVAL_BD_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfda {

struct RDPoint {
  double bpp = 0;
  double psnr_y = 0;
  double msssim_y_db = 0;
  double psnr_rgb = 0;
  std::string scene;
};

// Points in strictly ascending bpp; validated where consumed.
struct RDCurve {
  std::vector<RDPoint> points;
};

struct BdResult {
  double bd_rate_percent = 0;  // negative = rate saving of B over A
  double bd_psnr_db = 0;       // positive = quality gain of B over A
  // Set when a 2-point (linear-fit) input was involved or when one axis had
  // no overlap and the fits were extrapolated over the union span.
  bool low_confidence = false;
};

namespace detail {

// Least-squares polynomial fit of y(x - x0), degree min(3, n-1).
inline std::vector<double> polyfit(const std::vector<double>& x,
                                   const std::vector<double>& y, double x0) {
  const int n = int(x.size());
  const int degree = std::min(3, n - 1);
  Eigen::MatrixXd A(n, degree + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double t = 1.0;
    for (int k = 0; k <= degree; ++k) {
      A(i, k) = t;
      t *= x[size_t(i)] - x0;
    }
    b(i) = y[size_t(i)];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(size_t(degree) + 1);
  for (int k = 0; k <= degree; ++k) out[size_t(k)] = c(k);
  return out;
}

inline double polyint(const std::vector<double>& c, double x0, double a,
                      double b) {
  double acc = 0;
  double pa = a - x0, pb = b - x0;
  double ta = pa, tb = pb;
  for (size_t k = 0; k < c.size(); ++k) {
    acc += c[k] / double(k + 1) * (tb - ta);
    ta *= pa;
    tb *= pb;
  }
  return acc;
}

inline bool ranges_overlap(const std::vector<double>& xa,
                           const std::vector<double>& xb) {
  return std::max(*std::min_element(xa.begin(), xa.end()),
                  *std::min_element(xb.begin(), xb.end())) <
         std::min(*std::max_element(xa.begin(), xa.end()),
                  *std::max_element(xb.begin(), xb.end()));
}

// Mean of fitB - fitA over the shared x interval. When the supports are
// disjoint (one curve strictly better than the other) the fits are instead
// integrated over the union span, i.e. extrapolated; callers flag that as
// low-confidence.
inline double bd_average_diff(const std::vector<double>& xa,
                              const std::vector<double>& ya,
                              const std::vector<double>& xb,
                              const std::vector<double>& yb) {
  const double min_a = *std::min_element(xa.begin(), xa.end());
  const double max_a = *std::max_element(xa.begin(), xa.end());
  const double min_b = *std::min_element(xb.begin(), xb.end());
  const double max_b = *std::max_element(xb.begin(), xb.end());
  double lo = std::max(min_a, min_b);
  double hi = std::min(max_a, max_b);
  if (!(lo < hi)) {
    lo = std::min(min_a, min_b);
    hi = std::max(max_a, max_b);
  }
  double x0 = 0;
  for (double v : xa) x0 += v;
  for (double v : xb) x0 += v;
  x0 /= double(xa.size() + xb.size());
  if (!(lo < hi)) {
    // Every abscissa equal on both curves; the mean gap is the plain one.
    double ma = 0, mb = 0;
    for (double v : ya) ma += v;
    for (double v : yb) mb += v;
    return mb / double(yb.size()) - ma / double(ya.size());
  }
  const std::vector<double> ca = polyfit(xa, ya, x0);
  const std::vector<double> cb = polyfit(xb, yb, x0);
  return (polyint(cb, x0, lo, hi) - polyint(ca, x0, lo, hi)) / (hi - lo);
}

inline void validate_curve(const std::vector<double>& bpp) {
  if (bpp.size() < 2) {
    throw std::invalid_argument("bd_metrics: need >= 2 points per curve");
  }
  for (size_t i = 0; i < bpp.size(); ++i) {
    if (bpp[i] <= 0) throw std::invalid_argument("bd_metrics: bpp must be > 0");
    if (i && bpp[i] <= bpp[i - 1]) {
      throw std::invalid_argument("bd_metrics: bpp must be strictly increasing");
    }
  }
}

}  // namespace detail

// Classic Bjontegaard deltas of curve B relative to curve A on explicit
// (rate, quality) arrays. Rates enter in log10 domain.
inline BdResult bd_metrics_arrays(const std::vector<double>& rate_a,
                                  const std::vector<double>& q_a,
                                  const std::vector<double>& rate_b,
                                  const std::vector<double>& q_b) {
  detail::validate_curve(rate_a);
  detail::validate_curve(rate_b);
  if (q_a.size() != rate_a.size() || q_b.size() != rate_b.size()) {
    throw std::invalid_argument("bd_metrics: rate/quality size mismatch");
  }
  std::vector<double> la(rate_a.size()), lb(rate_b.size());
  for (size_t i = 0; i < rate_a.size(); ++i) la[i] = std::log10(rate_a[i]);
  for (size_t i = 0; i < rate_b.size(); ++i) lb[i] = std::log10(rate_b[i]);
  const bool rate_overlap = detail::ranges_overlap(la, lb);
  const bool quality_overlap = detail::ranges_overlap(q_a, q_b);
  if (!rate_overlap && !quality_overlap) {
    throw std::runtime_error("bd_metrics: curves do not overlap");
  }
  BdResult r;
  r.bd_psnr_db = detail::bd_average_diff(la, q_a, lb, q_b);
  const double dlog = detail::bd_average_diff(q_a, la, q_b, lb);
  r.bd_rate_percent = (std::pow(10.0, dlog) - 1.0) * 100.0;
  r.low_confidence = rate_a.size() == 2 || rate_b.size() == 2 ||
                     !rate_overlap || !quality_overlap;
  return r;
}

inline BdResult bd_metrics(const RDCurve& a, const RDCurve& b,
                           double RDPoint::* metric = &RDPoint::psnr_y) {
  std::vector<double> ra, qa, rb, qb;
  for (const auto& p : a.points) {
    ra.push_back(p.bpp);
    qa.push_back(p.*metric);
  }
  for (const auto& p : b.points) {
    rb.push_back(p.bpp);
    qb.push_back(p.*metric);
  }
  return bd_metrics_arrays(ra, qa, rb, qb);
}

}  // namespace lfda

#endif  // LFDA_EVAL_BD_HPP_
