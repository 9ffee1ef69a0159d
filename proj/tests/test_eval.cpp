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
#include <gtest/gtest.h>

#include <cmath>

#include "lfda/eval/bd.hpp"
#include "lfda/eval/bench.hpp"
#include "lfda/eval/metrics.hpp"
#include "lfda/lf/synthetic.hpp"
#include "lfda/nn/model.hpp"
#include "testing/oracles.hpp"

namespace lfda {
namespace {

Image<float> constant_rgb(float r, float g, float b, size_t hw = 4) {
  Image<float> img(hw, hw, 3);
  for (size_t y = 0; y < hw; ++y) {
    for (size_t x = 0; x < hw; ++x) {
      img(y, x, 0) = r;
      img(y, x, 1) = g;
      img(y, x, 2) = b;
    }
  }
  return img;
}

Image<float> random_luma(size_t h, size_t w, uint64_t seed) {
  Image<float> img(h, w, 1);
  auto rng = testing::test_rng(seed);
  testing::fill_uniform(rng, img, 0.0, 1.0);
  return img;
}

Image<float> add_noise(const Image<float>& img, float amp, uint64_t seed) {
  Image<float> out = img;
  Rng rng = testing::test_rng(seed);
  std::uniform_real_distribution<float> d(-amp, amp);
  for (size_t i = 0; i < out.size(); ++i) {
    out.data()[i] = std::clamp(out.data()[i] + d(rng), 0.0f, 1.0f);
  }
  return out;
}

TEST(Luma, CoefficientsMatchTheStandards) {
  auto red = rgb_to_y(constant_rgb(1, 0, 0));
  auto green = rgb_to_y(constant_rgb(0, 1, 0));
  auto blue = rgb_to_y(constant_rgb(0, 0, 1));
  EXPECT_NEAR(red(0, 0, 0), 0.2126f, 1e-6);
  EXPECT_NEAR(green(0, 0, 0), 0.7152f, 1e-6);
  EXPECT_NEAR(blue(0, 0, 0), 0.0722f, 1e-6);

  auto red6 = rgb_to_y(constant_rgb(1, 0, 0), LumaStandard::kBT601);
  auto green6 = rgb_to_y(constant_rgb(0, 1, 0), LumaStandard::kBT601);
  auto blue6 = rgb_to_y(constant_rgb(0, 0, 1), LumaStandard::kBT601);
  EXPECT_NEAR(red6(0, 0, 0), 0.299f, 1e-6);
  EXPECT_NEAR(green6(0, 0, 0), 0.587f, 1e-6);
  EXPECT_NEAR(blue6(0, 0, 0), 0.114f, 1e-6);

  Image<float> gray(4, 4, 1);
  EXPECT_THROW(rgb_to_y(gray), std::invalid_argument);
}

TEST(Psnr, KnownValuesAndCap) {
  EXPECT_EQ(psnr_from_mse(0.0), 100.0);
  EXPECT_EQ(psnr_from_mse(1e-30), 100.0);
  EXPECT_DOUBLE_EQ(psnr_from_mse(0.25), 10.0 * std::log10(4.0));

  Image<float> zeros(8, 8, 1);
  for (size_t i = 0; i < zeros.size(); ++i) zeros.data()[i] = 0.0f;
  Image<float> half = zeros;
  for (size_t i = 0; i < half.size(); ++i) half.data()[i] = 0.5f;
  EXPECT_DOUBLE_EQ(psnr(zeros, half), 10.0 * std::log10(4.0));
  EXPECT_EQ(psnr(zeros, zeros), 100.0);
  // Peak scaling: same error on a 255 scale.
  EXPECT_DOUBLE_EQ(psnr(zeros, half, 255.0),
                   10.0 * std::log10(255.0 * 255.0 / 0.25));

  Image<float> other(4, 4, 1);
  EXPECT_THROW(mean_squared_error(zeros, other), std::invalid_argument);
}

TEST(MsSsim, PerfectReconstructionScoresOne) {
  auto img = random_luma(64, 64, 3);
  EXPECT_DOUBLE_EQ(ms_ssim(img, img), 1.0);
  EXPECT_EQ(ms_ssim_db_from_score(1.0), kMsSsimCapDb);
  EXPECT_NEAR(ms_ssim_db_from_score(0.9), 10.0, 1e-12);
}

TEST(MsSsim, MatchesBruteForceOracle) {
  // The library filter is separable; the oracle convolves the full 11x11
  // kernel and re-derives the scale count on its own.
  for (uint64_t trial = 0; trial < 4; ++trial) {
    auto ref = random_luma(64 + 8 * trial, 72, 100 + trial);
    auto rec = add_noise(ref, 0.03f * float(trial + 1), 200 + trial);
    double lib = ms_ssim(ref, rec);
    double oracle = testing::oracle_ms_ssim(ref, rec);
    EXPECT_NEAR(lib, oracle, 1e-6) << "trial " << trial;
  }
  // A structured (non-noise) pair as well: luma of two synthetic views.
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.height = 96;
  cfg.width = 96;
  cfg.dx_per_view = 2.0;
  auto grid = make_parallax_grid<float>(cfg);
  auto a = rgb_to_y(grid.view(3, 0));
  auto b = rgb_to_y(grid.view(3, 7));
  EXPECT_NEAR(ms_ssim(a, b), testing::oracle_ms_ssim(a, b), 1e-6);
}

TEST(MsSsim, DegradesMonotonicallyWithNoise) {
  auto ref = random_luma(96, 96, 11);
  double prev_ssim = 1.0;
  double prev_psnr = 101.0;
  for (float amp : {0.02f, 0.08f, 0.25f}) {
    auto rec = add_noise(ref, amp, 31);
    double s = ms_ssim(ref, rec);
    double p = psnr(ref, rec);
    EXPECT_LT(s, prev_ssim);
    EXPECT_LT(p, prev_psnr);
    EXPECT_GT(s, 0.0);
    prev_ssim = s;
    prev_psnr = p;
  }
}

TEST(MsSsim, SmallImagesReduceScalesAndWarn) {
  auto ref = random_luma(32, 32, 5);
  auto rec = add_noise(ref, 0.05f, 6);
  std::vector<std::string> notes;
  double s = ms_ssim(ref, rec, [&](const std::string& m) { notes.push_back(m); });
  EXPECT_GT(s, 0.0);
  EXPECT_LE(s, 1.0);
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_NE(notes[0].find("scales"), std::string::npos);

  auto tiny_a = random_luma(10, 10, 7);
  auto tiny_b = random_luma(10, 10, 8);
  EXPECT_THROW(ms_ssim(tiny_a, tiny_b), std::invalid_argument);

  Image<float> rgb(64, 64, 3);
  EXPECT_THROW(ms_ssim(rgb, rgb), std::invalid_argument);
}

TEST(GridMetrics, IdenticalGridsHitTheCaps) {
  SynthConfig cfg;
  cfg.seed = 12;
  cfg.height = 32;
  cfg.width = 32;
  auto grid = make_parallax_grid<float>(cfg);
  GridMetrics gm = evaluate_grids(grid, grid);
  EXPECT_EQ(gm.psnr_y, kPsnrCapDb);
  EXPECT_EQ(gm.psnr_rgb, kPsnrCapDb);
  EXPECT_DOUBLE_EQ(gm.msssim_y, 1.0);
  EXPECT_EQ(gm.msssim_y_db, kMsSsimCapDb);
}

TEST(GridMetrics, AggregationModesDiffer) {
  SynthConfig cfg;
  cfg.seed = 13;
  cfg.height = 32;
  cfg.width = 32;
  auto ref = make_parallax_grid<float>(cfg);
  auto rec = ref;
  // Corrupt exactly one view; the other 63 stay at the PSNR cap.
  rec.views[10] = add_noise(rec.views[10], 0.3f, 77);

  GridMetrics per_view = evaluate_grids(ref, rec);
  EvalOptions opts;
  opts.psnr_aggregate_mse_first = true;
  GridMetrics pooled = evaluate_grids(ref, rec, opts);
  // Pooling MSE first removes the per-view cap shelter, so it reads lower.
  EXPECT_LT(pooled.psnr_y, per_view.psnr_y);
  EXPECT_EQ(pooled.psnr_rgb, per_view.psnr_rgb);

  auto smaller = ref;
  smaller.height = 16;
  EXPECT_THROW(evaluate_grids(ref, smaller), std::invalid_argument);
}

TEST(GridMetrics, GridMseTracksASinglePixelEdit) {
  SynthConfig cfg;
  cfg.seed = 14;
  cfg.height = 16;
  cfg.width = 16;
  auto a = make_parallax_grid<float>(cfg);
  auto b = a;
  EXPECT_EQ(grid_mse(a, b), 0.0);
  b.views[5](3, 4, 1) += 0.25f;
  double delta = double(b.views[5](3, 4, 1)) - double(a.views[5](3, 4, 1));
  double expected = delta * delta / (16.0 * 16.0 * 3.0) / 64.0;
  EXPECT_NEAR(grid_mse(a, b), expected, 1e-15);
}

// ---------------------------------------------------------------------------
// Bjontegaard deltas.

std::pair<std::vector<double>, std::vector<double>> demo_curve() {
  return {{0.25, 0.5, 1.0, 2.0}, {30.0, 33.0, 36.0, 38.5}};
}

TEST(Bd, IdenticalCurvesGiveExactZero) {
  auto [r, q] = demo_curve();
  BdResult bd = bd_metrics_arrays(r, q, r, q);
  EXPECT_EQ(bd.bd_rate_percent, 0.0);
  EXPECT_EQ(bd.bd_psnr_db, 0.0);
  EXPECT_FALSE(bd.low_confidence);
}

TEST(Bd, ConstantQualityShiftIsRecovered) {
  auto [r, q] = demo_curve();
  std::vector<double> q_up = q;
  for (double& v : q_up) v += 1.0;
  BdResult bd = bd_metrics_arrays(r, q, r, q_up);
  EXPECT_NEAR(bd.bd_psnr_db, 1.0, 1e-9);
  EXPECT_LT(bd.bd_rate_percent, 0.0);
}

TEST(Bd, DoubledRateCostsOneHundredPercent) {
  auto [r, q] = demo_curve();
  std::vector<double> r2 = r;
  for (double& v : r2) v *= 2.0;
  BdResult bd = bd_metrics_arrays(r, q, r2, q);
  EXPECT_NEAR(bd.bd_rate_percent, 100.0, 1e-6);
  EXPECT_LT(bd.bd_psnr_db, 0.0);
}

TEST(Bd, MatchesNumericIntegrationOracle) {
  // 20 random monotone 4-point pairs. A cubic through 4 points is exact, so
  // an independent Newton interpolant + dense trapezoid must agree closely.
  Rng rng = testing::test_rng(404);
  std::uniform_real_distribution<double> jitter(0.02, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> ra(4), qa(4), rb(4), qb(4);
    double r = 0.2 + jitter(rng), q = 28.0 + 10.0 * jitter(rng);
    for (int i = 0; i < 4; ++i) {
      ra[size_t(i)] = r;
      qa[size_t(i)] = q;
      r += 0.1 + jitter(rng);
      q += 0.5 + 4.0 * jitter(rng);
    }
    // Curve B: same grid nudged, so overlap in both rate and quality holds.
    for (int i = 0; i < 4; ++i) {
      rb[size_t(i)] = ra[size_t(i)] * (1.0 + 0.1 * jitter(rng));
      qb[size_t(i)] = qa[size_t(i)] + 0.5 * jitter(rng);
    }
    BdResult lib = bd_metrics_arrays(ra, qa, rb, qb);
    auto [oracle_rate, oracle_q] = testing::oracle_bd(ra, qa, rb, qb);
    EXPECT_NEAR(lib.bd_psnr_db, oracle_q, 1e-6) << "trial " << trial;
    EXPECT_NEAR(lib.bd_rate_percent, oracle_rate, 1e-6) << "trial " << trial;
  }
}

TEST(Bd, TwoPointCurvesAreLowConfidence) {
  std::vector<double> ra = {0.67, 0.92}, qa = {32.80, 33.07};
  std::vector<double> rb = {0.63, 0.86}, qb = {33.62, 33.84};
  BdResult bd = bd_metrics_arrays(ra, qa, rb, qb);
  EXPECT_TRUE(bd.low_confidence);
  EXPECT_TRUE(std::isfinite(bd.bd_rate_percent));
  EXPECT_TRUE(std::isfinite(bd.bd_psnr_db));
  // The B curve sits up and to the left: better quality at lower rate.
  EXPECT_LT(bd.bd_rate_percent, 0.0);
  EXPECT_GT(bd.bd_psnr_db, 0.0);
}

TEST(Bd, RejectsMalformedCurves) {
  auto [r, q] = demo_curve();
  EXPECT_THROW(bd_metrics_arrays({0.5}, {30.0}, r, q), std::invalid_argument);
  EXPECT_THROW(bd_metrics_arrays({0.5, 0.4}, {30, 31}, r, q),
               std::invalid_argument);
  EXPECT_THROW(bd_metrics_arrays({0.0, 0.4}, {30, 31}, r, q),
               std::invalid_argument);
  EXPECT_THROW(bd_metrics_arrays({0.5, 0.6}, {30}, r, q),
               std::invalid_argument);
  // Disjoint on both axes: nothing to compare against.
  EXPECT_THROW(
      bd_metrics_arrays({0.1, 0.2}, {30, 31}, {50.0, 60.0}, {40, 41}),
      std::runtime_error);
  // One shared axis is enough; the other is extrapolated and flagged.
  BdResult one_axis =
      bd_metrics_arrays({0.1, 0.2}, {30, 31}, {50.0, 60.0}, {30, 31});
  EXPECT_TRUE(one_axis.low_confidence);
  EXPECT_TRUE(std::isfinite(one_axis.bd_rate_percent));
}

TEST(Bd, MemberPointerSelectsTheMetric) {
  RDCurve a, b;
  for (int i = 0; i < 3; ++i) {
    RDPoint p;
    p.bpp = 0.25 * (i + 1);
    p.psnr_y = 30.0 + 2.0 * i;
    p.msssim_y_db = 12.0 + i;
    a.points.push_back(p);
    p.psnr_y += 1.5;  // psnr differs, msssim identical
    b.points.push_back(p);
  }
  BdResult on_psnr = bd_metrics(a, b);
  BdResult on_ssim = bd_metrics(a, b, &RDPoint::msssim_y_db);
  EXPECT_NEAR(on_psnr.bd_psnr_db, 1.5, 1e-9);
  EXPECT_EQ(on_ssim.bd_psnr_db, 0.0);
}

TEST(Bench, ReportsPerGridAverages) {
  ModelConfig mc;
  mc.color_hidden = 6;
  mc.color_bottleneck = 6;
  mc.disparity_hidden = 4;
  mc.disparity_bottleneck = 2;
  mc.seed = 8;
  auto model = make_model<float>(mc);
  SynthConfig cfg;
  cfg.height = 32;
  cfg.width = 32;
  std::vector<LightFieldGrid<float>> grids = {make_parallax_grid<float>(cfg)};
  TimingReport rep = benchmark_timing(grids, model, 1);
  EXPECT_GT(rep.encode_seconds, 0.0);
  EXPECT_GT(rep.decode_seconds, 0.0);
  EXPECT_EQ(rep.grids, 1u);
  EXPECT_EQ(rep.threads, 1);
  EXPECT_FALSE(rep.hardware.empty());

  std::vector<LightFieldGrid<float>> none;
  EXPECT_THROW(benchmark_timing(none, model, 1), std::invalid_argument);
}

}  // namespace
}  // namespace lfda
