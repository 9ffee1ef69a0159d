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
#ifndef LFDA_TRAIN_TRAINER_HPP_
#define LFDA_TRAIN_TRAINER_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfda/train/adam.hpp"
#include "lfda/train/loss.hpp"

namespace lfda {

struct TrainConfig {
  double lambda = 0.01;
  AdamConfig adam;  // lr 1e-4, betas 0.9/0.999, eps 1e-7
  int batch_size = 30;
  uint64_t steps = 0;
  uint64_t seed = 1;
  size_t patch_size = 64;
  size_t patch_stride = 16;
  int threads = 1;
  uint64_t checkpoint_every = 0;  // 0 = only at the end
  std::string checkpoint_path;    // empty = no checkpoints written
};

template <typename T>
struct RDRecord {
  uint64_t step = 0;
  T loss = 0;
  T rate_bpp = 0;
  T mse = 0;  // carries the 255^2 scale; L = rate_bpp + lambda * mse
  double lambda = 0;
};

// One joint Adam update on all transforms and priors. `step` is the global
// 0-based step index; it seeds the dither so runs are replayable.
template <typename T>
RDRecord<T> train_step(Model<T>& model, OptState& opt, const TrainConfig& cfg,
                       const std::vector<PatchSample<T>>& batch,
                       uint64_t step) {
  Model<T> grads = zeros_like(model);
  RdParts<T> parts =
      rd_loss(model, T(cfg.lambda), batch, derive_seed(cfg.seed, 0x5347, step),
              &grads, cfg.threads);
  if (!std::isfinite(double(parts.loss))) {
    throw std::runtime_error(
        "train_step: non-finite loss at step " + std::to_string(step) +
        " (rate=" + std::to_string(double(parts.rate_bpp)) +
        ", mse=" + std::to_string(double(parts.mse)) + ")");
  }
  adam_step(model, grads, opt, cfg.adam);
  return {step, parts.loss, parts.rate_bpp, parts.mse, cfg.lambda};
}

namespace detail {

// A patch address: materialized lazily so epochs over large corpora don't
// hold every window in memory.
struct PatchRef {
  size_t grid = 0;
  int row = 0;
  size_t s0 = 0, t0 = 0;
};

template <typename T>
std::vector<PatchRef> enumerate_patches(
    const std::vector<LightFieldGrid<T>>& grids, size_t p, size_t stride) {
  std::vector<PatchRef> refs;
  for (size_t g = 0; g < grids.size(); ++g) {
    const auto& grid = grids[g];
    if (grid.height < p || grid.width < p) continue;
    for (int r = 0; r < int(kViewsPerRow); ++r) {
      for (size_t s0 = 0; s0 + p <= grid.height; s0 += stride) {
        for (size_t t0 = 0; t0 + p <= grid.width; t0 += stride) {
          refs.push_back({g, r, s0, t0});
        }
      }
    }
  }
  return refs;
}

template <typename T>
PatchSample<T> cut_patch(const std::vector<LightFieldGrid<T>>& grids,
                         const PatchRef& ref, size_t p) {
  const auto& grid = grids[ref.grid];
  PatchSample<T> s;
  s.row_index = ref.row;
  s.s0 = ref.s0;
  s.t0 = ref.t0;
  s.patch = Tensor4<T>(kViewsPerRow, p, p, 3);
  for (size_t i = 0; i < kViewsPerRow; ++i) {
    const Image<T>& v = grid.view(size_t(ref.row), i);
    for (size_t y = 0; y < p; ++y) {
      for (size_t x = 0; x < p; ++x) {
        for (size_t c = 0; c < 3; ++c) {
          s.patch(i, y, x, c) = v(ref.s0 + y, ref.t0 + x, c);
        }
      }
    }
  }
  return s;
}

// The shuffled order of epoch e, derived purely from (seed, e): a resumed
// run regenerates the identical sample stream without serialized RNG state.
inline std::vector<size_t> epoch_order(size_t n, uint64_t seed, uint64_t epoch) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t(0));
  Rng rng(derive_seed(seed, 0x45504F43, epoch));
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

}  // namespace detail

// Full training run from `start_step` to cfg.steps. The sample stream is a
// pure function of (cfg.seed, global sample counter), so resuming from a
// checkpoint replays exactly the records an uninterrupted run would emit.
template <typename T>
std::vector<RDRecord<T>> train_loop(
    Model<T>& model, OptState& opt, const TrainConfig& cfg,
    const std::vector<LightFieldGrid<T>>& dataset, uint64_t start_step = 0,
    const std::function<void(const RDRecord<T>&)>& on_record = nullptr) {
  if (dataset.empty()) throw std::invalid_argument("train_loop: empty dataset");
  const std::vector<detail::PatchRef> refs =
      detail::enumerate_patches(dataset, cfg.patch_size, cfg.patch_stride);
  if (refs.empty()) {
    throw std::invalid_argument("train_loop: no patches (images too small?)");
  }
  std::vector<RDRecord<T>> log;
  uint64_t cached_epoch = ~0ull;
  std::vector<size_t> order;
  for (uint64_t step = start_step; step < cfg.steps; ++step) {
    std::vector<PatchSample<T>> batch;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const uint64_t g = step * uint64_t(cfg.batch_size) + uint64_t(b);
      const uint64_t epoch = g / refs.size();
      if (epoch != cached_epoch) {
        order = detail::epoch_order(refs.size(), cfg.seed, epoch);
        cached_epoch = epoch;
      }
      batch.push_back(detail::cut_patch(dataset, refs[order[g % refs.size()]],
                                        cfg.patch_size));
    }
    RDRecord<T> rec = train_step(model, opt, cfg, batch, step);
    if (on_record) on_record(rec);
    log.push_back(rec);
    const bool last = step + 1 == cfg.steps;
    if (!cfg.checkpoint_path.empty() &&
        (last || (cfg.checkpoint_every != 0 &&
                  (step + 1) % cfg.checkpoint_every == 0))) {
      model.config.lambda = cfg.lambda;
      save_checkpoint(cfg.checkpoint_path, model, &opt);
    }
  }
  return log;
}

template <typename T>
struct SweepResult {
  double lambda = 0;
  Model<T> model;
  std::vector<RDRecord<T>> log;
};

// Independent trainings per lambda, each from a fresh model built with the
// same init seed, so the runs differ only in lambda.
template <typename T>
std::vector<SweepResult<T>> lambda_sweep(
    const ModelConfig& model_cfg, const TrainConfig& cfg_template,
    const std::vector<double>& lambdas,
    const std::vector<LightFieldGrid<T>>& dataset) {
  if (lambdas.size() < 2) {
    throw std::invalid_argument("lambda_sweep: need at least 2 lambdas");
  }
  std::vector<SweepResult<T>> out;
  for (size_t i = 0; i < lambdas.size(); ++i) {
    SweepResult<T> r;
    r.lambda = lambdas[i];
    ModelConfig mc = model_cfg;
    mc.lambda = lambdas[i];
    r.model = make_model<T>(mc);
    OptState opt;
    TrainConfig cfg = cfg_template;
    cfg.lambda = lambdas[i];
    cfg.checkpoint_path.clear();  // caller saves what it wants
    r.log = train_loop(r.model, opt, cfg, dataset);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lfda

#endif  // LFDA_TRAIN_TRAINER_HPP_
