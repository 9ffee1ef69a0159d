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
#ifndef LFDA_NN_MODEL_HPP_
#define LFDA_NN_MODEL_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfda/core/bytes.hpp"
#include "lfda/core/digest.hpp"
#include "lfda/core/random.hpp"
#include "lfda/entropy/prior.hpp"
#include "lfda/lf/light_field.hpp"
#include "lfda/nn/transform.hpp"

namespace lfda {

// Full codec model: one color autoencoder over the 8-view row, eight
// view-conditioned disparity autoencoders over 4-view feature tensors, and
// the two factorized priors (one for color latents, one shared by all
// disparity latents).
struct ModelConfig {
  int color_layers = 4;
  int disparity_layers = 3;
  int color_hidden = 32;
  int color_bottleneck = 32;  // production-scale presets: 190/320/512/720
  int disparity_hidden = 16;
  int disparity_bottleneck = 8;
  bool use_disparity = true;
  bool share_disparity_weights = false;
  uint64_t seed = 1;
  double lambda = 0.01;
};

template <typename T>
struct Model {
  ModelConfig config;
  TransformStack<T> color_analysis;
  TransformStack<T> color_synthesis;
  // One pair per view, or a single shared pair (see config).
  std::vector<TransformStack<T>> disparity_analysis;
  std::vector<TransformStack<T>> disparity_synthesis;
  FactorizedPrior<T> prior_color;
  FactorizedPrior<T> prior_disparity;

  const TransformStack<T>& disp_a(size_t view) const {
    return disparity_analysis[view % disparity_analysis.size()];
  }
  const TransformStack<T>& disp_s(size_t view) const {
    return disparity_synthesis[view % disparity_synthesis.size()];
  }
};

template <typename T>
Model<T> make_model(const ModelConfig& cfg) {
  Model<T> m;
  m.config = cfg;
  Rng rng(derive_seed(cfg.seed, 0x6d6f64656c));
  m.color_analysis =
      make_transform<T>(TransformRole::kColorAnalysis, cfg.color_layers, 3,
                        cfg.color_hidden, cfg.color_bottleneck, rng);
  m.color_synthesis =
      make_transform<T>(TransformRole::kColorSynthesis, cfg.color_layers,
                        cfg.color_bottleneck, cfg.color_hidden, 3, rng);
  if (cfg.use_disparity) {
    const size_t copies = cfg.share_disparity_weights ? 1 : kViewsPerRow;
    for (size_t i = 0; i < copies; ++i) {
      m.disparity_analysis.push_back(make_transform<T>(
          TransformRole::kDisparityAnalysis, cfg.disparity_layers, 3,
          cfg.disparity_hidden, cfg.disparity_bottleneck, rng));
      m.disparity_synthesis.push_back(make_transform<T>(
          TransformRole::kDisparitySynthesis, cfg.disparity_layers,
          cfg.disparity_bottleneck, cfg.disparity_hidden, 2, rng));
    }
  }
  m.prior_color = make_prior<T>(cfg.color_bottleneck, rng);
  m.prior_disparity = make_prior<T>(cfg.disparity_bottleneck, rng);
  return m;
}

// Deterministic walk over every parameter vector; checkpoint layout, the
// optimizer state, and model_id all derive from this order.
template <typename T, typename F>
void visit_params(Model<T>& m, F&& f) {
  visit_params(m.color_analysis, f);
  visit_params(m.color_synthesis, f);
  for (auto& s : m.disparity_analysis) visit_params(s, f);
  for (auto& s : m.disparity_synthesis) visit_params(s, f);
  visit_params(m.prior_color, f);
  visit_params(m.prior_disparity, f);
}

template <typename T>
size_t param_count(const Model<T>& m) {
  size_t n = 0;
  visit_params(const_cast<Model<T>&>(m),
               [&](std::vector<T>& v) { n += v.size(); });
  return n;
}

// Gradient accumulator with the model's exact parameter layout.
template <typename T>
Model<T> zeros_like(const Model<T>& m) {
  Model<T> g = m;
  visit_params(g, [](std::vector<T>& v) { std::fill(v.begin(), v.end(), T(0)); });
  return g;
}

// 8-byte identity of (architecture, parameters). Parameters are hashed as
// f32 bit patterns, which is exact for the float production models.
template <typename T>
uint64_t model_id(const Model<T>& m) {
  Digest64 d;
  const ModelConfig& c = m.config;
  float head[9] = {float(c.color_layers),        float(c.disparity_layers),
                   float(c.color_hidden),        float(c.color_bottleneck),
                   float(c.disparity_hidden),    float(c.disparity_bottleneck),
                   c.use_disparity ? 1.f : 0.f,
                   c.share_disparity_weights ? 1.f : 0.f,
                   0.f};
  d.update_f32(head, 9);
  std::vector<float> tmp;
  visit_params(const_cast<Model<T>&>(m), [&](std::vector<T>& v) {
    tmp.resize(v.size());
    for (size_t i = 0; i < v.size(); ++i) tmp[i] = float(v[i]);
    d.update_f32(tmp.data(), tmp.size());
  });
  return d.value();
}

// Flat Adam moment buffers aligned with the visit_params order.
struct OptState {
  uint64_t step = 0;
  std::vector<float> m;
  std::vector<float> v;
};

// ---------------------------------------------------------------------------
// Checkpoint container "LFCK" v1: config, every parameter vector as f32 in
// visit order, optional optimizer state, and the model_id for integrity.

inline constexpr char kCheckpointMagic[4] = {'L', 'F', 'C', 'K'};

template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& model,
                     const OptState* opt = nullptr) {
  Bytes buf;
  ByteWriter w(buf);
  w.raw({reinterpret_cast<const uint8_t*>(kCheckpointMagic), 4});
  w.u8(1);
  const ModelConfig& c = model.config;
  w.u32(uint32_t(c.color_layers));
  w.u32(uint32_t(c.disparity_layers));
  w.u32(uint32_t(c.color_hidden));
  w.u32(uint32_t(c.color_bottleneck));
  w.u32(uint32_t(c.disparity_hidden));
  w.u32(uint32_t(c.disparity_bottleneck));
  w.u8(uint8_t((c.use_disparity ? 1 : 0) | (c.share_disparity_weights ? 2 : 0)));
  w.u64(c.seed);
  w.f64(c.lambda);
  visit_params(const_cast<Model<T>&>(model), [&](std::vector<T>& v) {
    w.u64(v.size());
    for (T x : v) w.f32(float(x));
  });
  if (opt) {
    w.u8(1);
    w.u64(opt->step);
    w.u64(opt->m.size());
    for (float x : opt->m) w.f32(x);
    for (float x : opt->v) w.f32(x);
  } else {
    w.u8(0);
  }
  w.u64(model_id(model));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open checkpoint for write: " + path);
  f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

template <typename T>
Model<T> load_checkpoint(const std::string& path, OptState* opt = nullptr) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  ByteReader r({bytes.data(), bytes.size()});
  auto magic = r.raw(4);
  if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  if (r.u8() != 1) throw std::runtime_error("unsupported checkpoint version");
  ModelConfig c;
  c.color_layers = int(r.u32());
  c.disparity_layers = int(r.u32());
  c.color_hidden = int(r.u32());
  c.color_bottleneck = int(r.u32());
  c.disparity_hidden = int(r.u32());
  c.disparity_bottleneck = int(r.u32());
  uint8_t flags = r.u8();
  c.use_disparity = (flags & 1) != 0;
  c.share_disparity_weights = (flags & 2) != 0;
  c.seed = r.u64();
  c.lambda = r.f64();
  Model<T> m = make_model<T>(c);
  visit_params(m, [&](std::vector<T>& v) {
    uint64_t n = r.u64();
    if (n != v.size()) {
      throw std::runtime_error("checkpoint parameter size mismatch");
    }
    for (auto& x : v) x = T(r.f32());
  });
  uint8_t has_opt = r.u8();
  if (has_opt) {
    uint64_t step = r.u64();
    uint64_t n = r.u64();
    if (opt) {
      opt->step = step;
      opt->m.resize(n);
      opt->v.resize(n);
      for (auto& x : opt->m) x = r.f32();
      for (auto& x : opt->v) x = r.f32();
    } else {
      for (uint64_t i = 0; i < 2 * n; ++i) r.f32();
    }
  } else if (opt) {
    opt->step = 0;
    opt->m.assign(param_count(m), 0.f);
    opt->v.assign(param_count(m), 0.f);
  }
  uint64_t stored_id = r.u64();
  if (stored_id != model_id(m)) {
    throw std::runtime_error("checkpoint corrupt: model_id mismatch");
  }
  return m;
}

}  // namespace lfda

#endif  // LFDA_NN_MODEL_HPP_
