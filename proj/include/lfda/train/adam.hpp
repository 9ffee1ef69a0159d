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
#ifndef LFDA_TRAIN_ADAM_HPP_
#define LFDA_TRAIN_ADAM_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfda/nn/model.hpp"

namespace lfda {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

// One bias-corrected Adam update over every parameter, jointly. Moment
// buffers are flat in visit_params order; grads must share the model layout.
template <typename T>
void adam_step(Model<T>& model, const Model<T>& grads, OptState& st,
               const AdamConfig& cfg) {
  const size_t total = param_count(model);
  if (st.m.size() != total) {
    st.m.assign(total, 0.f);
    st.v.assign(total, 0.f);
  }
  st.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(st.step));

  std::vector<std::vector<T>*> pv, gv;
  visit_params(model, [&](std::vector<T>& v) { pv.push_back(&v); });
  visit_params(const_cast<Model<T>&>(grads),
               [&](std::vector<T>& v) { gv.push_back(&v); });
  if (pv.size() != gv.size()) {
    throw std::invalid_argument("adam_step: grads layout mismatch");
  }
  size_t k = 0;
  for (size_t b = 0; b < pv.size(); ++b) {
    std::vector<T>& p = *pv[b];
    const std::vector<T>& g = *gv[b];
    if (p.size() != g.size()) {
      throw std::invalid_argument("adam_step: grads size mismatch");
    }
    for (size_t i = 0; i < p.size(); ++i, ++k) {
      const double gi = double(g[i]);
      const double m = cfg.beta1 * st.m[k] + (1.0 - cfg.beta1) * gi;
      const double v = cfg.beta2 * st.v[k] + (1.0 - cfg.beta2) * gi * gi;
      st.m[k] = float(m);
      st.v[k] = float(v);
      p[i] -= T(cfg.learning_rate * (m / bc1) /
                (std::sqrt(v / bc2) + cfg.epsilon));
    }
  }
}

}  // namespace lfda

#endif  // LFDA_TRAIN_ADAM_HPP_
