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
#ifndef LFDA_EVAL_BENCH_HPP_
#define LFDA_EVAL_BENCH_HPP_

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include "lfda/codec/codec.hpp"

namespace lfda {

struct TimingReport {
  double encode_seconds = 0;  // average per grid
  double decode_seconds = 0;
  int threads = 1;
  size_t grids = 0;
  std::string hardware;
};

inline std::string cpu_model_string() {
  std::ifstream f("/proc/cpuinfo");
  std::string line;
  while (std::getline(f, line)) {
    auto pos = line.find("model name");
    if (pos != std::string::npos) {
      auto colon = line.find(':');
      if (colon != std::string::npos && colon + 2 <= line.size()) {
        return line.substr(colon + 2);
      }
    }
  }
  return "unknown";
}

template <typename T>
TimingReport benchmark_timing(const std::vector<LightFieldGrid<T>>& grids,
                              const Model<T>& model, int threads) {
  if (grids.empty()) throw std::invalid_argument("benchmark_timing: no grids");
  using Clock = std::chrono::steady_clock;
  TimingReport rep;
  rep.threads = threads;
  rep.grids = grids.size();
  rep.hardware = cpu_model_string();
  for (const auto& g : grids) {
    auto t0 = Clock::now();
    Bytes bytes = encode_lightfield(g, model, threads);
    auto t1 = Clock::now();
    LightFieldGrid<T> rec = decode_lightfield(bytes, model, threads);
    auto t2 = Clock::now();
    rep.encode_seconds += std::chrono::duration<double>(t1 - t0).count();
    rep.decode_seconds += std::chrono::duration<double>(t2 - t1).count();
    (void)rec;
  }
  rep.encode_seconds /= double(grids.size());
  rep.decode_seconds /= double(grids.size());
  return rep;
}

}  // namespace lfda

#endif  // LFDA_EVAL_BENCH_HPP_
