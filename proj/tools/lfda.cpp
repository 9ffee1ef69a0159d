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

// lfda command line tool: compress / decompress / train / eval / bdrate,
// plus synthetic-data generation and timing helpers.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfda/codec/codec.hpp"
#include "lfda/eval/bd.hpp"
#include "lfda/eval/bench.hpp"
#include "lfda/eval/metrics.hpp"
#include "lfda/io/image.hpp"
#include "lfda/lf/light_field.hpp"
#include "lfda/lf/synthetic.hpp"
#include "lfda/nn/model.hpp"
#include "lfda/train/trainer.hpp"

namespace {

using json = nlohmann::json;
using lfda::Bytes;

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(f),
               std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const Bytes& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) throw std::runtime_error("short write to " + path);
}

// Reads an RD curve CSV. Expected columns: bpp, psnr_y, msssim_y_db
// [, psnr_rgb]; a header line and comment lines (#) are skipped.
lfda::RDCurve read_curve_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  lfda::RDCurve curve;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    lfda::RDPoint p;
    if (!(ss >> p.bpp >> p.psnr_y)) continue;  // header or junk
    ss >> p.msssim_y_db >> p.psnr_rgb;          // optional columns
    curve.points.push_back(p);
  }
  if (curve.points.empty())
    throw std::runtime_error("no RD points parsed from " + path);
  return curve;
}

// Diverging false-color map for a signed disparity plane: blue = negative,
// white = zero, red = positive, normalized by the per-image max magnitude.
lfda::Image<float> flow_false_color(const lfda::Image<float>& flow,
                                    size_t channel) {
  lfda::Image<float> out(flow.h(), flow.w(), 3);
  float peak = 1e-6f;
  for (size_t i = 0; i < flow.h() * flow.w(); ++i)
    peak = std::max(peak, std::abs(flow[i * flow.c() + channel]));
  for (size_t y = 0; y < flow.h(); ++y) {
    for (size_t x = 0; x < flow.w(); ++x) {
      float t = flow.at(y, x, channel) / peak;  // [-1, 1]
      out.at(y, x, 0) = t > 0 ? 1.0f : 1.0f + t;
      out.at(y, x, 1) = 1.0f - std::abs(t);
      out.at(y, x, 2) = t < 0 ? 1.0f : 1.0f - t;
    }
  }
  return out;
}

int cmd_compress(const std::string& input, const std::string& model_path,
                 const std::string& output, int threads) {
  auto grid = lfda::load_sai_grid<float>(input);
  auto model = lfda::load_checkpoint<float>(model_path);
  Bytes bytes = lfda::encode_lightfield(grid, model, threads);
  write_file(output, bytes);
  double bpp = lfda::container_bpp(bytes.size(), grid.height, grid.width);
  std::printf("%s: %zu bytes, %.4f bpp (%zux%zu views %zux%zu)\n",
              output.c_str(), bytes.size(), bpp, grid.u_count, grid.v_count,
              grid.height, grid.width);
  return 0;
}

int cmd_decompress(const std::string& input, const std::string& model_path,
                   const std::string& output, int threads,
                   const std::string& dump_disparity) {
  Bytes bytes = read_file(input);
  auto model = lfda::load_checkpoint<float>(model_path);
  auto grid = lfda::decode_lightfield(bytes, model, threads);
  lfda::save_sai_grid(output, grid);
  std::printf("%s: wrote %zu views to %s\n", input.c_str(),
              grid.views.size(), output.c_str());
  if (!dump_disparity.empty()) {
    std::filesystem::create_directories(dump_disparity);
    for (int r = 0; r < int(lfda::kViewsPerRow); ++r) {
      lfda::RowLatents<float> latents;
      lfda::decode_single_row(bytes, model, r, &latents);
      for (size_t i = 0; i < latents.flows.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "disparity_%02d_%02zu.png", r, i);
        auto img = flow_false_color(latents.flows[i], 0);
        lfda::save_image(
            (std::filesystem::path(dump_disparity) / name).string(), img);
      }
    }
    std::printf("disparity maps dumped to %s\n", dump_disparity.c_str());
  }
  return 0;
}

template <typename T>
std::vector<lfda::LightFieldGrid<T>> load_manifest_grids(
    const std::string& manifest) {
  std::vector<lfda::LightFieldGrid<T>> grids;
  for (const auto& dir : lfda::read_manifest(manifest)) {
    grids.push_back(lfda::load_sai_grid<T>(dir));
  }
  if (grids.empty()) throw std::runtime_error("empty manifest: " + manifest);
  return grids;
}

void write_rd_log(const std::string& path,
                  const std::vector<lfda::RDRecord<float>>& log) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "step,loss,rate_bpp,mse,lambda\n";
  for (const auto& r : log) {
    f << r.step << ',' << r.loss << ',' << r.rate_bpp << ',' << r.mse << ','
      << r.lambda << '\n';
  }
}

int cmd_train(const std::string& manifest, double lambda, uint64_t steps,
              int channels, int disp_channels, uint64_t seed, int batch,
              size_t patch, int threads, bool no_disparity,
              const std::string& out, const std::string& log_path,
              const std::string& resume, uint64_t checkpoint_every) {
  auto grids = load_manifest_grids<float>(manifest);

  lfda::TrainConfig cfg;
  cfg.lambda = lambda;
  cfg.steps = steps;
  cfg.seed = seed;
  cfg.batch_size = batch;
  cfg.patch_size = patch;
  cfg.threads = threads;
  cfg.checkpoint_path = out;
  cfg.checkpoint_every = checkpoint_every;

  lfda::Model<float> model;
  lfda::OptState opt;
  if (!resume.empty()) {
    model = lfda::load_checkpoint<float>(resume, &opt);
  } else {
    lfda::ModelConfig mc;
    mc.color_hidden = channels;
    mc.color_bottleneck = channels;
    mc.disparity_hidden = disp_channels;
    mc.use_disparity = !no_disparity;
    mc.seed = seed;
    mc.lambda = lambda;
    model = lfda::make_model<float>(mc);
  }

  auto log = lfda::train_loop(model, opt, cfg, grids);
  if (!log_path.empty()) write_rd_log(log_path, log);

  // Echo the effective configuration beside the checkpoint.
  json j;
  j["lambda"] = lambda;
  j["steps"] = steps;
  j["seed"] = seed;
  j["batch_size"] = batch;
  j["patch_size"] = patch;
  j["color_channels"] = model.config.color_hidden;
  j["disparity_channels"] = model.config.disparity_hidden;
  j["use_disparity"] = model.config.use_disparity;
  j["model_id"] = lfda::model_id(model);
  std::ofstream(out + ".json") << j.dump(2) << '\n';

  const auto& last = log.back();
  std::printf("step %llu: loss %.5f rate %.5f bpp mse %.5f -> %s\n",
              (unsigned long long)last.step, double(last.loss),
              double(last.rate_bpp), double(last.mse), out.c_str());
  return 0;
}

int cmd_eval(const std::string& ref_dir, const std::string& rec_dir,
             const std::string& bitstream, const std::string& out,
             const std::string& csv, bool bt601) {
  auto ref = lfda::load_sai_grid<float>(ref_dir);
  auto rec = lfda::load_sai_grid<float>(rec_dir);
  lfda::EvalOptions opts;
  if (bt601) opts.luma = lfda::LumaStandard::kBT601;
  auto m = lfda::evaluate_grids(ref, rec, opts);

  double bpp = 0;
  if (!bitstream.empty()) {
    Bytes bytes = read_file(bitstream);
    bpp = lfda::container_bpp(bytes.size(), ref.height, ref.width);
  }

  json j;
  j["psnr_y_db"] = m.psnr_y;
  j["psnr_rgb_db"] = m.psnr_rgb;
  j["msssim_y"] = m.msssim_y;
  j["msssim_y_db"] = m.msssim_y_db;
  if (!bitstream.empty()) j["bpp"] = bpp;
  j["ref"] = ref_dir;
  j["rec"] = rec_dir;
  std::string text = j.dump(2);
  if (!out.empty()) {
    std::ofstream(out) << text << '\n';
  }
  std::printf("%s\n", text.c_str());

  if (!csv.empty()) {
    bool fresh = !std::filesystem::exists(csv);
    std::ofstream f(csv, std::ios::app);
    if (fresh) f << "bpp,psnr_y,msssim_y_db,psnr_rgb\n";
    f << bpp << ',' << m.psnr_y << ',' << m.msssim_y_db << ',' << m.psnr_rgb
      << '\n';
  }
  return 0;
}

int cmd_bdrate(const std::string& curve_a, const std::string& curve_b,
               const std::string& metric) {
  auto a = read_curve_csv(curve_a);
  auto b = read_curve_csv(curve_b);
  double lfda::RDPoint::*field = &lfda::RDPoint::psnr_y;
  if (metric == "msssim_y_db") field = &lfda::RDPoint::msssim_y_db;
  else if (metric == "psnr_rgb") field = &lfda::RDPoint::psnr_rgb;
  else if (metric != "psnr_y")
    throw std::runtime_error("unknown metric: " + metric);
  auto bd = lfda::bd_metrics(a, b, field);
  std::printf("BD-rate: %+.3f%%  BD-%s: %+.4f dB%s\n", bd.bd_rate_percent,
              metric.c_str(), bd.bd_psnr_db,
              bd.low_confidence ? "  (low confidence: 2-point curve)" : "");
  return 0;
}

int cmd_make_synthetic(const std::string& out, uint64_t seed, size_t height,
                       size_t width, double dx, double dy) {
  lfda::SynthConfig cfg;
  cfg.seed = seed;
  cfg.height = height;
  cfg.width = width;
  cfg.dx_per_view = dx;
  cfg.dy_per_view = dy;
  auto grid = lfda::make_parallax_grid<float>(cfg);
  lfda::save_sai_grid(out, grid);
  std::printf("wrote %zux%zu synthetic grid (%zux%zu px) to %s\n",
              grid.u_count, grid.v_count, grid.height, grid.width,
              out.c_str());
  return 0;
}

int cmd_bench(const std::vector<std::string>& inputs,
              const std::string& model_path, int threads) {
  std::vector<lfda::LightFieldGrid<float>> grids;
  for (const auto& dir : inputs) grids.push_back(lfda::load_sai_grid<float>(dir));
  auto model = lfda::load_checkpoint<float>(model_path);
  auto rep = lfda::benchmark_timing(grids, model, threads);
  std::printf("grids: %zu  threads: %d\n", rep.grids, rep.threads);
  std::printf("encode: %.3f s/grid  decode: %.3f s/grid\n",
              rep.encode_seconds, rep.decode_seconds);
  std::printf("hardware: %s\n", rep.hardware.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lfda: learned light field codec"};
  app.require_subcommand(1);

  std::string input, output, model_path, manifest, ref_dir, rec_dir;
  std::string bitstream, report_out, csv, curve_a, curve_b;
  std::string metric = "psnr_y", log_path, resume, dump_disparity;
  std::vector<std::string> bench_inputs;
  int threads = 1, channels = 32, disp_channels = 16, batch = 30;
  uint64_t steps = 1000, seed = 1, checkpoint_every = 0;
  size_t patch = 64, height = 128, width = 128;
  double lambda = 0.01, dx = 1.0, dy = 0.0;
  bool no_disparity = false, bt601 = false;

  auto* c = app.add_subcommand("compress", "encode an SAI grid");
  c->add_option("--input", input, "SAI directory")->required();
  c->add_option("--model", model_path, "checkpoint")->required();
  c->add_option("--output", output, "output .lfda file")->required();
  c->add_option("--threads", threads, "row workers");

  auto* d = app.add_subcommand("decompress", "decode an .lfda file");
  d->add_option("--input", input, ".lfda file")->required();
  d->add_option("--model", model_path, "checkpoint")->required();
  d->add_option("--output", output, "output SAI directory")->required();
  d->add_option("--threads", threads, "row workers");
  d->add_option("--dump-disparity", dump_disparity,
                "also write false-color disparity maps here");

  auto* t = app.add_subcommand("train", "train a model");
  t->add_option("--manifest", manifest, "file listing SAI dirs")->required();
  t->add_option("--lambda", lambda, "RD tradeoff weight")->required();
  t->add_option("--steps", steps, "training steps")->required();
  t->add_option("--out", output, "checkpoint path")->required();
  t->add_option("--channels", channels, "color transform width");
  t->add_option("--disparity-channels", disp_channels, "disparity width");
  t->add_option("--seed", seed, "RNG seed");
  t->add_option("--batch", batch, "batch size");
  t->add_option("--patch", patch, "training patch size");
  t->add_option("--threads", threads, "batch workers");
  t->add_option("--log", log_path, "RD log CSV path");
  t->add_option("--resume", resume, "checkpoint to resume from");
  t->add_option("--checkpoint-every", checkpoint_every,
                "periodic checkpoint interval (0 = end only)");
  t->add_flag("--no-disparity", no_disparity, "drop the disparity modules");

  auto* e = app.add_subcommand("eval", "compare two SAI grids");
  e->add_option("--ref", ref_dir, "reference SAI directory")->required();
  e->add_option("--rec", rec_dir, "reconstruction SAI directory")->required();
  e->add_option("--bitstream", bitstream, ".lfda file for bpp accounting");
  e->add_option("--out", report_out, "JSON report path");
  e->add_option("--csv", csv, "append an RD point to this CSV");
  e->add_flag("--bt601", bt601, "use BT.601 luma instead of BT.709");

  auto* b = app.add_subcommand("bdrate", "Bjontegaard deltas of two curves");
  b->add_option("--curve-a", curve_a, "anchor curve CSV")->required();
  b->add_option("--curve-b", curve_b, "test curve CSV")->required();
  b->add_option("--metric", metric, "psnr_y | msssim_y_db | psnr_rgb");

  auto* s = app.add_subcommand("make-synthetic", "generate a synthetic grid");
  s->add_option("--out", output, "output SAI directory")->required();
  s->add_option("--seed", seed, "scene seed");
  s->add_option("--height", height, "view height");
  s->add_option("--width", width, "view width");
  s->add_option("--dx", dx, "horizontal parallax px/view");
  s->add_option("--dy", dy, "vertical parallax px/view");

  auto* v = app.add_subcommand("bench", "encode/decode timing");
  v->add_option("--input", bench_inputs, "SAI directories")->required();
  v->add_option("--model", model_path, "checkpoint")->required();
  v->add_option("--threads", threads, "row workers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c) return cmd_compress(input, model_path, output, threads);
    if (*d)
      return cmd_decompress(input, model_path, output, threads,
                            dump_disparity);
    if (*t)
      return cmd_train(manifest, lambda, steps, channels, disp_channels, seed,
                       batch, patch, threads, no_disparity, output, log_path,
                       resume, checkpoint_every);
    if (*e) return cmd_eval(ref_dir, rec_dir, bitstream, report_out, csv,
                            bt601);
    if (*b) return cmd_bdrate(curve_a, curve_b, metric);
    if (*s) return cmd_make_synthetic(output, seed, height, width, dx, dy);
    if (*v) return cmd_bench(bench_inputs, model_path, threads);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
