// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: degrade, stats, train, infer, eval, info, bench.
// Exit codes: 0 success, 1 failure, 2 partial success.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lhdr/checkpoint.hpp"
#include "lhdr/degrade.hpp"
#include "lhdr/eval.hpp"
#include "lhdr/io.hpp"
#include "lhdr/net.hpp"
#include "lhdr/train.hpp"

namespace fs = std::filesystem;
using namespace lhdr;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kPartial = 2;

void print_config(const std::string& title, const KeyValues& kv) {
  std::cout << "[" << title << "]\n";
  for (const auto& [k, v] : kv.entries()) std::cout << "  " << k << " = " << v << "\n";
}

std::pair<int, int> parse_resolution(const std::string& s) {
  int w = 0;
  int h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || w <= 0 || h <= 0 || !in.eof()) {
    throw std::invalid_argument("resolution must look like 1920x1080, got '" + s + "'");
  }
  return {w, h};
}

net::ModelConfig load_model_config(const std::string& path) {
  if (path.empty()) return net::ModelConfig{};
  const net::ModelConfig cfg = net::ModelConfig::from_kv(KeyValues::load(path));
  cfg.validate();
  return cfg;
}

degrade::DegradationConfig load_degradation(const std::string& path) {
  return path.empty() ? degrade::DegradationConfig{} : degrade::DegradationConfig::load(path);
}

train::TrainConfig load_train_config(const std::string& path) {
  return path.empty() ? train::TrainConfig{} : train::TrainConfig::from_kv(KeyValues::load(path));
}

// HDR references from a directory of .pfm/.hdr files, paired with virtual
// shots; or synthetic scenes when no directory is given.
std::vector<train::TrainPair> load_pairs(const std::string& dir, int synthetic, int size,
                                         std::uint64_t seed,
                                         const degrade::DegradationConfig& shot) {
  if (dir.empty()) return train::synthetic_pairs(synthetic, size, seed, shot);
  std::vector<train::TrainPair> pairs;
  for (const fs::path& p : io::list_images(dir)) {
    Image img = io::read_image(p);
    if (img.domain != Domain::linear_hdr) {
      throw std::invalid_argument(p.string() + ": expected a linear HDR image (.pfm or .hdr)");
    }
    pairs.push_back(train::make_pair(std::move(img), shot));
  }
  if (pairs.empty()) throw std::invalid_argument("no input images in " + dir);
  return pairs;
}

// ---------------------------------------------------------------------------

struct DegradeArgs {
  std::string in;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_degrade(const DegradeArgs& a) {
  degrade::DegradationConfig cfg = load_degradation(a.config);
  if (a.seed_set) cfg.seed = a.seed;
  cfg.validate();
  print_config("degradation", cfg.to_kv());
  const auto files = io::list_images(a.in);
  if (files.empty()) {
    std::cerr << "no input images in " << a.in << "\n";
    return kFail;
  }
  fs::create_directories(a.out);
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const fs::path& f = files[i];
    try {
      Image img = io::read_image(f);
      KeyValues manifest;
      manifest.set("source", f.filename().string());
      if (img.domain == Domain::linear_hdr) {
        // HDR sources go through the virtual shot first.
        img = train::make_pair(std::move(img), cfg).sdr;
        manifest.set("virtual_shot", true);
      }
      Rng rng = Rng::stream(cfg.seed, i);
      const degrade::Degraded d = degrade::conventional_degrade(img, cfg, rng);
      const KeyValues params = d.params.to_kv();
      for (const auto& [k, v] : params.entries()) manifest.set(k, v);
      manifest.set("seed", static_cast<long long>(cfg.seed));
      manifest.set("index", static_cast<long long>(i));
      const fs::path stem = fs::path(a.out) / f.stem();
      io::write_image(stem.string() + ".ppm", d.image);
      std::ofstream(stem.string() + ".txt") << manifest.to_text();
      std::cout << f.filename().string() << ": sigma " << format_double(d.params.sigma)
                << " qf1 " << d.params.qf1 << " scale " << format_double(d.params.scale) << "\n";
    } catch (const std::exception& e) {
      errors.push_back(f.string() + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::cerr << errors.size() << " of " << files.size() << " files failed:\n";
    for (const auto& e : errors) std::cerr << "  " << e << "\n";
    return errors.size() == files.size() ? kFail : kPartial;
  }
  return kOk;
}

struct StatsArgs {
  std::string in;
  int over = 255;
  int under = 0;
};

int cmd_stats(const StatsArgs& a) {
  KeyValues resolved;
  resolved.set("in", a.in);
  resolved.set("over_code", a.over);
  resolved.set("under_code", a.under);
  print_config("stats", resolved);
  const auto files = io::list_images(a.in);
  if (files.empty()) {
    std::cerr << "no input images in " << a.in << "\n";
    return kFail;
  }
  std::vector<Image> images;
  std::vector<std::string> names;
  std::vector<std::string> errors;
  for (const fs::path& f : files) {
    try {
      Image img = io::read_image(f);
      if (img.domain != Domain::nonlinear_sdr) throw std::invalid_argument("not an SDR image");
      images.push_back(std::move(img));
      names.push_back(f.filename().string());
    } catch (const std::exception& e) {
      errors.push_back(f.string() + ": " + e.what());
    }
  }
  if (!images.empty()) {
    const io::DatasetReport r = io::dataset_stats(images, names, a.over, a.under);
    std::cout << "\n" << r.to_text() << "\n" << r.to_kv().to_text();
  }
  for (const auto& e : errors) std::cerr << e << "\n";
  if (images.empty()) return kFail;
  return errors.empty() ? kOk : kPartial;
}

struct TrainArgs {
  std::string data;
  int synthetic = 8;
  int size = 64;
  std::string model_config;
  std::string train_config;
  std::string degrade_config;
  std::string init;
  std::string out;
  std::string log;
  std::optional<int> iters;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a) {
  const net::ModelConfig model_cfg = load_model_config(a.model_config);
  train::TrainConfig cfg = load_train_config(a.train_config);
  if (a.iters) cfg.max_iters = *a.iters;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const degrade::DegradationConfig deg = load_degradation(a.degrade_config);
  print_config("model", model_cfg.to_kv());
  print_config("train", cfg.to_kv());
  print_config("degradation", deg.to_kv());

  std::optional<Checkpoint> init;
  if (!a.init.empty()) init = load_checkpoint(a.init);
  const auto pairs = load_pairs(a.data, a.synthetic, a.size, cfg.seed, deg);
  std::cout << "training on " << pairs.size() << " pairs\n";

  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log);
    if (!log) throw std::runtime_error("cannot write " + a.log);
  }
  const auto result = train::train_loop(
      model_cfg, cfg, deg, pairs, init ? &init->model : nullptr, [&](const train::LossRecord& r) {
        const std::string line = train::format_loss_line(r);
        if (log.is_open()) log << line << "\n";
        if (r.iter % 50 == 0 || r.iter + 1 == cfg.max_iters) std::cout << line << "\n";
      });
  KeyValues meta;
  const KeyValues train_kv = cfg.to_kv();
  for (const auto& [k, v] : train_kv.entries()) meta.set("train." + k, v);
  meta.set("iterations", static_cast<long long>(cfg.max_iters));
  save_checkpoint(a.out, result.model, meta);
  const train::LossRecord eval = train::evaluate_loss(result.model, pairs, cfg);
  std::cout << "checkpoint " << a.out << " (" << result.model.parameter_count()
            << " params), full-set loss " << format_double(eval.total) << "\n";
  return kOk;
}

struct InferArgs {
  std::string checkpoint;
  std::string in;
  std::string out;
  std::string preview;
  double gamma = 0.45;
};

int cmd_infer(const InferArgs& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  print_config("model", ck.model.config().to_kv());
  KeyValues resolved;
  resolved.set("checkpoint", a.checkpoint);
  resolved.set("in", a.in);
  resolved.set("out", a.out);
  resolved.set("preview", a.preview);
  resolved.set("gamma", a.gamma);
  print_config("infer", resolved);
  if (io::format_for(a.out) == io::Format::ppm) {
    throw std::invalid_argument("HDR output must be .pfm or .hdr");
  }
  const Image sdr = io::read_image(a.in);
  if (sdr.domain != Domain::nonlinear_sdr) {
    throw std::invalid_argument(a.in + ": expected an SDR image (.ppm)");
  }
  const Image hdr = train::postprocess_gamma(net::lhdr_forward(ck.model, sdr), a.gamma);
  io::write_image(a.out, hdr);
  if (!a.preview.empty()) io::write_image(a.preview, eval::tonemap_preview(hdr));
  std::cout << "wrote " << a.out << " (" << hdr.width << "x" << hdr.height << ", peak "
            << format_double(hdr.max_value()) << ")\n";
  return kOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  int synthetic = 4;
  int size = 64;
  std::string degrade_config;
  bool degrade_inputs = true;
  std::optional<std::uint64_t> seed;
  std::string runtime_resolution;
  // Ablation mode.
  bool ablation = false;
  int iters = 300;
  std::vector<std::uint64_t> seeds = {1};
  std::string model_config;
  std::string train_config;
};

int cmd_eval(const EvalArgs& a) {
  const degrade::DegradationConfig deg = load_degradation(a.degrade_config);
  if (a.ablation) {
    eval::AblationConfig cfg;
    cfg.model = load_model_config(a.model_config);
    cfg.train = load_train_config(a.train_config);
    cfg.train.max_iters = a.iters;
    cfg.degradation = deg;
    cfg.seeds = a.seeds;
    cfg.test_pairs = a.synthetic;
    cfg.image_size = a.size;
    if (a.seed) cfg.data_seed = *a.seed;
    print_config("model", cfg.model.to_kv());
    print_config("train", cfg.train.to_kv());
    print_config("degradation", deg.to_kv());
    const eval::AblationReport r = eval::ablation_suite(cfg);
    std::cout << "\n" << r.to_text() << "\n" << r.to_kv().to_text();
    return kOk;
  }
  if (a.checkpoint.empty()) throw std::invalid_argument("--checkpoint is required");
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  print_config("model", ck.model.config().to_kv());
  KeyValues resolved;
  resolved.set("data", a.data.empty() ? "synthetic" : a.data);
  resolved.set("degrade_inputs", a.degrade_inputs);
  const std::uint64_t seed = a.seed.value_or(0);
  resolved.set("seed", static_cast<long long>(seed));
  print_config("eval", resolved);
  if (a.degrade_inputs) print_config("degradation", deg.to_kv());

  const auto pairs = load_pairs(a.data, a.synthetic, a.size, seed, deg);
  std::vector<eval::EvalPair> eval_pairs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Image sdr = pairs[i].sdr;
    if (a.degrade_inputs) {
      Rng rng = Rng::stream(seed, i);
      sdr = degrade::conventional_degrade(sdr, deg, rng).image;
    }
    eval_pairs.push_back({std::move(sdr), pairs[i].hdr});
  }
  eval::MetricsReport r = eval::evaluate(ck.model, eval_pairs);
  if (!a.runtime_resolution.empty()) {
    const auto [w, h] = parse_resolution(a.runtime_resolution);
    const auto b = eval::bench_forward(ck.model.config(), h, w, 3, seed);
    r.runtime_seconds = b.median_seconds;
    r.runtime_width = w;
    r.runtime_height = h;
  }
  std::cout << "\n" << r.to_text() << "\n" << r.to_kv().to_text();
  return kOk;
}

struct InfoArgs {
  std::string config;
  std::string resolution = "1920x1080";
};

int cmd_info(const InfoArgs& a) {
  const net::ModelConfig cfg = load_model_config(a.config);
  const auto [w, h] = parse_resolution(a.resolution);
  print_config("model", cfg.to_kv());
  std::cout << "resolution " << w << "x" << h << "\n\n";
  std::printf("%-28s %-16s %4s %3s %6s %10s %14s\n", "layer", "in->out", "k", "s", "groups",
              "params", "MACs");
  for (const net::LayerCost& c : net::layer_costs(cfg, h, w)) {
    const std::string io = std::to_string(c.spec.in_channels) + "->" +
                           std::to_string(c.spec.out_channels);
    std::printf("%-28s %-16s %4d %3d %6d %10lld %14lld\n", c.name.c_str(), io.c_str(),
                c.spec.kernel, c.spec.stride, c.spec.groups, static_cast<long long>(c.params),
                static_cast<long long>(c.macs));
  }
  const long long params = net::count_params(cfg);
  const long long macs = net::count_macs(cfg, h, w);
  std::printf("\ntotal params %lld\ntotal MACs %lld\n", params, macs);
  std::printf("summary: %.1fk params, %.1fG MACs at %dx%d\n", params / 1e3, macs / 1e9, w, h);
  return kOk;
}

struct BenchArgs {
  std::string config;
  std::string resolution = "1920x1080";
  int repeats = 3;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchArgs& a) {
  const net::ModelConfig cfg = load_model_config(a.config);
  const auto [w, h] = parse_resolution(a.resolution);
  print_config("model", cfg.to_kv());
  KeyValues resolved;
  resolved.set("resolution", a.resolution);
  resolved.set("repeats", a.repeats);
  resolved.set("seed", static_cast<long long>(a.seed));
  print_config("bench", resolved);
  const eval::BenchReport r = eval::bench_forward(cfg, h, w, a.repeats, a.seed);
  std::cout << "\n" << r.to_text() << "\n" << r.to_kv().to_text();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LHDR: lightweight SDR-to-HDR reconstruction"};
  app.require_subcommand(1);

  DegradeArgs dg;
  auto* degrade_cmd = app.add_subcommand("degrade", "Synthesize degraded SDR images");
  degrade_cmd->add_option("--in", dg.in, "Input directory")->required();
  degrade_cmd->add_option("--out", dg.out, "Output directory")->required();
  degrade_cmd->add_option("--config", dg.config, "Degradation config (key = value)");
  auto* dg_seed = degrade_cmd->add_option("--seed", dg.seed, "Random seed");

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Exposure statistics of an SDR dataset");
  stats_cmd->add_option("--in", st.in, "Input directory")->required();
  stats_cmd->add_option("--over", st.over, "Over-exposure code threshold")->check(CLI::Range(0, 255));
  stats_cmd->add_option("--under", st.under, "Under-exposure code threshold")->check(CLI::Range(0, 255));

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", tr.data, "Directory of HDR references (.pfm/.hdr)");
  train_cmd->add_option("--synthetic", tr.synthetic, "Synthetic scenes when --data is absent")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--size", tr.size, "Synthetic scene size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--model-config", tr.model_config, "Model config file");
  train_cmd->add_option("--train-config", tr.train_config, "Training config file");
  train_cmd->add_option("--degrade-config", tr.degrade_config, "Degradation config file");
  train_cmd->add_option("--init", tr.init, "Checkpoint to continue from");
  train_cmd->add_option("--out", tr.out, "Output checkpoint")->required();
  train_cmd->add_option("--log", tr.log, "Loss log file");
  train_cmd->add_option("--iters", tr.iters, "Override max_iters");
  train_cmd->add_option("--seed", tr.seed, "Override the training seed");

  InferArgs in;
  auto* infer_cmd = app.add_subcommand("infer", "Reconstruct HDR from an SDR image");
  infer_cmd->add_option("--checkpoint", in.checkpoint, "Checkpoint file")->required();
  infer_cmd->add_option("--in", in.in, "Input SDR image (.ppm)")->required();
  infer_cmd->add_option("--out", in.out, "Output HDR image (.pfm or .hdr)")->required();
  infer_cmd->add_option("--preview", in.preview, "Tonemapped preview (.ppm)");
  infer_cmd->add_option("--gamma", in.gamma, "Gamma of the network output domain");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of a checkpoint, or the ablation suite");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file");
  eval_cmd->add_option("--data", ev.data, "Directory of HDR references (.pfm/.hdr)");
  eval_cmd->add_option("--synthetic", ev.synthetic, "Synthetic test scenes")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--size", ev.size, "Synthetic scene size")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--degrade-config", ev.degrade_config, "Degradation config file");
  eval_cmd->add_flag("!--clean", ev.degrade_inputs, "Skip the conventional degradation of inputs");
  eval_cmd->add_option("--seed", ev.seed, "Data seed");
  eval_cmd->add_option("--runtime", ev.runtime_resolution, "Also time the forward pass at WxH");
  eval_cmd->add_flag("--ablation", ev.ablation, "Run the ablation suite instead");
  eval_cmd->add_option("--iters", ev.iters, "Ablation training iterations");
  eval_cmd->add_option("--seeds", ev.seeds, "Ablation training seeds");
  eval_cmd->add_option("--model-config", ev.model_config, "Ablation baseline model config");
  eval_cmd->add_option("--train-config", ev.train_config, "Ablation training config");

  InfoArgs info;
  auto* info_cmd = app.add_subcommand("info", "Parameter and MAC counts");
  info_cmd->add_option("--config", info.config, "Model config file");
  info_cmd->add_option("--resolution", info.resolution, "WxH (default 1920x1080)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Forward-pass wall time");
  bench_cmd->add_option("--config", bench.config, "Model config file");
  bench_cmd->add_option("--resolution", bench.resolution, "WxH (default 1920x1080)");
  bench_cmd->add_option("--repeats", bench.repeats, "Timed runs (>= 3)");
  bench_cmd->add_option("--seed", bench.seed, "Weight seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kFail;
  }

  try {
    if (*degrade_cmd) {
      dg.seed_set = dg_seed->count() > 0;
      return cmd_degrade(dg);
    }
    if (*stats_cmd) return cmd_stats(st);
    if (*train_cmd) return cmd_train(tr);
    if (*infer_cmd) return cmd_infer(in);
    if (*eval_cmd) return cmd_eval(ev);
    if (*info_cmd) return cmd_info(info);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kFail;
}
