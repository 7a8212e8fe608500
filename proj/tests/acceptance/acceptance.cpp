// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: lhdr_acceptance <path to lhdr cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "lhdr/degrade.hpp"
#include "lhdr/eval.hpp"
#include "lhdr/io.hpp"
#include "lhdr/net.hpp"
#include "lhdr/train.hpp"

namespace lhdr {
namespace {

using testing::gradcheck;
using testing::random_tensor;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string cli_path;

// ---------------------------------------------------------------------------

void gradient_correctness(Outcome& o) {
  using V = std::vector<Tensor64>;
  using T = Tape<double>;
  struct Case {
    std::string name;
    std::vector<Shape> shapes;
    testing::Fn fn;
  };
  Rng mrng(7);
  Tensor64 mask(Shape{2, 1, 8, 8});
  for (double& v : mask.data()) v = mrng.uniform(0, 1) < 0.3 ? 0.0 : mrng.uniform(0.2, 1.0);
  const Tensor64 target = random_tensor(Shape{2, 3, 8, 8}, mrng);

  auto conv = [](ops::ConvSpec s) {
    return [s](T* t, const V& v) { return ops::conv2d(t, v[0], s, v[1], v[2]); };
  };
  const ops::ConvSpec plain = ops::ConvSpec::same(4, 4, 3);
  const ops::ConvSpec grouped = ops::ConvSpec::same(4, 4, 3, 4);
  const ops::ConvSpec pointwise = ops::ConvSpec::same(4, 4, 1);
  const ops::ConvSpec strided{4, 4, 3, 2, 1, 1};
  const Shape x{2, 4, 8, 8};
  const Shape b{1, 4, 1, 1};
  const std::vector<Case> cases = {
      {"conv_plain", {x, plain.weight_shape(), b}, conv(plain)},
      {"conv_grouped", {x, grouped.weight_shape(), b}, conv(grouped)},
      {"conv_pointwise", {x, pointwise.weight_shape(), b}, conv(pointwise)},
      {"conv_strided", {x, strided.weight_shape(), b}, conv(strided)},
      {"partial_conv", {x, grouped.weight_shape(), b},
       [&](T* t, const V& v) { return net::partial_conv(t, v[0], mask, grouped, v[1], v[2]).features; }},
      {"sft", {x, x, x}, [](T* t, const V& v) { return net::sft_modulation(t, v[0], v[1], v[2]); }},
      {"channel_modulation", {x, Shape{2, 4, 1, 1}, Shape{2, 4, 1, 1}},
       [](T* t, const V& v) { return net::channel_modulation(t, v[0], v[1], v[2]); }},
      {"down2", {x}, [](T* t, const V& v) { return ops::resample(t, v[0], ops::Resample::down2); }},
      {"up2", {Shape{2, 4, 4, 4}}, [](T* t, const V& v) { return ops::resample(t, v[0], ops::Resample::up2); }},
      {"leaky_relu", {x}, [](T* t, const V& v) { return ops::leaky_relu(t, v[0], 0.2); }},
      {"relu", {x}, [](T* t, const V& v) { return ops::relu(t, v[0]); }},
      {"global_avg_pool", {x}, [](T* t, const V& v) { return ops::global_avg_pool(t, v[0]); }},
      {"concat", {Shape{2, 1, 8, 8}, Shape{2, 3, 8, 8}},
       [](T* t, const V& v) { return ops::concat_channels(t, v[0], v[1]); }},
      {"grad_map", {Shape{2, 3, 8, 8}}, [](T* t, const V& v) { return ops::grad_map(t, v[0]); }},
      {"loss", {Shape{2, 3, 8, 8}},
       [&](T* t, const V& v) { return train::lhdr_loss(t, v[0], target).total; }},
  };
  double worst = 0;
  std::string worst_name;
  int checked = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    Rng rng(100 + i);
    std::vector<Tensor64> inputs;
    for (const Shape& s : cases[i].shapes) inputs.push_back(random_tensor(s, rng));
    const auto r = gradcheck(cases[i].fn, inputs, rng);
    checked += r.checked;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = cases[i].name;
    }
    o.require(r.max_rel_error < 1e-4, cases[i].name);
  }
  o.detail << cases.size() << " layer types, " << checked << " coords, max rel err " << worst
           << " (" << worst_name << ")";
}

std::string run_command(const std::string& cmd, int& status) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe.get())) out.append(buf, n);
  status = pclose(pipe.release());
  return out;
}

void overhead(Outcome& o) {
  constexpr std::int64_t kPinnedParams = 233238;
  constexpr std::int64_t kPinnedMacs = 149680742400;
  int status = 0;
  const std::string out = run_command(cli_path + " info 2>&1", status);
  std::smatch mp;
  std::smatch mm;
  const bool found = std::regex_search(out, mp, std::regex(R"(total params\s+(\d+))")) &&
                     std::regex_search(out, mm, std::regex(R"(total MACs\s+(\d+))"));
  o.require(status == 0, "cli exit status");
  o.require(found, "totals in cli output");
  if (!found) return;
  const long long params = std::stoll(mp[1]);
  const long long macs = std::stoll(mm[1]);
  o.detail << "cli info: params " << params << ", MACs@1920x1080 " << macs;
  o.require(params >= 200000 && params <= 250000, "params in [200k, 250k]");
  o.require(macs >= 130'000'000'000 && macs <= 190'000'000'000, "MACs in [130G, 190G]");
  o.require(params == kPinnedParams && params == net::count_params({}), "pinned params");
  o.require(macs == kPinnedMacs && macs == net::count_macs({}, 1080, 1920), "pinned MACs");
}

void masks(Outcome& o) {
  o.require(std::abs(net::bright_valid(0.95, 0.9) - 0.5) < 1e-12,
            "valid(0.95)");
  o.require(net::bright_valid(0.5, 0.9) == 0.0, "valid(0.5)");
  o.require(net::bright_invalid(1.0, 0.9) == 0.0, "invalid(1.0)");
  o.require(net::bright_invalid(0.5, 0.9) == 1.0, "invalid(0.5)");
  double pv = -1;
  double pi = 2;
  int points = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i * 1e-3;
    const double v = net::bright_valid(p, 0.9);
    const double inv = net::bright_invalid(p, 0.9);
    const bool ok = v >= 0 && v <= 1 && inv >= 0 && inv <= 1 && std::abs(v + inv - 1) < 1e-12 &&
                    v >= pv && inv <= pi;
    if (!ok) o.require(false, "grid property at p=" + std::to_string(p));
    pv = v;
    pi = inv;
    ++points;
  }
  o.detail << "examples ok, partition and monotonicity on " << points << " grid points";
}

void gamma_roundtrip(Outcome& o) {
  Rng rng(4);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Image y(64, 64, Domain::linear_hdr);
    for (float& v : y.data) v = static_cast<float>(std::pow(10.0, rng.uniform(-3, 3)));
    const auto pre = train::preprocess_gamma(y);
    const Image back = train::postprocess_gamma(pre.image);
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      worst = std::max(worst, std::abs(back.data[i] * pre.max_y - y.data[i]) / y.data[i]);
    }
  }
  o.detail << "max rel err " << worst << " over 6 decades";
  o.require(worst < 1e-5, "relative error < 1e-5");
}

Image textured_sdr(int size, std::uint64_t seed) {
  return train::synthetic_pairs(1, size, seed, degrade::DegradationConfig{})[0].sdr;
}

// Fine detail and hard edges in luma, slowly varying chroma.
Image photo_like_sdr(int size, std::uint64_t seed) {
  Rng rng(seed);
  Image img(size, size, Domain::nonlinear_sdr);
  const double fx = rng.uniform(0.3, 0.9);
  const double fy = rng.uniform(0.3, 0.9);
  const double hue = rng.uniform(0, 6.28);
  const int bx = rng.uniform_int(size / 4, size / 2);
  const int by = rng.uniform_int(size / 4, size / 2);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double lum = 0.25 + 0.4 * x / size + 0.08 * std::sin(fx * x) * std::cos(fy * y);
      lum += rng.uniform(-0.03, 0.03);
      if (x >= bx && x < bx + size / 3 && y >= by && y < by + size / 4) lum += 0.2;
      const double t = hue + 2.0 * (x + y) / size;
      for (int c = 0; c < 3; ++c) {
        const double tint = 1.0 + 0.25 * std::cos(t + 2.094 * c);
        img.at(x, y, c) = static_cast<float>(std::clamp(lum * tint, 0.0, 1.0));
      }
    }
  }
  return img;
}

void degradation(Outcome& o) {
  degrade::DegradationConfig ident;
  ident.noise_sigma_range = {0, 0};
  ident.jpeg_qf1_range = {100, 100};
  ident.jpeg_qf2 = 100;
  ident.rescale_range = {1, 1};
  double worst_ident = 1e9;
  double worst_scene_ident = 1e9;
  double worst_lossy = 0;
  bool identical = true;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Image photo = photo_like_sdr(96, 700 + s);
    const Image scene = textured_sdr(96, 500 + s);
    Rng r0(s);
    worst_ident = std::min(worst_ident, eval::psnr(degrade::conventional_degrade(photo, ident, r0).image, photo));
    Rng r3(s);
    worst_scene_ident = std::min(
        worst_scene_ident, eval::psnr(degrade::conventional_degrade(scene, ident, r3).image, scene));
    for (const Image* sdr : {&photo, &scene}) {
      Rng r1(s);
      Rng r2(s);
      const Image a = degrade::conventional_degrade(*sdr, degrade::DegradationConfig{}, r1).image;
      const Image b = degrade::conventional_degrade(*sdr, degrade::DegradationConfig{}, r2).image;
      identical = identical && a.data == b.data;
      worst_lossy = std::max(worst_lossy, eval::psnr(a, *sdr));
    }
  }
  o.detail << "near-identity min PSNR " << worst_ident << " dB (saturated-edge scenes "
           << worst_scene_ident << " dB), default max PSNR " << worst_lossy << " dB";
  o.require(worst_ident > 40, "near-identity PSNR > 40 dB");
  o.require(worst_lossy < 50, "default PSNR < 50 dB");
  o.require(identical, "fixed seed bit-identical");
}

void overfit(Outcome& o) {
  const auto data = train::synthetic_pairs(8, 64, 42, degrade::DegradationConfig{});
  train::TrainConfig cfg;
  cfg.max_iters = 500;
  cfg.patch_size = 64;
  cfg.seed = 1;
  const net::ModelConfig model_cfg;
  train::TrainConfig init_cfg = cfg;
  init_cfg.max_iters = 0;
  const auto init = train::train_loop(model_cfg, init_cfg, {}, data);
  const double before = train::evaluate_loss(init.model, data, cfg).total;
  const auto trained = train::train_loop(model_cfg, cfg, {}, data);
  const double after = train::evaluate_loss(trained.model, data, cfg).total;
  train::TrainConfig repeat = cfg;
  repeat.max_iters = 20;
  const auto again = train::train_loop(model_cfg, repeat, {}, data);
  bool same = true;
  for (std::size_t i = 0; i < again.log.size(); ++i) {
    same = same && again.log[i].total == trained.log[i].total;
  }
  o.detail << "full-set loss " << before << " -> " << after << " (ratio " << after / before << ")";
  o.require(after <= 0.1 * before, "loss <= 10% of initial");
  o.require(same, "identical trace for identical seed");
}

void ablation(Outcome& o) {
  net::ModelConfig g1;
  g1.groups = 1;
  const auto base_params = net::count_params({});
  const auto g1_params = net::count_params(g1);
  o.require(g1_params > base_params, "groups=1 increases params");

  eval::AblationConfig cfg;
  cfg.train.max_iters = 300;
  cfg.seeds = {1, 2, 3};
  cfg.recipe_swap = false;
  cfg.no_partial_conv = false;
  cfg.no_group_conv = false;
  const eval::AblationReport r = eval::ablation_suite(cfg);
  const auto& base = r.row("baseline");
  const auto& noconv = r.row("no_conventional");
  o.detail << "params " << g1_params << " (groups=1) vs " << base_params
           << "; SSIM baseline " << base.ssim << " vs no_conventional " << noconv.ssim
           << " over " << cfg.seeds.size() << " seeds";
  o.require(noconv.ssim < base.ssim, "no_conventional SSIM below baseline");
}

void parsers(Outcome& o) {
  Rng rng(8);
  Image hdr(37, 21, Domain::linear_hdr);
  for (float& v : hdr.data) v = static_cast<float>(std::pow(10.0, rng.uniform(-6, 6)));
  const Image pfm = io::read_pfm(io::write_pfm(hdr));
  o.require(std::memcmp(pfm.data.data(), hdr.data.data(), hdr.data.size() * 4) == 0,
            "PFM bit-exact");
  const Image rgbe = io::read_rgbe(io::write_rgbe(hdr));
  double worst = 0;
  for (std::size_t p = 0; p < hdr.pixel_count(); ++p) {
    const double m = std::max({hdr.data[3 * p], hdr.data[3 * p + 1], hdr.data[3 * p + 2]});
    for (int c = 0; c < 3; ++c) {
      worst = std::max(worst, std::abs(rgbe.data[3 * p + c] - hdr.data[3 * p + c]) / m);
    }
  }
  o.require(worst < 1.0 / 256, "RGBE roundtrip < 1/256");
  const auto two = io::rgbe_decode({128, 128, 128, 130});
  o.require(two[0] == 2.0f && two[1] == 2.0f && two[2] == 2.0f, "RGBE decode example");

  const io::Bytes seeds[] = {io::write_pfm(hdr), io::write_rgbe(hdr),
                             io::write_ppm(textured_sdr(16, 3))};
  int rejected = 0;
  int accepted = 0;
  int other_errors = 0;
  auto attempt = [&](auto parse, const io::Bytes& b) {
    try {
      parse(std::span<const std::uint8_t>(b));
      ++accepted;
    } catch (const ParseError&) {
      ++rejected;
    } catch (...) {
      ++other_errors;
    }
  };
  constexpr int kCases = 10000;
  for (int i = 0; i < kCases; ++i) {
    io::Bytes b;
    if (i % 2 == 0) {
      b.resize(rng.uniform_int(0, 256));
      for (auto& v : b) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      const char* magic[] = {"PF\n", "#?RADIANCE\n", "P6\n", ""};
      const std::string m = magic[i / 2 % 4];
      b.insert(b.begin(), m.begin(), m.end());
    } else {
      b = seeds[i / 2 % 3];
      for (int k = rng.uniform_int(1, 8); k > 0; --k) {
        b[rng.uniform_int(0, static_cast<int>(b.size()) - 1)] =
            static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      }
      if (i % 7 == 0) b.resize(rng.uniform_int(0, static_cast<int>(b.size())));
    }
    attempt(io::read_pfm, b);
    attempt(io::read_rgbe, b);
    attempt(io::read_ppm, b);
  }
  o.detail << "PFM exact, RGBE max rel err " << worst << ", fuzz " << kCases << " cases x 3 parsers ("
           << rejected << " rejected, " << accepted << " parsed)";
  o.require(other_errors == 0, "fuzz raised non-parse errors");
}

void exposure(Outcome& o) {
  Image img(100, 100, Domain::nonlinear_sdr, 0.5f);
  for (int i = 0; i < 500; ++i) img.at(i % 100, i / 100, 2) = 1.0f;
  const double over = degrade::exposure_stats(img).over_fraction;
  o.require(std::abs(over - 0.05) < 1e-12, "5% at code 255");

  Image t(10, 10, Domain::nonlinear_sdr, 0.5f);
  const int codes[] = {246, 247, 248, 249, 252, 255};
  for (int i = 0; i < 6; ++i) t.at(i, 0, 1) = codes[i] / 255.0f;
  o.require(degrade::exposure_stats(t, 248).over_fraction == 0.04, "threshold 248 counting");

  std::vector<Image> suite;
  const int counts[] = {300, 650, 420, 510, 480, 390, 555, 470, 466, 470};
  for (int n : counts) {
    Image s(100, 100, Domain::nonlinear_sdr, 0.4f);
    for (int k = 0; k < n; ++k) s.at(k % 100, k / 100, k % 3) = (248 + k % 8) / 255.0f;
    s.at(99, 99, 0) = 247 / 255.0f;
    suite.push_back(s);
  }
  const io::DatasetReport r = io::dataset_stats(suite, {}, 248, 0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", r.over_mean);
  o.detail << "over 0.0500, val-248 counting ok, suite avg " << r.over_mean * 100 << "%";
  o.require(std::string(buf) == "0.0471" && std::abs(r.over_mean - 0.04711) < 5e-5,
            "suite mean 4.711%");
  o.require(r.to_text().find("4.711") != std::string::npos, "report shows 4.711");
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace
}  // namespace lhdr

int main(int argc, char** argv) {
  using namespace lhdr;
  if (argc < 2) {
    std::cerr << "usage: lhdr_acceptance <path to lhdr cli>\n";
    return 2;
  }
  cli_path = argv[1];
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 60, gradient_correctness},
      {2, "overhead reproduction", 60, overhead},
      {3, "mask formulas", 10, masks},
      {4, "gamma roundtrip", 10, gamma_roundtrip},
      {5, "degradation chain fidelity", 60, degradation},
      {6, "overfit smoke test", 1800, overfit},
      {7, "ablation directionality", 3600, ablation},
      {8, "parser robustness", 300, parsers},
      {9, "exposure statistics", 10, exposure},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.budget_seconds, "over time budget");
    std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
