// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <stdexcept>
#include <string>

#include "lhdr/eval.hpp"

namespace lhdr::eval {

namespace {

struct Variant {
  std::string name;
  net::ModelConfig model;
  train::TrainConfig train;
  const std::vector<train::TrainPair>* data;
};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

degrade::DegradationConfig alternative_shot() {
  degrade::DegradationConfig cfg;
  cfg.crf_gamma = 1.0 / 1.8;
  cfg.cst_matrix = degrade::kIdentity;
  return cfg;
}

const AblationRow& AblationReport::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("ablation report has no row '" + std::string(name) + "'");
}

AblationReport ablation_suite(const AblationConfig& cfg) {
  if (cfg.seeds.empty()) throw std::invalid_argument("ablation_suite: no seeds");
  if (cfg.train_pairs <= 0 || cfg.test_pairs <= 0) {
    throw std::invalid_argument("ablation_suite: need training and test pairs");
  }
  const auto train_data =
      train::synthetic_pairs(cfg.train_pairs, cfg.image_size, cfg.data_seed, cfg.degradation);
  const auto alt_data =
      train::synthetic_pairs(cfg.train_pairs, cfg.image_size, cfg.data_seed, cfg.alt_shot);

  // The test inputs go through the baseline degradation chain once, with a
  // fixed stream, so every variant sees identical pixels.
  const auto test_clean =
      train::synthetic_pairs(cfg.test_pairs, cfg.image_size, cfg.data_seed + 1, cfg.degradation);
  std::vector<EvalPair> test;
  for (std::size_t i = 0; i < test_clean.size(); ++i) {
    Rng rng = Rng::stream(cfg.data_seed + 2, i);
    test.push_back(EvalPair{
        degrade::conventional_degrade(test_clean[i].sdr, cfg.degradation, rng).image,
        test_clean[i].hdr});
  }

  std::vector<Variant> variants;
  variants.push_back({"baseline", cfg.model, cfg.train, &train_data});
  if (cfg.recipe_swap) variants.push_back({"recipe_swap", cfg.model, cfg.train, &alt_data});
  if (cfg.no_conventional) {
    Variant v{"no_conventional", cfg.model, cfg.train, &train_data};
    v.train.degrade_inputs = false;
    variants.push_back(v);
  }
  if (cfg.no_partial_conv) {
    Variant v{"no_partial_conv", cfg.model, cfg.train, &train_data};
    v.model.use_partial_conv = false;
    variants.push_back(v);
  }
  if (cfg.no_group_conv) {
    Variant v{"no_group_conv", cfg.model, cfg.train, &train_data};
    v.model.groups = 1;
    variants.push_back(v);
  }

  AblationReport report;
  for (const Variant& v : variants) {
    AblationRow row;
    row.name = v.name;
    row.params = net::count_params(v.model);
    row.macs = net::count_macs(v.model, 1080, 1920);
    for (std::uint64_t seed : cfg.seeds) {
      train::TrainConfig tc = v.train;
      tc.seed = seed;
      const auto result = train::train_loop(v.model, tc, cfg.degradation, *v.data);
      const MetricsReport m = evaluate(result.model, test, tc.gamma);
      row.psnr += m.psnr;
      row.ssim += m.ssim;
      row.ssim_per_seed.push_back(m.ssim);
    }
    row.psnr /= static_cast<double>(cfg.seeds.size());
    row.ssim /= static_cast<double>(cfg.seeds.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string AblationReport::to_text() const {
  std::string out = pad("config", 18) + pad("#param", 10) + pad("MACs(G)", 10) +
                    pad("PSNR", 10) + "SSIM\n";
  for (const auto& r : rows) {
    out += pad(r.name, 18) + pad(std::to_string(r.params), 10) +
           pad(fixed(static_cast<double>(r.macs) / 1e9, 1), 10) + pad(fixed(r.psnr, 3), 10) +
           fixed(r.ssim, 4) + "\n";
  }
  return out;
}

KeyValues AblationReport::to_kv() const {
  KeyValues kv;
  kv.set("metric_domain", std::string(kMetricDomain));
  for (const auto& r : rows) {
    kv.set(r.name + ".params", static_cast<long long>(r.params));
    kv.set(r.name + ".macs", static_cast<long long>(r.macs));
    kv.set(r.name + ".psnr", format_metric(r.psnr));
    kv.set(r.name + ".ssim", format_metric(r.ssim));
  }
  return kv;
}

}  // namespace lhdr::eval
