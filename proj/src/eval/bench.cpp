// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "lhdr/eval.hpp"

namespace lhdr::eval {

BenchReport bench_forward(const net::ModelConfig& cfg, int height, int width, int repeats,
                          std::uint64_t seed) {
  if (repeats < 3) throw std::invalid_argument("bench_forward: repeats must be >= 3");
  if (height <= 0 || width <= 0) throw std::invalid_argument("bench_forward: bad resolution");
  net::Model<float> model(cfg);
  Rng rng = Rng::stream(seed, 0);
  train::kaiming_init(model, rng);
  Image input(width, height, Domain::nonlinear_sdr);
  for (float& v : input.data) v = static_cast<float>(rng.uniform(0.0, 1.0));

  BenchReport report;
  report.width = width;
  report.height = height;
  report.repeats = repeats;
  report.threads = 1;
  net::lhdr_forward(model, input);  // warm-up
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const Image out = net::lhdr_forward(model, input);
    const auto t1 = std::chrono::steady_clock::now();
    report.samples.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::vector<double> sorted = report.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  report.median_seconds =
      sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return report;
}

std::string BenchReport::to_text() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "resolution  %dx%d\nrepeats     %d (warm-up excluded)\nthreads     %d\n"
                "median (s)  %.4f\n",
                width, height, repeats, threads, median_seconds);
  return buf;
}

KeyValues BenchReport::to_kv() const {
  KeyValues kv;
  kv.set("resolution", std::to_string(width) + "x" + std::to_string(height));
  kv.set("repeats", repeats);
  kv.set("threads", threads);
  kv.set("median_seconds", median_seconds);
  return kv;
}

}  // namespace lhdr::eval
