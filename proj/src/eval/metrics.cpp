// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "lhdr/eval.hpp"

namespace lhdr::eval {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void require_same_dims(const Image& a, const Image& b, const char* who) {
  if (a.width != b.width || a.height != b.height || a.data.size() != b.data.size()) {
    throw std::invalid_argument(std::string(who) + ": image dims differ");
  }
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    g[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Valid-mode separable filtering of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::array<double, kWindow>& g) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

std::string fixed(double v, int decimals) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same_dims(a, b, "psnr");
  if (!(peak > 0)) throw std::invalid_argument("psnr: peak must be positive");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.data.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b, double peak) {
  require_same_dims(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow) {
    throw std::invalid_argument("ssim: images must be at least 11x11");
  }
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const auto g = gaussian_window();
  const int w = a.width;
  const int h = a.height;
  const std::size_t n = a.pixel_count();
  double total = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> pa(n), pb(n), aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      pa[i] = a.data[3 * i + c];
      pb[i] = b.data[3 * i + c];
      aa[i] = pa[i] * pa[i];
      bb[i] = pb[i] * pb[i];
      ab[i] = pa[i] * pb[i];
    }
    const auto ma = filter_valid(pa, w, h, g);
    const auto mb = filter_valid(pb, w, h, g);
    const auto saa = filter_valid(aa, w, h, g);
    const auto sbb = filter_valid(bb, w, h, g);
    const auto sab = filter_valid(ab, w, h, g);
    for (std::size_t i = 0; i < ma.size(); ++i) {
      const double va = saa[i] - ma[i] * ma[i];
      const double vb = sbb[i] - mb[i] * mb[i];
      const double cov = sab[i] - ma[i] * mb[i];
      total += ((2 * ma[i] * mb[i] + c1) * (2 * cov + c2)) /
               ((ma[i] * ma[i] + mb[i] * mb[i] + c1) * (va + vb + c2));
    }
    count += ma.size();
  }
  return total / static_cast<double>(count);
}

Image tonemap_preview(const Image& hdr) {
  Image out = hdr;
  out.domain = Domain::nonlinear_sdr;
  out.max_luminance.reset();
  for (float& v : out.data) {
    const double x = std::isfinite(v) ? std::max(0.0, static_cast<double>(v)) : 0.0;
    const double t = std::pow(x / (1.0 + x), 1.0 / 2.2);
    v = static_cast<float>(std::floor(t * 255.0 + 0.5) / 255.0);
  }
  return out;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

std::string MetricsReport::to_text() const {
  std::string out;
  out += "metric domain  " + metric_domain + "\n";
  out += "images         " + std::to_string(images) + "\n";
  out += "PSNR (dB)      " + fixed(psnr, 3) + "\n";
  out += "SSIM           " + fixed(ssim, 4) + "\n";
  out += "params         " + std::to_string(params) + "\n";
  out += "MACs           " + std::to_string(macs) + " at " + std::to_string(mac_width) + "x" +
         std::to_string(mac_height) + "\n";
  if (runtime_seconds > 0) {
    out += "runtime (s)    " + fixed(runtime_seconds, 4) + " at " +
           std::to_string(runtime_width) + "x" + std::to_string(runtime_height) + "\n";
  }
  return out;
}

KeyValues MetricsReport::to_kv() const {
  KeyValues kv;
  kv.set("metric_domain", metric_domain);
  kv.set("images", images);
  kv.set("psnr", format_metric(psnr));
  kv.set("ssim", format_metric(ssim));
  kv.set("params", static_cast<long long>(params));
  kv.set("macs", static_cast<long long>(macs));
  kv.set("mac_resolution", std::to_string(mac_width) + "x" + std::to_string(mac_height));
  if (runtime_seconds > 0) {
    kv.set("runtime_seconds", runtime_seconds);
    kv.set("runtime_resolution",
           std::to_string(runtime_width) + "x" + std::to_string(runtime_height));
  }
  return kv;
}

MetricsReport evaluate(const net::Model<float>& model, std::span<const EvalPair> pairs,
                       double gamma) {
  if (pairs.empty()) throw std::invalid_argument("evaluate: no image pairs");
  MetricsReport report;
  report.params = net::count_params(model.config());
  report.macs = net::count_macs(model.config(), report.mac_height, report.mac_width);
  for (const EvalPair& p : pairs) {
    const Image pred = net::lhdr_forward(model, p.sdr);
    const Image target = train::preprocess_gamma(p.hdr, gamma).image;
    report.psnr += psnr(pred, target);
    report.ssim += ssim(pred, target);
  }
  report.images = static_cast<int>(pairs.size());
  report.psnr /= report.images;
  report.ssim /= report.images;
  return report;
}

}  // namespace lhdr::eval
