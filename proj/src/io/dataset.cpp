// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "lhdr/degrade.hpp"
#include "lhdr/io.hpp"

namespace lhdr::io {

namespace {

std::pair<double, double> mean_stdev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  return {mean, std::sqrt(var)};
}

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

std::vector<Patch> extract_patches(const Image& img, int size, int count, Rng& rng) {
  if (size <= 0 || count < 0) throw std::invalid_argument("extract_patches: bad size or count");
  std::vector<Patch> out;
  out.reserve(static_cast<std::size_t>(count));
  if (img.width < size || img.height < size) {
    for (int i = 0; i < count; ++i) out.push_back(Patch{img, 0, 0, true});
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const int x = rng.uniform_int(0, img.width - size);
    const int y = rng.uniform_int(0, img.height - size);
    out.push_back(Patch{crop(img, x, y, size, size), x, y, false});
  }
  return out;
}

DatasetReport dataset_stats(std::span<const Image> images, std::span<const std::string> names,
                            int over_code, int under_code) {
  if (images.empty()) throw std::invalid_argument("dataset_stats: no images");
  if (!names.empty() && names.size() != images.size()) {
    throw std::invalid_argument("dataset_stats: names and images differ in count");
  }
  DatasetReport report;
  report.over_code = over_code;
  report.under_code = under_code;
  report.min_width = report.max_width = images[0].width;
  report.min_height = report.max_height = images[0].height;
  std::vector<double> under;
  std::vector<double> over;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& img = images[i];
    const auto s = degrade::exposure_stats(img, over_code, under_code);
    report.images.push_back(ImageExposure{names.empty() ? "#" + std::to_string(i) : names[i],
                                          img.width, img.height, s.under_fraction,
                                          s.over_fraction});
    under.push_back(s.under_fraction);
    over.push_back(s.over_fraction);
    report.min_width = std::min(report.min_width, img.width);
    report.max_width = std::max(report.max_width, img.width);
    report.min_height = std::min(report.min_height, img.height);
    report.max_height = std::max(report.max_height, img.height);
  }
  std::tie(report.under_mean, report.under_stdev) = mean_stdev(under);
  std::tie(report.over_mean, report.over_stdev) = mean_stdev(over);
  return report;
}

std::string DatasetReport::to_text() const {
  std::size_t name_w = 5;
  for (const auto& im : images) name_w = std::max(name_w, im.name.size());
  std::string out;
  out += "images      " + std::to_string(images.size()) + "\n";
  out += "resolution  " + std::to_string(min_width) + "x" + std::to_string(min_height) +
         " .. " + std::to_string(max_width) + "x" + std::to_string(max_height) + "\n\n";
  out += "              avg.(%)    stdev.   val.\n";
  out += "under-exp.  " + pad(fixed(under_mean * 100, 3), 11) + pad(fixed(under_stdev, 4), 9) +
         "<= " + std::to_string(under_code) + "\n";
  out += "over-exp.   " + pad(fixed(over_mean * 100, 3), 11) + pad(fixed(over_stdev, 4), 9) +
         ">= " + std::to_string(over_code) + "\n\n";
  out += pad("image", name_w + 2) + pad("size", 12) + pad("under(%)", 10) + "over(%)\n";
  for (const auto& im : images) {
    out += pad(im.name, name_w + 2) +
           pad(std::to_string(im.width) + "x" + std::to_string(im.height), 12) +
           pad(fixed(im.under_fraction * 100, 3), 10) + fixed(im.over_fraction * 100, 3) + "\n";
  }
  return out;
}

KeyValues DatasetReport::to_kv() const {
  KeyValues kv;
  kv.set("images", static_cast<long long>(images.size()));
  kv.set("over_code", over_code);
  kv.set("under_code", under_code);
  kv.set("under_mean", under_mean);
  kv.set("under_stdev", under_stdev);
  kv.set("over_mean", over_mean);
  kv.set("over_stdev", over_stdev);
  kv.set("min_width", min_width);
  kv.set("min_height", min_height);
  kv.set("max_width", max_width);
  kv.set("max_height", max_height);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string p = "image." + std::to_string(i) + ".";
    kv.set(p + "name", images[i].name);
    kv.set(p + "under", images[i].under_fraction);
    kv.set(p + "over", images[i].over_fraction);
  }
  return kv;
}

}  // namespace lhdr::io
