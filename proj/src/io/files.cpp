// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "lhdr/io.hpp"

namespace lhdr::io {

Format format_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pfm") return Format::pfm;
  if (ext == ".hdr") return Format::rgbe;
  if (ext == ".ppm") return Format::ppm;
  throw std::invalid_argument("unsupported image extension '" + ext + "' for " +
                              path.string() + " (expected .pfm, .hdr or .ppm)");
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  const Format f = format_for(path);
  const Bytes bytes = read_file(path);
  try {
    switch (f) {
      case Format::pfm:
        return read_pfm(bytes);
      case Format::rgbe:
        return read_rgbe(bytes);
      case Format::ppm:
        return read_ppm(bytes);
    }
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  throw std::logic_error("unreachable");
}

void write_image(const std::filesystem::path& path, const Image& img, int ppm_bit_depth) {
  switch (format_for(path)) {
    case Format::pfm:
      write_file(path, write_pfm(img));
      return;
    case Format::rgbe:
      write_file(path, write_rgbe(img));
      return;
    case Format::ppm:
      write_file(path, write_ppm(img, ppm_bit_depth));
      return;
  }
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error(dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    try {
      format_for(entry.path());
    } catch (const std::invalid_argument&) {
      continue;
    }
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lhdr::io
