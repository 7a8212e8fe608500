// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lhdr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace lhdr {

namespace {

constexpr char kMagic[4] = {'L', 'H', 'D', 'R'};
constexpr std::string_view kMetaPrefix = "meta.";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u16(std::uint16_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void text(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void bytes(void* p, std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw ParseError(std::string("checkpoint truncated while reading ") + what);
    }
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint16_t u16(const char* what) {
    std::uint16_t v;
    bytes(&v, sizeof v, what);
    return v;
  }
  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    bytes(&v, sizeof v, what);
    return v;
  }
  std::string text(const char* what) {
    const std::uint32_t n = u32(what);
    if (in_.size() - pos_ < n) {
      throw ParseError(std::string("checkpoint truncated while reading ") + what);
    }
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const net::Model<float>& model,
                                               const KeyValues& meta) {
  KeyValues header = model.config().to_kv();
  for (const auto& [key, value] : meta.entries()) {
    header.set(std::string(kMetaPrefix) + key, value);
  }
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u16(kCheckpointVersion);
  w.text(header.to_text());
  const auto& params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.text(p.name);
    const Shape& s = p.tensor.shape();
    for (int d : {s.n, s.c, s.h, s.w}) w.u32(static_cast<std::uint32_t>(d));
    w.bytes(p.tensor.ptr(), p.tensor.numel() * sizeof(float));
  }
  return w.take();
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  r.bytes(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ParseError("not an LHDR checkpoint (bad magic)");
  }
  const std::uint16_t version = r.u16("version");
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint version " + std::to_string(version) +
                     " is not supported (expected " +
                     std::to_string(kCheckpointVersion) + ")");
  }
  const KeyValues header = KeyValues::parse(r.text("config"));
  KeyValues config;
  KeyValues meta;
  for (const auto& [key, value] : header.entries()) {
    if (key.starts_with(kMetaPrefix)) {
      meta.set(key.substr(kMetaPrefix.size()), value);
    } else {
      config.set(key, value);
    }
  }
  net::ModelConfig cfg;
  try {
    cfg = net::ModelConfig::from_kv(config);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("checkpoint config invalid: ") + e.what());
  }

  Checkpoint ck{net::Model<float>(cfg), std::move(meta), 0};
  auto& params = ck.model.parameters();
  const std::uint32_t count = r.u32("record count");
  if (count != params.size()) {
    throw ParseError("checkpoint has " + std::to_string(count) +
                     " records but its config defines " +
                     std::to_string(params.size()) + " tensors");
  }
  for (auto& p : params) {
    const std::string name = r.text("record name");
    if (name != p.name) {
      throw ParseError("checkpoint record '" + name + "' found where '" + p.name +
                       "' was expected");
    }
    const Shape& s = p.tensor.shape();
    for (int d : {s.n, s.c, s.h, s.w}) {
      const std::uint32_t got = r.u32("record dims");
      if (got != static_cast<std::uint32_t>(d)) {
        throw ParseError("checkpoint record '" + name + "' has dims that do not match " +
                         s.str());
      }
    }
    r.bytes(p.tensor.ptr(), p.tensor.numel() * sizeof(float), "record values");
    ck.element_count += static_cast<std::int64_t>(p.tensor.numel());
  }
  if (!r.done()) throw ParseError("trailing bytes after the last checkpoint record");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const net::Model<float>& model,
                     const KeyValues& meta) {
  const auto bytes = serialize_checkpoint(model, meta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace lhdr
