// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lhdr/kv.hpp"
#include "lhdr/net.hpp"

namespace lhdr {

/// Binary checkpoint layout (all integers little-endian):
///
///   "LHDR"                     4 bytes
///   version                    u16 (currently 1)
///   config length, config      u32 + UTF-8 "key = value" lines; model keys
///                              plus free-form metadata under "meta."
///   record count               u32
///   per record:
///     name length, name        u32 + bytes (e.g. "local.head.weight")
///     dims                     4 x u32 (n, c, h, w)
///     values                   n*c*h*w x f32
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  net::Model<float> model;
  KeyValues meta;  // keys without the "meta." prefix
  std::int64_t element_count = 0;  // values read from the records
};

std::vector<std::uint8_t> serialize_checkpoint(const net::Model<float>& model,
                                               const KeyValues& meta = {});
/// Throws ParseError on malformed bytes, version mismatch, or records that
/// do not match the layer inventory of the stored config.
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const net::Model<float>& model,
                     const KeyValues& meta = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lhdr
