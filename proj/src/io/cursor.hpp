// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "lhdr/kv.hpp"

namespace lhdr::io::detail {

/// Bounds-checked reader over an in-memory file.
class Cursor {
 public:
  Cursor(std::span<const std::uint8_t> bytes, const char* format)
      : bytes_(bytes), format_(format) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(std::string(format_) + ": " + what);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  std::uint8_t byte() {
    if (at_end()) fail("unexpected end of data");
    return bytes_[pos_++];
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) fail("truncated payload");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  /// Skips whitespace and '#' comments, then reads a run of non-space bytes.
  std::string token(bool comments) {
    for (;;) {
      while (!at_end() && is_space(bytes_[pos_])) ++pos_;
      if (comments && !at_end() && bytes_[pos_] == '#') {
        while (!at_end() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    std::string out;
    while (!at_end() && !is_space(bytes_[pos_])) {
      if (out.size() >= 64) fail("header token too long");
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) fail("unexpected end of header");
    return out;
  }

  /// Reads a line without its terminating newline.
  std::string line(std::size_t limit = 4096) {
    std::string out;
    for (;;) {
      if (at_end()) fail("unexpected end of header");
      const std::uint8_t c = bytes_[pos_++];
      if (c == '\n') return out;
      if (out.size() >= limit) fail("header line too long");
      out.push_back(static_cast<char>(c));
    }
  }

  /// The single whitespace byte that ends a binary header.
  void header_end() {
    if (at_end() || !is_space(bytes_[pos_])) fail("missing whitespace after header");
    ++pos_;
  }

  static bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

 private:
  std::span<const std::uint8_t> bytes_;
  const char* format_;
  std::size_t pos_ = 0;
};

/// Positive integer dimension with an upper bound.
int parse_dim(Cursor& cur, const std::string& token, const char* what);

}  // namespace lhdr::io::detail
