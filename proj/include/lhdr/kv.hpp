// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lhdr {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered `key = value` store used for config files, manifests and the
/// machine-readable report lines. '#' starts a comment.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::filesystem::path& path);

  std::string to_text() const;

  bool has(std::string_view key) const;
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, long long value);
  void set(std::string key, int value) { set(std::move(key), static_cast<long long>(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

  const std::string& get(std::string_view key) const;
  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;

  /// Throws ParseError naming the first key that is not in `allowed`.
  void require_known(std::initializer_list<std::string_view> allowed) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace lhdr
