// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lhdr/kv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lhdr {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key");
    }
    if (kv.has(key)) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" +
                       std::string(key) + "'");
    }
    kv.entries_.emplace_back(std::string(key), std::string(value));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string KeyValues::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

bool KeyValues::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == key; });
}

void KeyValues::set(std::string key, std::string value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValues::set(std::string key, double value) {
  set(std::move(key), format_double(value));
}

void KeyValues::set(std::string key, long long value) {
  set(std::move(key), std::to_string(value));
}

const std::string& KeyValues::get(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  throw ParseError("missing key '" + std::string(key) + "'");
}

std::string KeyValues::get_or(std::string_view key, std::string fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValues::get_double(std::string_view key) const {
  const std::string& s = get(key);
  if (s == "inf") return INFINITY;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("key '" + std::string(key) + "': not a number: " + s);
  }
  return v;
}

long long KeyValues::get_int(std::string_view key) const {
  const std::string& s = get(key);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("key '" + std::string(key) + "': not an integer: " + s);
  }
  return v;
}

bool KeyValues::get_bool(std::string_view key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("key '" + std::string(key) + "': not a boolean: " + s);
}

std::vector<double> KeyValues::get_doubles(std::string_view key) const {
  std::vector<double> out;
  std::string_view rest = get(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    double v = 0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ParseError("key '" + std::string(key) + "': bad list element '" +
                       std::string(item) + "'");
    }
    out.push_back(v);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return out;
}

void KeyValues::require_known(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [k, v] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ParseError("unknown key '" + k + "'");
    }
  }
}

}  // namespace lhdr
