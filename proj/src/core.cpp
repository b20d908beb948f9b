// SPDX-License-Identifier: Apache-2.0

#include "breakage/core.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace breakage {

std::string value_to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "absent"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g", d);
      return buf;
    }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

Value parse_scalar(const std::string& token) {
  if (token == "true") return true;
  if (token == "false") return false;
  if (!token.empty()) {
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), i);
    if (ec == std::errc{} && p == token.data() + token.size()) return i;
    double d = 0.0;
    auto [pd, ecd] = std::from_chars(token.data(), token.data() + token.size(), d);
    if (ecd == std::errc{} && pd == token.data() + token.size()) return d;
  }
  return token;
}

std::optional<double> value_as_number(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

bool value_eq(const Value& a, const Value& b) {
  auto na = value_as_number(a);
  auto nb = value_as_number(b);
  if (na && nb) return *na == *nb;
  return a == b;
}

std::uint64_t djb2(const std::string& text) {
  std::uint64_t h = 5381;
  for (unsigned char c : text) h = h * 33ULL ^ static_cast<std::uint64_t>(c);
  return h;
}

StableHash& StableHash::mix(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h_ ^= (v >> (8 * i)) & 0xff;
    h_ *= 0x100000001b3ULL;
  }
  return *this;
}

StableHash& StableHash::mix(const std::string& s) {
  for (unsigned char c : s) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  h_ ^= 0xff;  // separator so mix("ab").mix("c") != mix("a").mix("bc")
  h_ *= 0x100000001b3ULL;
  return *this;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace breakage
