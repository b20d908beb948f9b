// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace breakage {

// Scalar value carried by resource fields, tool arguments, and condition
// literals. std::monostate stands for "absent" (a removed map key, a missing
// field). Absence is a value here, not an error.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

inline bool is_absent(const Value& v) { return std::holds_alternative<std::monostate>(v); }

std::string value_to_string(const Value& v);

// Parses a bare token: int, then double, then bool, then string.
Value parse_scalar(const std::string& token);

// Numeric view for comparisons; absent for non-numeric values.
std::optional<double> value_as_number(const Value& v);

bool value_eq(const Value& a, const Value& b);

// A field-path -> value patch. Dotted paths address nested fields
// ("data.db-password", "env.DB_URL", "liveness_probe.path").
using FieldPatch = std::map<std::string, Value>;

enum class ErrorKind {
  UnknownKey,
  TypeMismatch,
  Syntax,
  Schema,
  Vocabulary,
  DuplicateId,
  DimensionMismatch,
  BadArity,
  BadPlan,
  Io,
};

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// ---------------------------------------------------------------------------
// Deterministic hashing and PRNG. Everything observable in a run flows from
// these; no std::random distributions (their output is not pinned by the
// standard) and no wall clock.
// ---------------------------------------------------------------------------

// DJB2, 64-bit wraparound variant: h = 5381; h = h*33 XOR byte.
std::uint64_t djb2(const std::string& text);

constexpr std::uint64_t kZeroSeedRemap = 0x9e3779b97f4a7c15ULL;

// xorshift64* stream. Zero seed is remapped to a fixed nonzero constant.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed == 0 ? kZeroSeedRemap : seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  bool bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

 private:
  std::uint64_t state_;
};

// Order-sensitive 64-bit mix of strings and integers; stable across hosts.
// Used for per-run seeds and run ids.
class StableHash {
 public:
  StableHash& mix(std::uint64_t v);
  StableHash& mix(const std::string& s);
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;  // FNV offset basis
};

std::string hex16(std::uint64_t v);

}  // namespace breakage
