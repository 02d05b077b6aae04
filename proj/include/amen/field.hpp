#pragma once

#include <concepts>
#include <cstdint>
#include <string>

#include "amen/rational.hpp"

namespace amen {

/// Exact scalar field. Values are always kept in canonical form.
template <typename F>
concept FieldType = requires(typename F::Value a, typename F::Value b) {
  { F::zero() } -> std::convertible_to<typename F::Value>;
  { F::one() } -> std::convertible_to<typename F::Value>;
  { F::add(a, b) } -> std::convertible_to<typename F::Value>;
  { F::sub(a, b) } -> std::convertible_to<typename F::Value>;
  { F::mul(a, b) } -> std::convertible_to<typename F::Value>;
  { F::neg(a) } -> std::convertible_to<typename F::Value>;
  { F::inv(a) } -> std::convertible_to<typename F::Value>;
  { F::is_zero(a) } -> std::convertible_to<bool>;
  { F::eq(a, b) } -> std::convertible_to<bool>;
  { F::name() } -> std::convertible_to<std::string>;
};

constexpr bool is_prime(unsigned long long n) {
  if (n < 2) return false;
  for (unsigned long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Prime field of order P with residue arithmetic in [0, P).
template <std::uint64_t P>
struct GF {
  static_assert(is_prime(P), "GF order must be prime");
  static_assert(P < (1ull << 31), "GF order too large for 64-bit products");
  using Value = std::uint64_t;

  static Value zero() { return 0; }
  static Value one() { return 1 % P; }
  static Value from_long(long v) {
    long r = v % static_cast<long>(P);
    if (r < 0) r += static_cast<long>(P);
    return static_cast<Value>(r);
  }
  static Value add(Value a, Value b) { return (a + b) % P; }
  static Value sub(Value a, Value b) { return (a + P - b) % P; }
  static Value mul(Value a, Value b) { return a * b % P; }
  static Value neg(Value a) { return (P - a) % P; }
  static Value inv(Value a) {
    if (a == 0) fail(Errc::bad_input, "division by zero");
    // Fermat: a^(P-2) mod P.
    Value r = 1, base = a;
    std::uint64_t e = P - 2;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }
  static bool is_zero(Value a) { return a == 0; }
  static bool eq(Value a, Value b) { return a == b; }
  static std::string name() { return "gf" + std::to_string(P); }
  static std::string str(Value a) { return std::to_string(a); }
};

struct RationalField {
  using Value = Rational;

  static Value zero() { return Rational(0); }
  static Value one() { return Rational(1); }
  static Value from_long(long v) { return rat(v); }
  static Value add(const Value& a, const Value& b) { return a + b; }
  static Value sub(const Value& a, const Value& b) { return a - b; }
  static Value mul(const Value& a, const Value& b) { return a * b; }
  static Value neg(const Value& a) { return -a; }
  static Value inv(const Value& a) {
    if (a == 0) fail(Errc::bad_input, "division by zero");
    return 1 / a;
  }
  static bool is_zero(const Value& a) { return a == 0; }
  static bool eq(const Value& a, const Value& b) { return a == b; }
  static std::string name() { return "rational"; }
  static std::string str(const Value& a) { return rational_to_string(a); }
};

using GF2 = GF<2>;
using GF7 = GF<7>;

} // namespace amen
