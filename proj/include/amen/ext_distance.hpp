#pragma once

#include <compare>
#include <string>

#include "amen/rational.hpp"

namespace amen {

/// Distance value in [0, infinity]. Infinity is a dedicated state, never a
/// numeric sentinel; addition absorbs it.
class ExtDistance {
public:
  ExtDistance() : finite_(true), value_(0) {}
  ExtDistance(Rational v) : finite_(true), value_(std::move(v)) {
    if (value_ < 0) fail(Errc::bad_input, "negative distance");
  }
  ExtDistance(long v) : ExtDistance(rat(v)) {}

  static ExtDistance infinity() {
    ExtDistance d;
    d.finite_ = false;
    return d;
  }

  bool is_finite() const { return finite_; }
  bool is_infinite() const { return !finite_; }

  /// Finite value; caller must check is_finite() first.
  const Rational& value() const {
    if (!finite_) fail(Errc::bad_input, "infinite distance has no finite value");
    return value_;
  }

  friend ExtDistance operator+(const ExtDistance& a, const ExtDistance& b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtDistance(a.value_ + b.value_);
  }

  friend bool operator==(const ExtDistance& a, const ExtDistance& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }

  /// Total order with infinity strictly above every finite value.
  friend bool operator<(const ExtDistance& a, const ExtDistance& b) {
    if (a.finite_ && b.finite_) return a.value_ < b.value_;
    return a.finite_ && !b.finite_;
  }
  friend bool operator<=(const ExtDistance& a, const ExtDistance& b) { return a < b || a == b; }
  friend bool operator>(const ExtDistance& a, const ExtDistance& b) { return b < a; }
  friend bool operator>=(const ExtDistance& a, const ExtDistance& b) { return b <= a; }

  std::string str() const { return finite_ ? rational_to_string(value_) : "inf"; }

private:
  bool finite_;
  Rational value_;
};

inline ExtDistance ext_distance_from_string(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return ExtDistance::infinity();
  return ExtDistance(rational_from_string(s));
}

} // namespace amen
