#pragma once

#include <gmpxx.h>

#include <string>

#include "amen/errors.hpp"

namespace amen {

/// Exact rational scalar used for every ratio and threshold in the workbench.
/// No decision anywhere is made in floating point.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p/q" or "p" with optional sign; denominator must be positive after
/// canonicalization.
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) fail(Errc::bad_input, "empty rational literal");
  try {
    Rational q(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    fail(Errc::bad_input, "malformed rational literal '" + s + "'");
  }
}

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

/// Floor of a nonnegative rational as an unsigned long (radii in graph metrics).
inline unsigned long rational_floor_ul(const Rational& q) {
  mpz_class z = q.get_num() / q.get_den();
  if (q < 0) fail(Errc::bad_input, "expected a nonnegative rational");
  return z.get_ui();
}

} // namespace amen
