#pragma once

#include <stdexcept>
#include <string>

namespace amen {

enum class Errc {
  non_locally_finite,
  invalid_metric,
  empty_set,
  limit_exceeded,
  supplier_exhausted,
  invalid_epsilon,
  budget_exhausted,
  carrier_escape,
  out_of_window,
  backend_mismatch,
  zero_subspace,
  size_cap,
  non_unital_backend,
  margin_too_small,
  not_an_ideal,
  validation_failed,
  breaking_vertices_present,
  empty_graph,
  not_non_exclusive,
  infinite_emitter_unsupported,
  not_constructible_here,
  window_too_small,
  unknown_fixture,
  cap_exceeded,
  bad_input,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::non_locally_finite: return "NonLocallyFinite";
    case Errc::invalid_metric: return "InvalidMetric";
    case Errc::empty_set: return "EmptySet";
    case Errc::limit_exceeded: return "LimitExceeded";
    case Errc::supplier_exhausted: return "SupplierExhausted";
    case Errc::invalid_epsilon: return "InvalidEpsilon";
    case Errc::budget_exhausted: return "BudgetExhausted";
    case Errc::carrier_escape: return "CarrierEscape";
    case Errc::out_of_window: return "OutOfWindow";
    case Errc::backend_mismatch: return "BackendMismatch";
    case Errc::zero_subspace: return "ZeroSubspace";
    case Errc::size_cap: return "SizeCap";
    case Errc::non_unital_backend: return "NonUnitalBackend";
    case Errc::margin_too_small: return "MarginTooSmall";
    case Errc::not_an_ideal: return "NotAnIdeal";
    case Errc::validation_failed: return "ValidationFailed";
    case Errc::breaking_vertices_present: return "BreakingVerticesPresent";
    case Errc::empty_graph: return "EmptyGraph";
    case Errc::not_non_exclusive: return "NotNonExclusive";
    case Errc::infinite_emitter_unsupported: return "InfiniteEmitterUnsupported";
    case Errc::not_constructible_here: return "NotConstructibleHere";
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::unknown_fixture: return "UnknownFixture";
    case Errc::cap_exceeded: return "CapExceeded";
    case Errc::bad_input: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace amen
