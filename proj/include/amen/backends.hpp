#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amen/linalg.hpp"

namespace amen {

/// Laurent polynomials K[x, x^-1]. Monomial encoding: [k] for x^k.
template <FieldType F>
class LaurentBackend final : public Backend<F> {
public:
  std::string name() const override { return "laurent"; }

  bool valid(const Mono& m) const override { return m.enc().size() == 1; }

  Vec<F> mul(const Mono& a, const Mono& b) const override {
    Vec<F> out(this);
    out.add_term(x(a.enc()[0] + b.enc()[0]), F::one());
    return out;
  }

  std::optional<Vec<F>> unit() const override { return Vec<F>(this, x(0)); }

  long grade(const Mono& m) const override { return std::abs(static_cast<long>(m.enc()[0])); }

  std::vector<Mono> basis_up_to(long d) const override {
    std::vector<Mono> out;
    for (long k = -d; k <= d; ++k) out.push_back(x(static_cast<std::int32_t>(k)));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string label(const Mono& m) const override {
    long k = m.enc()[0];
    if (k == 0) return "1";
    if (k == 1) return "x";
    return "x^" + std::to_string(k);
  }

  static Mono x(std::int32_t k) { return Mono({k}); }
};

/// Full matrix algebra M_n(K). Monomial encoding: [i, j] for the unit E_ij.
template <FieldType F>
class MatrixBackend final : public Backend<F> {
public:
  explicit MatrixBackend(int n) : n_(n) {
    if (n < 1) fail(Errc::bad_input, "matrix size must be positive");
  }

  std::string name() const override { return "matrix" + std::to_string(n_); }
  int size() const { return n_; }

  bool valid(const Mono& m) const override {
    return m.enc().size() == 2 && m.enc()[0] >= 0 && m.enc()[0] < n_ && m.enc()[1] >= 0 &&
           m.enc()[1] < n_;
  }

  Vec<F> mul(const Mono& a, const Mono& b) const override {
    Vec<F> out(this);
    if (a.enc()[1] == b.enc()[0]) out.add_term(unit_mono(a.enc()[0], b.enc()[1]), F::one());
    return out;
  }

  std::optional<Vec<F>> unit() const override {
    Vec<F> out(this);
    for (int i = 0; i < n_; ++i) out.add_term(unit_mono(i, i), F::one());
    return out;
  }

  long grade(const Mono&) const override { return 0; }

  std::vector<Mono> basis_up_to(long) const override {
    std::vector<Mono> out;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out.push_back(unit_mono(i, j));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string label(const Mono& m) const override {
    return "E" + std::to_string(m.enc()[0]) + std::to_string(m.enc()[1]);
  }

  static Mono unit_mono(int i, int j) {
    return Mono({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
  }

private:
  int n_;
};

/// Direct sum A + B with componentwise product and zero cross terms.
/// Monomial encoding: [tag, payload...] with tag 0 for A and 1 for B.
template <FieldType F>
class DirectSumBackend final : public Backend<F> {
public:
  DirectSumBackend(std::shared_ptr<const Backend<F>> a, std::shared_ptr<const Backend<F>> b)
      : a_(std::move(a)), b_(std::move(b)) {}

  std::string name() const override { return a_->name() + "+" + b_->name(); }

  bool valid(const Mono& m) const override {
    if (m.enc().empty()) return false;
    int tag = m.enc()[0];
    if (tag != 0 && tag != 1) return false;
    return part(tag).valid(strip(m));
  }

  Vec<F> mul(const Mono& a, const Mono& b) const override {
    Vec<F> out(this);
    int tag = a.enc()[0];
    if (tag != b.enc()[0]) return out;
    Vec<F> inner = part(tag).mul(strip(a), strip(b));
    for (const auto& [m, c] : inner.terms()) out.add_term(wrap(tag, m), c);
    return out;
  }

  std::optional<Vec<F>> unit() const override {
    auto ua = a_->unit(), ub = b_->unit();
    if (!ua || !ub) return std::nullopt;
    Vec<F> out(this);
    for (const auto& [m, c] : ua->terms()) out.add_term(wrap(0, m), c);
    for (const auto& [m, c] : ub->terms()) out.add_term(wrap(1, m), c);
    return out;
  }

  long grade(const Mono& m) const override { return part(m.enc()[0]).grade(strip(m)); }

  std::vector<Mono> basis_up_to(long d) const override {
    std::vector<Mono> out;
    for (const Mono& m : a_->basis_up_to(d)) out.push_back(wrap(0, m));
    for (const Mono& m : b_->basis_up_to(d)) out.push_back(wrap(1, m));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string label(const Mono& m) const override {
    return (m.enc()[0] == 0 ? "L." : "R.") + part(m.enc()[0]).label(strip(m));
  }

  static Mono wrap(int tag, const Mono& m) {
    std::vector<std::int32_t> e;
    e.push_back(static_cast<std::int32_t>(tag));
    e.insert(e.end(), m.enc().begin(), m.enc().end());
    return Mono(std::move(e));
  }

private:
  const Backend<F>& part(int tag) const { return tag == 0 ? *a_ : *b_; }
  static Mono strip(const Mono& m) {
    return Mono({m.enc().begin() + 1, m.enc().end()});
  }

  std::shared_ptr<const Backend<F>> a_, b_;
};

} // namespace amen
