#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amen/errors.hpp"
#include "amen/field.hpp"

namespace amen {

/// Canonical basis monomial of an algebra backend: an opaque integer encoding
/// owned by the backend, totally ordered by shortlex on the raw encoding so
/// that echelon forms do not depend on construction order.
class Mono {
public:
  Mono() = default;
  explicit Mono(std::vector<std::int32_t> enc) : enc_(std::move(enc)) {}

  const std::vector<std::int32_t>& enc() const { return enc_; }

  friend bool operator==(const Mono& a, const Mono& b) { return a.enc_ == b.enc_; }
  friend bool operator<(const Mono& a, const Mono& b) {
    if (a.enc_.size() != b.enc_.size()) return a.enc_.size() < b.enc_.size();
    return a.enc_ < b.enc_;
  }

private:
  std::vector<std::int32_t> enc_;
};

template <FieldType F>
class Vec;

/// Algebra presented through a canonically ordered (possibly infinite) basis
/// of monomials with a normal-form product. Immutable after construction.
template <FieldType F>
class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual bool valid(const Mono& m) const = 0;
  /// Normal form of the product of two basis monomials.
  virtual Vec<F> mul(const Mono& a, const Mono& b) const = 0;
  /// The unit as a basis combination; nullopt for non-unital algebras.
  virtual std::optional<Vec<F>> unit() const = 0;
  virtual long grade(const Mono& m) const = 0;
  /// All basis monomials of grade <= d, sorted.
  virtual std::vector<Mono> basis_up_to(long d) const = 0;
  virtual std::string label(const Mono& m) const = 0;
};

/// Sparse vector over a backend's basis. No zero entries are stored.
template <FieldType F>
class Vec {
public:
  using Value = typename F::Value;

  Vec() : bk_(nullptr) {}
  explicit Vec(const Backend<F>* bk) : bk_(bk) {}
  Vec(const Backend<F>* bk, const Mono& m) : bk_(bk) { terms_[m] = F::one(); }

  const Backend<F>* backend() const { return bk_; }
  const std::map<Mono, Value>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }

  /// Largest monomial in the support (the pivot position).
  const Mono& lead() const {
    if (terms_.empty()) fail(Errc::bad_input, "zero vector has no leading term");
    return terms_.rbegin()->first;
  }
  const Value& lead_coeff() const { return terms_.rbegin()->second; }

  Value coeff(const Mono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? F::zero() : it->second;
  }

  void add_term(const Mono& m, const Value& c) {
    if (F::is_zero(c)) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second = F::add(it->second, c);
      if (F::is_zero(it->second)) terms_.erase(it);
    }
  }

  Vec& operator+=(const Vec& o) {
    check_backend(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  Vec& axpy(const Value& a, const Vec& o) { // *this += a * o
    check_backend(o);
    if (F::is_zero(a)) return *this;
    for (const auto& [m, c] : o.terms_) add_term(m, F::mul(a, c));
    return *this;
  }

  Vec& scale(const Value& a) {
    if (F::is_zero(a)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c = F::mul(a, c);
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }

  friend Vec operator*(const Vec& a, const Vec& b) {
    a.check_backend(b);
    Vec out(a.bk_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_)
        out.axpy(F::mul(ca, cb), a.bk_->mul(ma, mb));
    return out;
  }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib)
      if (!(ia->first == ib->first) || !F::eq(ia->second, ib->second)) return false;
    return true;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += F::str(c) + "*" + (bk_ ? bk_->label(m) : "?");
    }
    return s;
  }

private:
  void check_backend(const Vec& o) const {
    if (bk_ != o.bk_) fail(Errc::backend_mismatch, "vectors belong to different backends");
  }

  const Backend<F>* bk_;
  std::map<Mono, Value> terms_;
};

/// Finite-dimensional subspace held in reduced row echelon form: rows have
/// strictly increasing pivot monomials, pivot coefficient one, and each pivot
/// is eliminated from every other row. The representation is canonical, so
/// permuting the generators yields identical bases.
template <FieldType F>
class Subspace {
public:
  using Value = typename F::Value;

  Subspace() : bk_(nullptr) {}
  explicit Subspace(const Backend<F>* bk) : bk_(bk) {}

  const Backend<F>* backend() const { return bk_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<Vec<F>>& basis() const { return rows_; }

  /// Reduces v against the basis; the returned vector is zero iff v lies in
  /// the subspace.
  Vec<F> reduce(Vec<F> v) const {
    for (const auto& row : rows_) {
      if (v.is_zero()) break;
      Value c = v.coeff(row.lead());
      if (!F::is_zero(c)) v.axpy(F::neg(c), row);
    }
    return v;
  }

  bool contains(const Vec<F>& v) const { return reduce(v).is_zero(); }

  /// Inserts a vector, returning true if the dimension grew.
  bool insert(Vec<F> v) {
    if (bk_ == nullptr) bk_ = v.backend();
    v = reduce(std::move(v));
    if (v.is_zero()) return false;
    v.scale(F::inv(v.lead_coeff()));
    // Back-eliminate the new pivot from existing rows.
    for (auto& row : rows_) {
      Value c = row.coeff(v.lead());
      if (!F::is_zero(c)) row.axpy(F::neg(c), v);
    }
    auto pos = std::lower_bound(rows_.begin(), rows_.end(), v,
                                [](const Vec<F>& a, const Vec<F>& b) {
                                  return a.lead() < b.lead();
                                });
    rows_.insert(pos, std::move(v));
    return true;
  }

  void insert_all(const std::vector<Vec<F>>& vs) {
    for (const auto& v : vs) insert(v);
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    if (a.rows_.size() != b.rows_.size()) return false;
    for (std::size_t i = 0; i < a.rows_.size(); ++i)
      if (!(a.rows_[i] == b.rows_[i])) return false;
    return true;
  }

private:
  const Backend<F>* bk_;
  std::vector<Vec<F>> rows_;
};

// ---------------------------------------------------------------------------
// Subspace calculus
// ---------------------------------------------------------------------------

template <FieldType F>
Subspace<F> span(const Backend<F>& bk, const std::vector<Vec<F>>& vs) {
  Subspace<F> s(&bk);
  s.insert_all(vs);
  return s;
}

template <FieldType F>
Subspace<F> span_of_monomials(const Backend<F>& bk, const std::vector<Mono>& ms) {
  Subspace<F> s(&bk);
  for (const Mono& m : ms) s.insert(Vec<F>(&bk, m));
  return s;
}

template <FieldType F>
Subspace<F> sum(const Subspace<F>& a, const Subspace<F>& b) {
  if (a.backend() && b.backend() && a.backend() != b.backend())
    fail(Errc::backend_mismatch, "subspace sum across backends");
  Subspace<F> s = a;
  s.insert_all(b.basis());
  return s;
}

template <FieldType F>
long intersect_dim(const Subspace<F>& a, const Subspace<F>& b) {
  return static_cast<long>(a.dim() + b.dim() - sum(a, b).dim());
}

/// Left action: span{ a * w : w in basis(W) }.
template <FieldType F>
Subspace<F> act(const Vec<F>& a, const Subspace<F>& w) {
  Subspace<F> s(a.backend());
  for (const auto& row : w.basis()) s.insert(a * row);
  return s;
}

/// Right action: span{ w * a : w in basis(W) }.
template <FieldType F>
Subspace<F> act_right(const Subspace<F>& w, const Vec<F>& a) {
  Subspace<F> s(a.backend());
  for (const auto& row : w.basis()) s.insert(row * a);
  return s;
}

/// dim(aW + W) / dim(W), exactly. The ratio is a rational regardless of the
/// scalar field.
template <FieldType F>
Rational folner_subspace_ratio(const Vec<F>& a, const Subspace<F>& w) {
  if (w.dim() == 0) fail(Errc::zero_subspace, "Folner ratio of the zero subspace");
  Subspace<F> aw = sum(act(a, w), w);
  Rational q(static_cast<long>(aw.dim()), static_cast<long>(w.dim()));
  q.canonicalize();
  return q;
}

template <FieldType F>
Rational folner_subspace_ratio_right(const Subspace<F>& w, const Vec<F>& a) {
  if (w.dim() == 0) fail(Errc::zero_subspace, "Folner ratio of the zero subspace");
  Subspace<F> wa = sum(act_right(w, a), w);
  Rational q(static_cast<long>(wa.dim()), static_cast<long>(w.dim()));
  q.canonicalize();
  return q;
}

/// Per-element check dim(aW+W) <= (1+eps) dim(W) for every a in F.
template <FieldType F>
bool is_folner_subspace(const std::vector<Vec<F>>& gens, const Subspace<F>& w,
                        const Rational& eps) {
  for (const auto& a : gens)
    if (folner_subspace_ratio(a, w) > 1 + eps) return false;
  return true;
}

/// dim(span(FW + W)) / dim(W): the one-shot variant bounded by 1 + |F| eps
/// for an (F, eps)-Folner subspace.
template <FieldType F>
Rational span_variant_ratio(const std::vector<Vec<F>>& gens, const Subspace<F>& w) {
  if (w.dim() == 0) fail(Errc::zero_subspace, "Folner ratio of the zero subspace");
  Subspace<F> acc = w;
  for (const auto& a : gens) acc = sum(acc, act(a, w));
  Rational q(static_cast<long>(acc.dim()), static_cast<long>(w.dim()));
  q.canonicalize();
  return q;
}

/// All products of at most n factors from the given set, deduplicated by
/// normal form.
template <FieldType F>
std::vector<Vec<F>> amplify(const std::vector<Vec<F>>& gens, long n,
                            std::size_t cap = 100000) {
  if (n < 1) fail(Errc::bad_input, "amplification length must be >= 1");
  std::vector<Vec<F>> out;
  auto push_unique = [&](const Vec<F>& v) {
    for (const auto& u : out)
      if (u == v) return;
    out.push_back(v);
    if (out.size() > cap) fail(Errc::size_cap, "amplified set exceeds the cap");
  };
  std::vector<Vec<F>> layer = gens;
  for (const auto& v : layer) push_unique(v);
  for (long k = 2; k <= n; ++k) {
    std::vector<Vec<F>> next;
    for (const auto& v : layer)
      for (const auto& g : gens) {
        Vec<F> p = v * g;
        next.push_back(p);
        push_unique(p);
        if (next.size() > cap) fail(Errc::size_cap, "amplified set exceeds the cap");
      }
    layer = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proper infiniteness and algebraic paradoxicality
// ---------------------------------------------------------------------------

struct WitnessCheck {
  bool ok = true;
  std::string failing_relation;
};

/// Checks u u' = v v' = 1 and v u' = u v' = 0 exactly.
template <FieldType F>
WitnessCheck verify_properly_infinite_witness(const Vec<F>& u, const Vec<F>& u2,
                                              const Vec<F>& v, const Vec<F>& v2) {
  const Backend<F>* bk = u.backend();
  auto one = bk->unit();
  if (!one) fail(Errc::non_unital_backend, "witness relations need a unit");
  WitnessCheck r;
  if (!(u * u2 == *one)) {
    r.ok = false;
    r.failing_relation = "u*u' != 1";
  } else if (!(v * v2 == *one)) {
    r.ok = false;
    r.failing_relation = "v*v' != 1";
  } else if (!(v * u2).is_zero()) {
    r.ok = false;
    r.failing_relation = "v*u' != 0";
  } else if (!(u * v2).is_zero()) {
    r.ok = false;
    r.failing_relation = "u*v' != 0";
  }
  return r;
}

/// Algebraic paradoxical decomposition data over a basis segment: two
/// partitions of the segment together with multipliers (index 0 carries no
/// multiplier).
template <FieldType F>
struct AlgebraicParadox {
  std::vector<std::vector<Mono>> left_blocks;  // L_0 .. L_n
  std::vector<std::vector<Mono>> right_blocks; // R_0 .. R_m
  std::vector<Vec<F>> left_mults;              // g_1 .. g_n (size n)
  std::vector<Vec<F>> right_mults;             // h_1 .. h_m (size m)
};

namespace detail {

inline bool is_partition_of(const std::vector<std::vector<Mono>>& blocks,
                            const std::vector<Mono>& segment) {
  std::set<std::vector<std::int32_t>> seen;
  std::size_t total = 0;
  for (const auto& blk : blocks)
    for (const Mono& m : blk) {
      if (!seen.insert(m.enc()).second) return false;
      ++total;
    }
  if (total != segment.size()) return false;
  for (const Mono& m : segment)
    if (!seen.count(m.enc())) return false;
  return true;
}

} // namespace detail

/// Verifies partition shape and exact linear independence of
/// L_0 u g_1 L_1 u ... u R_0 u h_1 R_1 u ..., restricted to the inner segment
/// (grade <= max grade - margin). Products leaving the segment's span raise
/// MarginTooSmall.
template <FieldType F>
bool verify_algebraic_paradox(const Backend<F>& bk, const std::vector<Mono>& segment,
                              const AlgebraicParadox<F>& p, long margin) {
  if (p.left_blocks.empty() || p.right_blocks.empty())
    fail(Errc::bad_input, "partitions must have at least the 0-block");
  if (p.left_mults.size() + 1 != p.left_blocks.size() ||
      p.right_mults.size() + 1 != p.right_blocks.size())
    fail(Errc::bad_input, "multiplier count must match partition blocks");
  if (!detail::is_partition_of(p.left_blocks, segment) ||
      !detail::is_partition_of(p.right_blocks, segment))
    return false;

  long top = 0;
  std::set<std::vector<std::int32_t>> in_segment;
  for (const Mono& m : segment) {
    top = std::max(top, bk.grade(m));
    in_segment.insert(m.enc());
  }
  const long inner = top - margin;
  if (inner < 0) fail(Errc::margin_too_small, "margin swallows the whole segment");

  auto segment_spanned = [&](const Vec<F>& v) {
    for (const auto& [m, c] : v.terms())
      if (!in_segment.count(m.enc())) return false;
    return true;
  };

  Subspace<F> indep(&bk);
  std::size_t count = 0;
  auto feed = [&](const std::vector<Mono>& blk, const Vec<F>* mult) -> bool {
    for (const Mono& m : blk) {
      if (bk.grade(m) > inner) continue; // outside the inner segment
      Vec<F> v = mult ? (*mult) * Vec<F>(&bk, m) : Vec<F>(&bk, m);
      if (!segment_spanned(v))
        fail(Errc::margin_too_small,
             "image of " + bk.label(m) + " leaves the basis segment");
      ++count;
      if (!indep.insert(std::move(v))) return false; // dependence found
    }
    return true;
  };

  for (std::size_t i = 0; i < p.left_blocks.size(); ++i)
    if (!feed(p.left_blocks[i], i == 0 ? nullptr : &p.left_mults[i - 1])) return false;
  for (std::size_t j = 0; j < p.right_blocks.size(); ++j)
    if (!feed(p.right_blocks[j], j == 0 ? nullptr : &p.right_mults[j - 1])) return false;
  return indep.dim() == count;
}

/// Refines a two-partition decomposition into the one-partition form
/// T_ij = L_i cap R_j with multiplier pairs (g_i, h_j), using the unit for
/// index 0. Empty blocks are pruned.
template <FieldType F>
AlgebraicParadox<F> one_partition_form(const Backend<F>& bk, const AlgebraicParadox<F>& p) {
  auto one = bk.unit();
  if (!one) fail(Errc::non_unital_backend, "one-partition form uses the unit for index 0");
  AlgebraicParadox<F> out;
  for (std::size_t i = 0; i < p.left_blocks.size(); ++i) {
    std::set<std::vector<std::int32_t>> li;
    for (const Mono& m : p.left_blocks[i]) li.insert(m.enc());
    for (std::size_t j = 0; j < p.right_blocks.size(); ++j) {
      std::vector<Mono> tij;
      for (const Mono& m : p.right_blocks[j])
        if (li.count(m.enc())) tij.push_back(m);
      if (tij.empty()) continue;
      std::sort(tij.begin(), tij.end());
      out.left_blocks.push_back(tij);
      out.right_blocks.push_back(tij);
      out.left_mults.push_back(i == 0 ? *one : p.left_mults[i - 1]);
      out.right_mults.push_back(j == 0 ? *one : p.right_mults[j - 1]);
    }
  }
  // Re-shape: the one-partition form applies a multiplier to every block, so
  // prepend an empty 0-block on both sides.
  out.left_blocks.insert(out.left_blocks.begin(), {});
  out.right_blocks.insert(out.right_blocks.begin(), {});
  return out;
}

// ---------------------------------------------------------------------------
// Dimension measures
// ---------------------------------------------------------------------------

/// mu(A) = dim(I cap A) / dim(I) for a fixed nonzero finite-dimensional left
/// ideal I. Ideal closure is validated against the supplied generators.
template <FieldType F>
Rational ideal_dimension_measure(const Subspace<F>& ideal, const Subspace<F>& a,
                                 const std::vector<Vec<F>>& closure_generators) {
  if (ideal.dim() == 0) fail(Errc::zero_subspace, "measure ideal is zero");
  for (std::size_t i = 0; i < closure_generators.size(); ++i) {
    Subspace<F> gi = act(closure_generators[i], ideal);
    for (const auto& row : gi.basis())
      if (!ideal.contains(row))
        fail(Errc::not_an_ideal,
             "generator #" + std::to_string(i) + " does not preserve the ideal");
  }
  Rational q(intersect_dim(ideal, a), static_cast<long>(ideal.dim()));
  q.canonicalize();
  return q;
}

/// Measure oracle together with sample material for the axiom checks.
template <FieldType F>
struct MeasureSamples {
  std::vector<std::pair<Subspace<F>, Subspace<F>>> disjoint_pairs; // A cap B = 0
  std::vector<std::pair<Subspace<F>, Subspace<F>>> nested_pairs;   // A subset B
  std::vector<std::pair<Vec<F>, Subspace<F>>> injective_actions;   // (s, A), s|_A injective
};

struct MeasureAxiomReport {
  bool superadditivity_ok = true; // mu(A + B) >= mu(A) + mu(B) on disjoint pairs
  bool monotonicity_ok = true;    // mu(A) <= mu(B) on nested pairs
  bool invariance_ok = true;      // mu(sA) >= mu(A) on injective actions
  long skipped_non_injective = 0; // samples whose injectivity precheck failed
  std::string violation;
};

/// Checks superadditivity on disjoint pairs, monotonicity on nested pairs and
/// s-invariance on injective samples. s|_A is injective iff dim(sA) = dim(A),
/// i.e. A meets the right annihilator of s trivially.
template <FieldType F>
MeasureAxiomReport verify_measure_axioms_on_samples(
    const std::function<Rational(const Subspace<F>&)>& mu, const MeasureSamples<F>& samples) {
  MeasureAxiomReport rep;
  for (const auto& [a, b] : samples.disjoint_pairs) {
    if (intersect_dim(a, b) != 0) continue;
    if (mu(sum(a, b)) < mu(a) + mu(b)) {
      rep.superadditivity_ok = false;
      rep.violation = "mu(A+B) < mu(A) + mu(B) on a disjoint pair";
      break;
    }
  }
  for (const auto& [a, b] : samples.nested_pairs) {
    if (mu(a) > mu(b)) {
      rep.monotonicity_ok = false;
      rep.violation = "mu not monotone on a nested pair";
      break;
    }
  }
  for (const auto& [s, a] : samples.injective_actions) {
    Subspace<F> sa = act(s, a);
    if (sa.dim() != a.dim()) { // r.ann(s) meets A
      ++rep.skipped_non_injective;
      continue;
    }
    if (mu(sa) < mu(a)) {
      rep.invariance_ok = false;
      rep.violation = "mu(sA) < mu(A) for an injective action";
      break;
    }
  }
  return rep;
}

} // namespace amen
