#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "amen/folner.hpp"
#include "amen/space.hpp"

namespace amen {

/// Finitely supported partial injection with bounded displacement.
class PartialTranslation {
public:
  PartialTranslation(ExtendedMetricSpace space, std::map<PointId, PointId> table)
      : space_(std::move(space)), table_(std::move(table)) {
    PointSet seen;
    displacement_ = ExtDistance(0);
    for (const auto& [x, y] : table_) {
      seen.push_back(y);
      ExtDistance d = space_.dist(x, y);
      if (d.is_infinite())
        fail(Errc::bad_input, "translation moves " + space_.label(x) + " across components");
      if (displacement_ < d) displacement_ = d;
    }
    std::size_t n = seen.size();
    ps_normalize(seen);
    if (seen.size() != n) fail(Errc::bad_input, "translation table is not injective");
  }

  const ExtendedMetricSpace& space() const { return space_; }
  const std::map<PointId, PointId>& table() const { return table_; }
  bool empty() const { return table_.empty(); }
  std::size_t size() const { return table_.size(); }

  bool defined_at(PointId x) const { return table_.count(x) > 0; }
  PointId apply(PointId x) const {
    auto it = table_.find(x);
    if (it == table_.end()) fail(Errc::bad_input, "point outside the domain");
    return it->second;
  }

  PointSet domain() const {
    PointSet d;
    d.reserve(table_.size());
    for (const auto& [x, _] : table_) d.push_back(x);
    return d; // std::map iterates in order
  }

  PointSet range() const {
    PointSet r;
    r.reserve(table_.size());
    for (const auto& [_, y] : table_) r.push_back(y);
    ps_normalize(r);
    return r;
  }

  const ExtDistance& displacement() const { return displacement_; }

private:
  ExtendedMetricSpace space_;
  std::map<PointId, PointId> table_;
  ExtDistance displacement_;
};

inline PartialTranslation identity_on(const ExtendedMetricSpace& X, const PointSet& A) {
  std::map<PointId, PointId> t;
  for (PointId x : A) t[x] = x;
  return PartialTranslation(X, std::move(t));
}

/// (t o u)(x) = t(u(x)) on {x in dom(u) : u(x) in dom(t)}.
inline PartialTranslation compose(const PartialTranslation& t, const PartialTranslation& u) {
  std::map<PointId, PointId> out;
  for (const auto& [x, y] : u.table())
    if (t.defined_at(y)) out[x] = t.apply(y);
  return PartialTranslation(t.space(), std::move(out));
}

inline PartialTranslation inverse(const PartialTranslation& t) {
  std::map<PointId, PointId> out;
  for (const auto& [x, y] : t.table()) out[y] = x;
  return PartialTranslation(t.space(), std::move(out));
}

inline bool translations_equal(const PartialTranslation& a, const PartialTranslation& b) {
  return a.table() == b.table();
}

/// Smallest usable doubling radius n * R0 where n = ceil(log_{1+eps0} 2) + 1,
/// computed by exact comparison of (1+eps0)^m against 2.
inline Rational doubling_radius(const Rational& R0, const Rational& eps0) {
  if (!(eps0 > 0) || eps0 > 1) fail(Errc::invalid_epsilon, "epsilon must lie in (0,1]");
  if (!(R0 > 0)) fail(Errc::bad_input, "base radius must be positive");
  Rational base = 1 + eps0;
  Rational pow = base;
  long m = 1;
  while (pow < 2) {
    pow *= base;
    ++m;
  }
  return rat(m + 1) * R0;
}

/// Window-scale paradoxicality witness: two partial translations defined on
/// the whole window with disjoint ranges and displacement <= R.
struct ParadoxCertificate {
  Window window;
  Rational radius;
  PartialTranslation t_plus;
  PartialTranslation t_minus;
};

/// Finite violation of the Hall condition for the doubled window: the points
/// listed in `plus_copy` and `minus_copy` jointly have fewer targets within R
/// than their number.
struct HallViolation {
  PointSet plus_copy;
  PointSet minus_copy;
  long set_size = 0;          // |K| counted with both copies
  long neighborhood_size = 0; // | union of balls |
};

inline bool verify_paradox_certificate(const ParadoxCertificate& c) {
  const auto& W = c.window;
  if (c.t_plus.domain() != W.members || c.t_minus.domain() != W.members) return false;
  if (!ps_disjoint(c.t_plus.range(), c.t_minus.range())) return false;
  ExtDistance r{c.radius};
  return c.t_plus.displacement() <= r && c.t_minus.displacement() <= r;
}

namespace detail {

/// Hopcroft-Karp maximum matching on an explicit bipartite graph.
class HopcroftKarp {
public:
  HopcroftKarp(std::size_t n_left, std::size_t n_right,
               std::vector<std::vector<std::size_t>> adj)
      : nl_(n_left), nr_(n_right), adj_(std::move(adj)), match_l_(n_left, npos),
        match_r_(n_right, npos) {}

  std::size_t solve() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < nl_; ++u)
        if (match_l_[u] == npos && dfs(u)) ++matched;
    }
    return matched;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const std::vector<std::size_t>& left_matches() const { return match_l_; }

  /// Left side of the Koenig construction: left vertices reachable from the
  /// unmatched ones by alternating paths. When the matching is not perfect
  /// this set violates the Hall condition.
  std::vector<std::size_t> koenig_violator() const {
    std::vector<char> seen_l(nl_, 0), seen_r(nr_, 0);
    std::deque<std::size_t> q;
    for (std::size_t u = 0; u < nl_; ++u)
      if (match_l_[u] == npos) {
        seen_l[u] = 1;
        q.push_back(u);
      }
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v : adj_[u]) {
        if (seen_r[v]) continue;
        seen_r[v] = 1;
        std::size_t w = match_r_[v];
        if (w != npos && !seen_l[w]) {
          seen_l[w] = 1;
          q.push_back(w);
        }
      }
    }
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < nl_; ++u)
      if (seen_l[u]) out.push_back(u);
    return out;
  }

private:
  bool bfs() {
    dist_.assign(nl_, npos);
    std::deque<std::size_t> q;
    for (std::size_t u = 0; u < nl_; ++u)
      if (match_l_[u] == npos) {
        dist_[u] = 0;
        q.push_back(u);
      }
    bool found = false;
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      for (std::size_t v : adj_[u]) {
        std::size_t w = match_r_[v];
        if (w == npos) found = true;
        else if (dist_[w] == npos) {
          dist_[w] = dist_[u] + 1;
          q.push_back(w);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t u) {
    for (std::size_t v : adj_[u]) {
      std::size_t w = match_r_[v];
      if (w == npos || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = npos;
    return false;
  }

  std::size_t nl_, nr_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_l_, match_r_, dist_;
};

} // namespace detail

/// Decides window-scale paradoxicality at radius R: matches the doubled window
/// (two tagged copies of W) into targets within distance R. A perfect matching
/// yields two translations with disjoint ranges; otherwise a Hall violator is
/// returned. When the whole doubled window attains the maximum deficiency it
/// is reported as the violator, otherwise the Koenig set is.
inline std::variant<ParadoxCertificate, HallViolation> paradox_certificate(const Window& W,
                                                                           const Rational& R) {
  if (W.empty()) fail(Errc::empty_set, "empty window");
  const ExtendedMetricSpace& X = W.ambient;
  const std::size_t n = W.size();

  PointSet targets;
  std::vector<PointSet> balls(n);
  for (std::size_t i = 0; i < n; ++i) {
    balls[i] = X.ball(W.members[i], R);
    targets = ps_union(targets, balls[i]);
  }
  auto tidx = [&](PointId y) {
    return static_cast<std::size_t>(std::lower_bound(targets.begin(), targets.end(), y) -
                                    targets.begin());
  };

  // Sources: indices 0..n-1 are the '+' copy, n..2n-1 the '-' copy.
  std::vector<std::vector<std::size_t>> adj(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (PointId y : balls[i]) adj[i].push_back(tidx(y));
    adj[n + i] = adj[i];
  }

  detail::HopcroftKarp hk(2 * n, targets.size(), std::move(adj));
  std::size_t matched = hk.solve();
  if (matched == 2 * n) {
    std::map<PointId, PointId> tp, tm;
    const auto& ml = hk.left_matches();
    for (std::size_t i = 0; i < n; ++i) {
      tp[W.members[i]] = targets[ml[i]];
      tm[W.members[i]] = targets[ml[n + i]];
    }
    return ParadoxCertificate{W, R, PartialTranslation(X, std::move(tp)),
                              PartialTranslation(X, std::move(tm))};
  }

  HallViolation viol;
  long full_deficiency = static_cast<long>(2 * n) - static_cast<long>(targets.size());
  long max_deficiency = static_cast<long>(2 * n) - static_cast<long>(matched);
  if (full_deficiency == max_deficiency) {
    viol.plus_copy = W.members;
    viol.minus_copy = W.members;
    viol.set_size = static_cast<long>(2 * n);
    viol.neighborhood_size = static_cast<long>(targets.size());
    return viol;
  }
  PointSet nbhd;
  for (std::size_t u : hk.koenig_violator()) {
    std::size_t i = u % n;
    if (u < n) viol.plus_copy.push_back(W.members[i]);
    else viol.minus_copy.push_back(W.members[i]);
    nbhd = ps_union(nbhd, balls[i]);
    ++viol.set_size;
  }
  viol.neighborhood_size = static_cast<long>(nbhd.size());
  return viol;
}

// ---------------------------------------------------------------------------
// Bernstein-Schroeder promotion of a weak certificate to a partition
// ---------------------------------------------------------------------------

struct ParadoxicalDecomposition {
  PointSet x_plus;
  PointSet x_minus;
  PartialTranslation t_plus;
  PartialTranslation t_minus;
};

inline constexpr std::size_t kDefaultOrbitBudget = 1'000'000;

/// Given injections of a common finite carrier X onto disjoint ranges inside
/// X, produces a partition X = X+ sqcup X- with translations onto the parts:
/// the orbit closure of the leftover under t'_+ is rerouted through the
/// identity.
inline ParadoxicalDecomposition schroeder_bernstein(const PartialTranslation& tp,
                                                    const PartialTranslation& tm,
                                                    std::size_t budget = kDefaultOrbitBudget) {
  PointSet carrier = tp.domain();
  if (carrier != tm.domain()) fail(Errc::bad_input, "translations must share their domain");
  PointSet rp = tp.range(), rm = tm.range();
  if (!ps_disjoint(rp, rm)) fail(Errc::bad_input, "ranges are not disjoint");

  // leftover = X \ (ran+ u ran-); orbit closure under t'_+. An orbit point
  // outside the carrier means the construction cannot be completed at this
  // finite stage; that is reported, never guessed around.
  PointSet leftover = ps_difference(carrier, ps_union(rp, rm));
  PointSet closure = leftover;
  PointSet frontier = leftover;
  std::size_t steps = 0;
  while (!frontier.empty()) {
    PointSet next;
    for (PointId x : frontier) {
      if (++steps > budget) fail(Errc::budget_exhausted, "orbit iteration exceeded the budget");
      PointId y = tp.apply(x);
      if (!ps_contains(carrier, y))
        fail(Errc::carrier_escape,
             "orbit point " + tp.space().label(y) + " leaves the carrier");
      if (!ps_contains(closure, y)) next.push_back(y);
    }
    ps_normalize(next);
    closure = ps_union(closure, next);
    frontier = std::move(next);
  }

  PointSet x_plus = ps_union(rp, leftover);
  PointSet x_minus = rm;
  std::map<PointId, PointId> table;
  for (PointId x : carrier)
    table[x] = ps_contains(closure, x) ? x : tp.apply(x);
  PartialTranslation t_plus(tp.space(), std::move(table));
  return ParadoxicalDecomposition{std::move(x_plus), std::move(x_minus), std::move(t_plus), tm};
}

struct ParadoxCheck {
  bool ok = true;
  std::string witness; // first failed condition, human-readable
  PointSet checked;    // carrier points actually verified
  Rational margin;     // inner margin applied (0 on finite total carriers)
};

/// Checks a claimed paradoxical decomposition. On windows of infinite spaces
/// only the margin-shrunk inner window is checked (margin = max displacement),
/// since a finite window cannot witness behavior at its rim.
inline ParadoxCheck verify_paradoxical(const ExtendedMetricSpace& X, const PointSet& x_plus,
                                       const PointSet& x_minus, const PartialTranslation& tp,
                                       const PartialTranslation& tm,
                                       bool shrink_margin = false) {
  ParadoxCheck out;
  out.margin = 0;
  if (!ps_disjoint(x_plus, x_minus)) {
    out.ok = false;
    PointSet overlap = ps_intersection(x_plus, x_minus);
    out.witness = "parts overlap at " + X.label(overlap.front());
    return out;
  }
  PointSet carrier = ps_union(x_plus, x_minus);
  PointSet inner = carrier;
  if (shrink_margin) {
    ExtDistance m = tp.displacement();
    if (m < tm.displacement()) m = tm.displacement();
    if (m.is_finite() && m.value() > 0) {
      out.margin = m.value();
      inner = inner_margin_set(X, carrier, out.margin);
    }
  }
  out.checked = inner;
  auto check_map = [&](const PartialTranslation& t, const PointSet& part, const char* name) {
    for (PointId x : inner) {
      if (!t.defined_at(x)) {
        out.ok = false;
        out.witness = std::string(name) + " undefined at " + X.label(x);
        return;
      }
      PointId y = t.apply(x);
      if (!ps_contains(part, y)) {
        out.ok = false;
        out.witness = std::string(name) + " maps " + X.label(x) + " outside its part";
        return;
      }
    }
  };
  check_map(tp, x_plus, "t+");
  if (out.ok) check_map(tm, x_minus, "t-");
  // Injectivity is enforced by the PartialTranslation invariant; disjointness
  // of the images follows from the parts being disjoint.
  return out;
}

inline ParadoxCheck verify_paradoxical(const ParadoxicalDecomposition& d,
                                       bool shrink_margin = false) {
  return verify_paradoxical(d.t_plus.space(), d.x_plus, d.x_minus, d.t_plus, d.t_minus,
                            shrink_margin);
}

// ---------------------------------------------------------------------------
// Built-in first-letter decomposition of the rank-2 free group
// ---------------------------------------------------------------------------

/// The classical partition of the rank-2 free group restricted to a window:
/// X+ = words starting with a or a^{-1}, plus the identity; X- = words
/// starting with b or b^{-1}. t+ fixes the a^{-1}-words and the nonnegative
/// powers of a and prepends a elsewhere; t- fixes the b^{-1}-words and
/// prepends b elsewhere. Both displacements are 1.
inline ParadoxicalDecomposition free_group_first_letter_fixture(const ExtendedMetricSpace& F2,
                                                                long window_radius) {
  if (F2.kind() != "free_group") fail(Errc::bad_input, "fixture requires a free_group space");
  Window W = ball_window(F2, F2.root(), rat(window_radius));
  PointSet x_plus, x_minus;
  std::map<PointId, PointId> tp, tm;
  for (PointId x : W.members) {
    std::string w = F2.label(x);
    char first = w[0];
    bool pow_a = true; // nonnegative power of a (includes the identity "e")
    if (w != "e")
      for (char c : w)
        if (c != 'a') pow_a = false;
    if (w == "e" || first == 'a' || first == 'A') x_plus.push_back(x);
    else x_minus.push_back(x);

    // t+: fix A-words and nonnegative a-powers, prepend a elsewhere.
    if (first == 'A' || pow_a) tp[x] = x;
    else tp[x] = F2.point("a" + w);
    // t-: fix B-words, prepend b elsewhere.
    if (first == 'B') tm[x] = x;
    else tm[x] = F2.point(w == "e" ? "b" : "b" + w);
  }
  ps_normalize(x_plus);
  ps_normalize(x_minus);
  return ParadoxicalDecomposition{std::move(x_plus), std::move(x_minus),
                                  PartialTranslation(F2, std::move(tp)),
                                  PartialTranslation(F2, std::move(tm))};
}

} // namespace amen
