#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "amen/space.hpp"

namespace amen {

/// Witness that F is an (R,epsilon)-Folner set: |boundary_R(F)| / |F| <= epsilon.
struct FolnerCertificate {
  PointSet set;
  Rational radius;
  Rational epsilon;
  Rational ratio; // exact |d_R F| / |F|
  std::string strategy;
};

inline Rational folner_ratio(const ExtendedMetricSpace& X, const PointSet& F,
                             const Rational& R) {
  if (F.empty()) fail(Errc::empty_set, "Folner ratio of the empty set");
  Rational q(static_cast<long>(boundary(X, F, R).size()), static_cast<long>(F.size()));
  q.canonicalize();
  return q;
}

/// Recomputes the stored ratio from scratch.
inline bool reverify_certificate(const ExtendedMetricSpace& X, const FolnerCertificate& c) {
  return !c.set.empty() && folner_ratio(X, c.set, c.radius) == c.ratio && c.ratio <= c.epsilon;
}

enum class FolnerStrategy { exhaustive, greedy, balls };

inline const char* strategy_name(FolnerStrategy s) {
  switch (s) {
    case FolnerStrategy::exhaustive: return "exhaustive";
    case FolnerStrategy::greedy: return "greedy";
    case FolnerStrategy::balls: return "balls";
  }
  return "?";
}

inline FolnerStrategy strategy_from_name(const std::string& s) {
  if (s == "exhaustive") return FolnerStrategy::exhaustive;
  if (s == "greedy") return FolnerStrategy::greedy;
  if (s == "balls") return FolnerStrategy::balls;
  fail(Errc::bad_input, "unknown strategy '" + s + "'");
}

inline constexpr std::size_t kExhaustiveLimit = 20;

namespace detail {

// Bit matrix machinery shared by the exhaustive subset scans.
struct SubsetScan {
  const Window& W;
  Rational R;
  std::vector<PointId> pts;        // window members, ascending
  PointSet P;                      // all points relevant to boundaries
  std::size_t words;               // 64-bit words per P-mask
  std::vector<std::vector<std::uint64_t>> ball_p;  // per member: ball as P-mask
  std::vector<std::uint32_t> near_w;               // per P-point: members within R
  std::vector<std::size_t> member_pidx;            // member index -> index in P

  SubsetScan(const Window& w, const Rational& r) : W(w), R(r), pts(w.members) {
    P = pts;
    std::vector<PointSet> balls;
    balls.reserve(pts.size());
    for (PointId x : pts) {
      balls.push_back(W.ambient.ball(x, R));
      P = ps_union(P, balls.back());
    }
    words = (P.size() + 63) / 64;
    auto pidx = [&](PointId y) {
      return static_cast<std::size_t>(
          std::lower_bound(P.begin(), P.end(), y) - P.begin());
    };
    ball_p.assign(pts.size(), std::vector<std::uint64_t>(words, 0));
    near_w.assign(P.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (PointId y : balls[i]) {
        std::size_t j = pidx(y);
        ball_p[i][j / 64] |= 1ull << (j % 64);
        near_w[j] |= 1u << i;
      }
    }
    member_pidx.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) member_pidx[i] = pidx(pts[i]);
  }

  // |boundary_R(F)| for the subset encoded by mask (over window members).
  long boundary_count(std::uint32_t mask) const {
    std::vector<std::uint64_t> fp(words, 0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (mask >> i & 1) fp[member_pidx[i] / 64] |= 1ull << (member_pidx[i] % 64);
    long inner = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t w = 0; w < words; ++w)
        if (ball_p[i][w] & ~fp[w]) {
          ++inner;
          break;
        }
    }
    long outer = 0;
    for (std::size_t j = 0; j < P.size(); ++j) {
      bool in_f = fp[j / 64] >> (j % 64) & 1;
      if (!in_f && (near_w[j] & mask)) ++outer;
    }
    return inner + outer;
  }

  // |N^+_R(F)| for the subset encoded by mask.
  long neighborhood_count(std::uint32_t mask) const {
    std::vector<std::uint64_t> acc(words, 0);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (mask >> i & 1)
        for (std::size_t w = 0; w < words; ++w) acc[w] |= ball_p[i][w];
    long n = 0;
    for (std::size_t w = 0; w < words; ++w) n += std::popcount(acc[w]);
    return n;
  }
};

inline std::optional<FolnerCertificate> find_folner_exhaustive(
    const Window& W, const Rational& R, const Rational& eps, std::optional<long> size_floor,
    std::size_t limit) {
  if (W.size() > limit || W.size() > 25)
    fail(Errc::limit_exceeded, "window of " + std::to_string(W.size()) +
                                   " points exceeds the exhaustive limit of " +
                                   std::to_string(std::min<std::size_t>(limit, 25)));
  SubsetScan scan(W, R);
  const std::size_t n = W.size();
  long best_num = 0, best_den = 0; // ratio as fraction, den 0 = none yet
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    long sz = std::popcount(mask);
    if (size_floor && sz < *size_floor) continue;
    long b = scan.boundary_count(mask);
    // b/sz < best_num/best_den, ties by smaller size then smaller mask
    bool better = best_den == 0 || b * best_den < best_num * sz ||
                  (b * best_den == best_num * sz &&
                   (sz < std::popcount(best_mask) ||
                    (sz == std::popcount(best_mask) && mask < best_mask)));
    if (better) {
      best_num = b;
      best_den = sz;
      best_mask = mask;
    }
  }
  if (best_den == 0) return std::nullopt;
  Rational ratio(best_num, best_den);
  ratio.canonicalize();
  if (ratio > eps) return std::nullopt; // proof of absence within the window
  PointSet F;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1) F.push_back(scan.pts[i]);
  return FolnerCertificate{F, R, eps, ratio, "exhaustive"};
}

inline std::optional<FolnerCertificate> find_folner_greedy(const Window& W, const Rational& R,
                                                           const Rational& eps,
                                                           std::optional<long> size_floor) {
  const ExtendedMetricSpace& X = W.ambient;
  PointSet F = ps_intersection(X.ball(W.members.front(), R), W.members);
  if (F.empty()) F = {W.members.front()};

  auto admissible = [&](const PointSet& S, const Rational& ratio) {
    return ratio <= eps && (!size_floor || static_cast<long>(S.size()) >= *size_floor);
  };

  Rational ratio = folner_ratio(X, F, R);
  std::optional<FolnerCertificate> found;
  if (admissible(F, ratio)) found = FolnerCertificate{F, R, eps, ratio, "greedy"};
  Rational best = ratio;
  std::size_t stale = 0;
  const std::size_t stale_limit = 2 * W.size();

  while (F.size() < W.size() && stale < stale_limit) {
    PointSet candidates = ps_intersection(outer_boundary(X, F, R), W.members);
    if (candidates.empty()) break;
    PointId pick = -1;
    Rational pick_ratio;
    for (PointId y : candidates) { // ascending id: ties go to the smallest id
      PointSet G = ps_union(F, PointSet{y});
      Rational q = folner_ratio(X, G, R);
      if (pick < 0 || q < pick_ratio) {
        pick = y;
        pick_ratio = q;
      }
    }
    F = ps_union(F, PointSet{pick});
    ratio = pick_ratio;
    if (admissible(F, ratio) && (!found || ratio < found->ratio ||
                                 (ratio == found->ratio && F.size() < found->set.size())))
      found = FolnerCertificate{F, R, eps, ratio, "greedy"};
    if (ratio < best) {
      best = ratio;
      stale = 0;
    } else {
      ++stale;
    }
  }
  return found;
}

inline std::optional<FolnerCertificate> find_folner_balls(const Window& W, const Rational& R,
                                                          const Rational& eps,
                                                          std::optional<long> size_floor) {
  const ExtendedMetricSpace& X = W.ambient;
  for (PointId c : W.members) {
    // Candidate radii: distinct attained distances for finite spaces, the
    // integers otherwise (all lazy builders carry graph metrics).
    std::vector<Rational> radii;
    if (auto all = X.all_points()) {
      for (PointId y : *all) {
        ExtDistance d = X.dist(c, y);
        if (d.is_finite()) radii.push_back(d.value());
      }
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    } else {
      for (long r = 0; r <= static_cast<long>(W.size()); ++r) radii.push_back(rat(r));
    }
    for (const Rational& r : radii) {
      PointSet B = X.ball(c, r);
      if (!ps_subset(B, W.members)) break; // only balls fully inside the window
      Rational ratio = folner_ratio(X, B, R);
      if (ratio <= eps && (!size_floor || static_cast<long>(B.size()) >= *size_floor))
        return FolnerCertificate{B, R, eps, ratio, "balls"};
    }
  }
  return std::nullopt;
}

} // namespace detail

/// Searches the window for an (R,epsilon)-Folner subset. `nullopt` from the
/// exhaustive strategy is a proof of absence within the window; from the
/// heuristics it is inconclusive.
inline std::optional<FolnerCertificate> find_folner(
    const Window& W, const Rational& R, const Rational& eps, FolnerStrategy strategy,
    std::optional<long> size_floor = std::nullopt, std::size_t exhaustive_limit = kExhaustiveLimit) {
  if (W.empty()) fail(Errc::empty_set, "empty window");
  switch (strategy) {
    case FolnerStrategy::exhaustive:
      return detail::find_folner_exhaustive(W, R, eps, size_floor, exhaustive_limit);
    case FolnerStrategy::greedy:
      return detail::find_folner_greedy(W, R, eps, size_floor);
    case FolnerStrategy::balls:
      return detail::find_folner_balls(W, R, eps, size_floor);
  }
  return std::nullopt;
}

/// Produces candidate Folner sets on demand: called with a radius, a ratio
/// bound and a minimum cardinality.
using FolnerSupplier =
    std::function<std::optional<PointSet>(const Rational& R, const Rational& eps,
                                          long min_size)>;

/// Supplier backed by find_folner on a fixed window.
inline FolnerSupplier window_supplier(Window W, FolnerStrategy strategy,
                                      std::size_t exhaustive_limit = kExhaustiveLimit) {
  return [W = std::move(W), strategy, exhaustive_limit](
             const Rational& R, const Rational& eps,
             long min_size) -> std::optional<PointSet> {
    auto cert = find_folner(W, R, eps, strategy, min_size, exhaustive_limit);
    if (!cert) return std::nullopt;
    return cert->set;
  };
}

/// Enlarges a Folner set to contain A: asks the supplier for an
/// (R, eps/2)-Folner set F with |F| >= 2 |d_R A| / eps and returns F union A.
inline FolnerCertificate enlarge_folner(const ExtendedMetricSpace& X, const PointSet& A,
                                        const Rational& R, const Rational& eps,
                                        const FolnerSupplier& supplier) {
  if (A.empty()) fail(Errc::empty_set, "cannot enlarge around the empty set");
  if (eps <= 0) fail(Errc::invalid_epsilon, "epsilon must be positive");
  const long bdry = static_cast<long>(boundary(X, A, R).size());
  Rational need = Rational(2 * bdry) / eps;
  // ceil(need)
  mpz_class q = need.get_num() / need.get_den();
  long min_size = static_cast<long>(q.get_si());
  if (Rational(q) < need) ++min_size;
  if (min_size < 1) min_size = 1;
  Rational half = eps / 2;

  auto F = supplier(R, half, min_size);
  if (!F) fail(Errc::supplier_exhausted, "no Folner set of size >= " + std::to_string(min_size));
  if (static_cast<long>(F->size()) < min_size || folner_ratio(X, *F, R) > half)
    fail(Errc::supplier_exhausted, "supplier returned a set violating the request");

  PointSet big = ps_union(*F, A);
  Rational ratio = folner_ratio(X, big, R);
  if (ratio > eps)
    fail(Errc::supplier_exhausted, "enlarged set misses the target ratio"); // unreachable
  return FolnerCertificate{big, R, eps, ratio, "enlarge"};
}

// ---------------------------------------------------------------------------
// Component-wise amenability reporting
// ---------------------------------------------------------------------------

struct ComponentFinding {
  PointSet window_part;
  bool ambient_finite = false; // builder knows the ambient component is finite
  std::optional<FolnerCertificate> certificate;
  bool absence_proved = false; // exhaustive scan of the part found nothing
  std::string note;
};

struct ComponentReport {
  Rational radius;
  Rational epsilon;
  std::vector<ComponentFinding> components;
  /// Finite components coexist with components where the search found nothing
  /// (the shape of an amenable-but-not-properly-amenable window).
  bool y1_y2_shape = false;
};

inline ComponentReport component_amenability_report(
    const Window& W, const Rational& R, const Rational& eps,
    std::size_t exhaustive_limit = kExhaustiveLimit) {
  ComponentReport report;
  report.radius = R;
  report.epsilon = eps;
  bool any_finite = false, any_missing = false;
  for (const PointSet& part : coarse_components(W)) {
    ComponentFinding f;
    f.window_part = part;
    const PointId rep = part.front();
    auto finite = W.ambient.component_is_finite(rep);
    auto comp_pts = W.ambient.component_points(rep);
    if (finite.value_or(false) && comp_pts) {
      f.ambient_finite = true;
      Rational ratio = folner_ratio(W.ambient, *comp_pts, R);
      f.certificate = FolnerCertificate{*comp_pts, R, eps, ratio, "finite-component"};
      f.note = "finite coarse component: whole component is an (R,0)-Folner witness";
      any_finite = true;
    } else {
      Window part_window{W.ambient, part};
      auto cert = find_folner(part_window, R, eps, FolnerStrategy::balls);
      if (!cert) cert = find_folner(part_window, R, eps, FolnerStrategy::greedy);
      if (cert) {
        f.certificate = cert;
        f.note = "heuristic Folner set found";
      } else if (part.size() <= exhaustive_limit) {
        auto exact = find_folner(part_window, R, eps, FolnerStrategy::exhaustive, std::nullopt,
                                 exhaustive_limit);
        if (exact) {
          f.certificate = exact;
          f.note = "exhaustive Folner set found";
        } else {
          f.absence_proved = true;
          f.note = "no Folner subset exists within this window part (exhaustive)";
          any_missing = true;
        }
      } else {
        f.note = "heuristics found nothing (inconclusive)";
        any_missing = true;
      }
    }
    report.components.push_back(std::move(f));
  }
  report.y1_y2_shape = any_finite && any_missing;
  return report;
}

} // namespace amen
