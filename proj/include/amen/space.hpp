#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "amen/errors.hpp"
#include "amen/ext_distance.hpp"

namespace amen {

using PointId = std::int64_t;

/// Sorted, duplicate-free set of point ids.
using PointSet = std::vector<PointId>;

inline void ps_normalize(PointSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}
inline bool ps_contains(const PointSet& s, PointId x) {
  return std::binary_search(s.begin(), s.end(), x);
}
inline PointSet ps_union(const PointSet& a, const PointSet& b) {
  PointSet r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
inline PointSet ps_difference(const PointSet& a, const PointSet& b) {
  PointSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
inline PointSet ps_intersection(const PointSet& a, const PointSet& b) {
  PointSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
inline bool ps_subset(const PointSet& a, const PointSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}
inline bool ps_disjoint(const PointSet& a, const PointSet& b) {
  PointSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r.empty();
}

namespace detail {

struct KeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return h;
  }
};

} // namespace detail

/// Backend of an extended metric space. Implementations are immutable after
/// construction (lazy builders memoize behind a mutex and serve identical
/// results regardless of query interleaving).
class SpaceImpl {
public:
  virtual ~SpaceImpl() = default;

  virtual std::string kind() const = 0;
  virtual ExtDistance dist(PointId x, PointId y) const = 0;
  /// Closed ball {y : d(x,y) <= R}, R finite, sorted by id.
  virtual PointSet ball(PointId x, const Rational& radius) const = 0;
  virtual bool contains(PointId x) const = 0;
  virtual std::string label(PointId x) const = 0;
  virtual PointId point_from_label(const std::string& s) const = 0;
  virtual PointId root() const { return 0; }

  /// Full point list for finite explicit spaces; nullopt for lazy ones
  /// (global enumeration of a lazy space is not part of the interface).
  virtual std::optional<PointSet> all_points() const { return std::nullopt; }
  bool is_finite() const { return all_points().has_value(); }

  /// Builder knowledge about the ambient coarse component of x.
  virtual std::optional<bool> component_is_finite(PointId x) const = 0;
  /// Enumeration of the component of x when the builder knows it is finite.
  virtual std::optional<PointSet> component_points(PointId x) const {
    (void)x;
    return std::nullopt;
  }

  std::size_t query_cap() const { return cap_; }

protected:
  explicit SpaceImpl(std::size_t cap) : cap_(cap) {}
  std::size_t cap_;
};

/// Value-semantics handle for a locally finite extended metric space.
class ExtendedMetricSpace {
public:
  ExtendedMetricSpace() = default;
  explicit ExtendedMetricSpace(std::shared_ptr<const SpaceImpl> impl) : impl_(std::move(impl)) {}

  const SpaceImpl& impl() const { return *impl_; }
  std::shared_ptr<const SpaceImpl> impl_ptr() const { return impl_; }
  bool valid() const { return impl_ != nullptr; }

  std::string kind() const { return impl_->kind(); }
  ExtDistance dist(PointId x, PointId y) const { return impl_->dist(x, y); }
  PointSet ball(PointId x, const Rational& radius) const {
    if (radius < 0) fail(Errc::bad_input, "ball radius must be nonnegative");
    return impl_->ball(x, radius);
  }
  bool contains(PointId x) const { return impl_->contains(x); }
  std::string label(PointId x) const { return impl_->label(x); }
  PointId point(const std::string& lbl) const { return impl_->point_from_label(lbl); }
  PointId root() const { return impl_->root(); }
  bool is_finite() const { return impl_->is_finite(); }
  std::optional<PointSet> all_points() const { return impl_->all_points(); }
  std::optional<bool> component_is_finite(PointId x) const {
    return impl_->component_is_finite(x);
  }
  std::optional<PointSet> component_points(PointId x) const {
    return impl_->component_points(x);
  }

  friend bool operator==(const ExtendedMetricSpace& a, const ExtendedMetricSpace& b) {
    return a.impl_ == b.impl_;
  }

private:
  std::shared_ptr<const SpaceImpl> impl_;
};

/// Finite stage for computations on (possibly infinite) spaces.
struct Window {
  ExtendedMetricSpace ambient;
  PointSet members; // sorted

  bool contains(PointId x) const { return ps_contains(members, x); }
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

// ---------------------------------------------------------------------------
// Finite explicit spaces
// ---------------------------------------------------------------------------

namespace detail {

class FiniteSpaceBase : public SpaceImpl {
public:
  FiniteSpaceBase(std::vector<std::vector<ExtDistance>> m, std::vector<std::string> labels,
                  std::size_t cap)
      : SpaceImpl(cap), m_(std::move(m)), labels_(std::move(labels)) {
    const std::size_t n = m_.size();
    if (labels_.empty()) {
      labels_.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels_.push_back("p" + std::to_string(i));
    }
    if (labels_.size() != n) fail(Errc::bad_input, "label count does not match point count");
    validate();
  }

  ExtDistance dist(PointId x, PointId y) const override {
    check(x);
    check(y);
    return m_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  }

  PointSet ball(PointId x, const Rational& radius) const override {
    check(x);
    ExtDistance r{radius};
    PointSet out;
    for (std::size_t y = 0; y < m_.size(); ++y)
      if (m_[static_cast<std::size_t>(x)][y] <= r) out.push_back(static_cast<PointId>(y));
    return out;
  }

  bool contains(PointId x) const override {
    return x >= 0 && static_cast<std::size_t>(x) < m_.size();
  }

  std::string label(PointId x) const override {
    check(x);
    return labels_[static_cast<std::size_t>(x)];
  }

  PointId point_from_label(const std::string& s) const override {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == s) return static_cast<PointId>(i);
    fail(Errc::bad_input, "unknown point label '" + s + "'");
  }

  std::optional<PointSet> all_points() const override {
    PointSet all(m_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<PointId>(i);
    return all;
  }

  std::optional<bool> component_is_finite(PointId) const override { return true; }

  std::optional<PointSet> component_points(PointId x) const override {
    check(x);
    PointSet out;
    for (std::size_t y = 0; y < m_.size(); ++y)
      if (m_[static_cast<std::size_t>(x)][y].is_finite()) out.push_back(static_cast<PointId>(y));
    return out;
  }

  const std::vector<std::vector<ExtDistance>>& matrix() const { return m_; }

private:
  void check(PointId x) const {
    if (!contains(x)) fail(Errc::bad_input, "point id out of range");
  }

  void validate() const {
    const std::size_t n = m_.size();
    for (const auto& row : m_)
      if (row.size() != n) fail(Errc::invalid_metric, "distance matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m_[i][i] == ExtDistance(0)))
        fail(Errc::invalid_metric, "d(x,x) != 0 at point " + std::to_string(i));
      for (std::size_t j = 0; j < n; ++j) {
        if (!(m_[i][j] == m_[j][i]))
          fail(Errc::invalid_metric,
               "asymmetry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        if (i != j && m_[i][j] == ExtDistance(0))
          fail(Errc::invalid_metric,
               "distinct points at distance 0: (" + std::to_string(i) + "," + std::to_string(j) +
                   ")");
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (m_[i][k] > m_[i][j] + m_[j][k])
            fail(Errc::invalid_metric, "triangle inequality fails on triple (" +
                                           std::to_string(i) + "," + std::to_string(j) + "," +
                                           std::to_string(k) + ")");
  }

  std::vector<std::vector<ExtDistance>> m_;
  std::vector<std::string> labels_;
};

class MatrixSpace final : public FiniteSpaceBase {
public:
  using FiniteSpaceBase::FiniteSpaceBase;
  std::string kind() const override { return "matrix"; }
};

class GraphSpace final : public FiniteSpaceBase {
public:
  GraphSpace(std::size_t n, std::vector<std::pair<PointId, PointId>> edges, std::size_t cap)
      : FiniteSpaceBase(bfs_matrix(n, edges), {}, cap), n_(n), edges_(std::move(edges)) {}

  std::string kind() const override { return "graph"; }
  std::size_t vertex_count() const { return n_; }
  const std::vector<std::pair<PointId, PointId>>& edges() const { return edges_; }

private:
  static std::vector<std::vector<ExtDistance>> bfs_matrix(
      std::size_t n, const std::vector<std::pair<PointId, PointId>>& edges) {
    std::vector<std::vector<PointId>> adj(n);
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
        fail(Errc::bad_input, "edge endpoint out of range");
      if (u == v) continue;
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
    std::vector<std::vector<ExtDistance>> m(n,
                                            std::vector<ExtDistance>(n, ExtDistance::infinity()));
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<long> d(n, -1);
      std::deque<std::size_t> q{s};
      d[s] = 0;
      while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        for (auto v : adj[u])
          if (d[static_cast<std::size_t>(v)] < 0) {
            d[static_cast<std::size_t>(v)] = d[u] + 1;
            q.push_back(static_cast<std::size_t>(v));
          }
      }
      for (std::size_t t = 0; t < n; ++t)
        if (d[t] >= 0) m[s][t] = ExtDistance(rat(d[t]));
    }
    return m;
  }

  std::size_t n_;
  std::vector<std::pair<PointId, PointId>> edges_;
};

// ---------------------------------------------------------------------------
// Lazy graph-metric spaces with canonical BFS id assignment
// ---------------------------------------------------------------------------

/// Ids are assigned in the order of a breadth-first enumeration from a fixed
/// root with a deterministic neighbor order, so they are reproducible across
/// runs and query interleavings.
class LazyCayleySpace : public SpaceImpl {
public:
  using Key = std::vector<std::int32_t>;

  ExtDistance dist(PointId x, PointId y) const override {
    std::lock_guard<std::mutex> lock(mu_);
    return key_dist(key_of(x), key_of(y));
  }

  PointSet ball(PointId x, const Rational& radius) const override {
    const long r = static_cast<long>(rational_floor_ul(radius));
    std::lock_guard<std::mutex> lock(mu_);
    Key start = key_of(x);
    ensure_radius(key_depth(start) + r);
    // Local BFS in the already-enumerated region.
    std::unordered_map<PointId, long> seen;
    std::deque<PointId> q{x};
    seen[x] = 0;
    PointSet out{x};
    while (!q.empty()) {
      PointId u = q.front();
      q.pop_front();
      long du = seen[u];
      if (du == r) continue;
      for (const Key& nk : neighbor_keys(key_of(u))) {
        auto it = index_.find(nk);
        if (it == index_.end()) fail(Errc::non_locally_finite, "enumeration cap breached");
        PointId v = it->second;
        if (seen.emplace(v, du + 1).second) {
          q.push_back(v);
          out.push_back(v);
          if (out.size() > cap_) fail(Errc::non_locally_finite, "ball exceeds query cap");
        }
      }
    }
    ps_normalize(out);
    return out;
  }

  bool contains(PointId x) const override {
    std::lock_guard<std::mutex> lock(mu_);
    return x >= 0 && static_cast<std::size_t>(x) < keys_.size();
  }

  std::string label(PointId x) const override {
    std::lock_guard<std::mutex> lock(mu_);
    return key_label(key_of(x));
  }

  PointId point_from_label(const std::string& s) const override {
    Key k = key_from_label(s);
    std::lock_guard<std::mutex> lock(mu_);
    ensure_radius(key_depth(k));
    auto it = index_.find(k);
    if (it == index_.end()) fail(Errc::bad_input, "label '" + s + "' is not a point");
    return it->second;
  }

  std::optional<bool> component_is_finite(PointId) const override { return false; }

protected:
  explicit LazyCayleySpace(std::size_t cap) : SpaceImpl(cap) {}

  /// Subclass contract: canonical roots (one per coarse component, enumerated
  /// in component order), deterministic neighbor order, exact distance and
  /// exact depth (= distance to the component root).
  virtual std::vector<Key> root_keys() const = 0;
  virtual std::vector<Key> neighbor_keys(const Key& k) const = 0;
  virtual long key_depth(const Key& k) const = 0;
  virtual ExtDistance key_dist(const Key& a, const Key& b) const = 0;
  virtual std::string key_label(const Key& k) const = 0;
  virtual Key key_from_label(const std::string& s) const = 0;

  /// Must be called once by the subclass constructor.
  void init_enumeration() {
    for (const Key& r : root_keys()) {
      index_.emplace(r, static_cast<PointId>(keys_.size()));
      keys_.push_back(r);
      queue_.push_back(r);
    }
    enumerated_depth_ = 0;
  }

  const Key& key_of(PointId x) const {
    if (x < 0 || static_cast<std::size_t>(x) >= keys_.size())
      fail(Errc::bad_input, "point id not materialized");
    return keys_[static_cast<std::size_t>(x)];
  }

  /// Extends the canonical enumeration until every vertex of depth <= r has an
  /// id. Caller holds the lock.
  void ensure_radius(long r) const {
    while (enumerated_depth_ < r) {
      // One full BFS layer per pass keeps the id order canonical.
      std::deque<Key> next;
      for (const Key& k : queue_) {
        for (const Key& nk : neighbor_keys(k)) {
          if (index_.find(nk) != index_.end()) continue;
          index_.emplace(nk, static_cast<PointId>(keys_.size()));
          keys_.push_back(nk);
          if (keys_.size() > cap_)
            fail(Errc::non_locally_finite, "enumeration exceeds query cap");
          next.push_back(nk);
        }
      }
      queue_ = std::move(next);
      ++enumerated_depth_;
      if (queue_.empty()) break;
    }
  }

  mutable std::mutex mu_;
  mutable std::unordered_map<Key, PointId, KeyHash> index_;
  mutable std::vector<Key> keys_;
  mutable std::deque<Key> queue_;
  mutable long enumerated_depth_ = -1;
};

class GridSpace final : public LazyCayleySpace {
public:
  GridSpace(int dim, std::size_t cap) : LazyCayleySpace(cap), dim_(dim) {
    if (dim < 1 || dim > 8) fail(Errc::bad_input, "grid dimension must be in 1..8");
    init_enumeration();
  }

  std::string kind() const override { return "grid"; }
  int dimension() const { return dim_; }

protected:
  std::vector<Key> root_keys() const override { return {Key(static_cast<std::size_t>(dim_), 0)}; }

  std::vector<Key> neighbor_keys(const Key& k) const override {
    std::vector<Key> out;
    out.reserve(2 * static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      Key a = k;
      a[static_cast<std::size_t>(i)] += 1;
      out.push_back(std::move(a));
      Key b = k;
      b[static_cast<std::size_t>(i)] -= 1;
      out.push_back(std::move(b));
    }
    return out;
  }

  long key_depth(const Key& k) const override {
    long s = 0;
    for (auto c : k) s += std::abs(static_cast<long>(c));
    return s;
  }

  ExtDistance key_dist(const Key& a, const Key& b) const override {
    long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      s += std::abs(static_cast<long>(a[i]) - static_cast<long>(b[i]));
    return ExtDistance(rat(s));
  }

  std::string key_label(const Key& k) const override {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(k[i]);
    }
    return s + ")";
  }

  Key key_from_label(const std::string& s) const override {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
      fail(Errc::bad_input, "bad grid point label '" + s + "'");
    Key k;
    std::string body = s.substr(1, s.size() - 2);
    std::size_t pos = 0;
    while (pos <= body.size()) {
      auto next = body.find(',', pos);
      std::string tok = body.substr(pos, next == std::string::npos ? next : next - pos);
      k.push_back(static_cast<std::int32_t>(std::stol(tok)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (k.size() != static_cast<std::size_t>(dim_))
      fail(Errc::bad_input, "grid label arity mismatch in '" + s + "'");
    return k;
  }

private:
  int dim_;
};

/// Reduced words over generators 1..rank; -g denotes the inverse of g.
class FreeGroupSpace final : public LazyCayleySpace {
public:
  FreeGroupSpace(int rank, std::size_t cap) : LazyCayleySpace(cap), rank_(rank) {
    if (rank < 1 || rank > 26) fail(Errc::bad_input, "free group rank must be in 1..26");
    init_enumeration();
  }

  std::string kind() const override { return "free_group"; }
  int rank() const { return rank_; }

protected:
  std::vector<Key> root_keys() const override { return {Key{}}; }

  std::vector<Key> neighbor_keys(const Key& k) const override {
    std::vector<Key> out;
    out.reserve(2 * static_cast<std::size_t>(rank_));
    for (int g = 1; g <= rank_; ++g) {
      out.push_back(append(k, g));
      out.push_back(append(k, -g));
    }
    return out;
  }

  long key_depth(const Key& k) const override { return static_cast<long>(k.size()); }

  ExtDistance key_dist(const Key& a, const Key& b) const override {
    // |a^{-1} b| = |a| + |b| - 2 * (longest common prefix).
    std::size_t p = 0;
    while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
    return ExtDistance(rat(static_cast<long>(a.size() + b.size() - 2 * p)));
  }

  std::string key_label(const Key& k) const override {
    if (k.empty()) return "e";
    std::string s;
    for (auto g : k)
      s += g > 0 ? static_cast<char>('a' + g - 1) : static_cast<char>('A' - g - 1);
    return s;
  }

  Key key_from_label(const std::string& s) const override {
    if (s == "e") return {};
    Key k;
    for (char c : s) {
      int g = 0;
      if (c >= 'a' && c < 'a' + rank_) g = c - 'a' + 1;
      else if (c >= 'A' && c < 'A' + rank_) g = -(c - 'A' + 1);
      else fail(Errc::bad_input, "bad free-group letter in '" + s + "'");
      if (!k.empty() && k.back() == -g)
        fail(Errc::bad_input, "label '" + s + "' is not a reduced word");
      k.push_back(static_cast<std::int32_t>(g));
    }
    return k;
  }

private:
  static Key append(const Key& k, int g) {
    Key out = k;
    if (!out.empty() && out.back() == -g) out.pop_back();
    else out.push_back(static_cast<std::int32_t>(g));
    return out;
  }

  int rank_;
};

/// Family of rank-2 free-group Cayley graphs, the i-th one with a pendant
/// trunk of trunks[i] extra vertices attached at the identity. Components are
/// at mutually infinite distance.
///
/// Key encoding: [i, 0, letters...] is a group word in component i;
/// [i, 1, k] is trunk vertex k (k = 1..n_i, vertex n_i adjacent to the
/// identity).
class TrunkedFreeGroupSpace final : public LazyCayleySpace {
public:
  TrunkedFreeGroupSpace(std::vector<int> trunks, std::size_t cap)
      : LazyCayleySpace(cap), trunks_(std::move(trunks)) {
    if (trunks_.empty()) fail(Errc::bad_input, "at least one component required");
    for (int n : trunks_)
      if (n < 1) fail(Errc::bad_input, "trunk lengths must be positive");
    init_enumeration();
  }

  std::string kind() const override { return "trunked_free_group"; }
  const std::vector<int>& trunks() const { return trunks_; }

protected:
  std::vector<Key> root_keys() const override {
    std::vector<Key> roots;
    for (std::size_t i = 0; i < trunks_.size(); ++i)
      roots.push_back(Key{static_cast<std::int32_t>(i), 0});
    return roots;
  }

  std::vector<Key> neighbor_keys(const Key& k) const override {
    const std::int32_t comp = k[0];
    const int n = trunks_[static_cast<std::size_t>(comp)];
    std::vector<Key> out;
    if (k[1] == 0) {
      // Group word: the four generator moves, then the trunk entry at e.
      for (int g : {1, -1, 2, -2}) {
        Key w = k;
        if (w.size() > 2 && w.back() == -g) w.pop_back();
        else w.push_back(static_cast<std::int32_t>(g));
        out.push_back(std::move(w));
      }
      if (k.size() == 2) out.push_back(Key{comp, 1, static_cast<std::int32_t>(n)});
    } else {
      const std::int32_t pos = k[2];
      if (pos == n) out.push_back(Key{comp, 0});
      else out.push_back(Key{comp, 1, pos + 1});
      if (pos > 1) out.push_back(Key{comp, 1, pos - 1});
    }
    return out;
  }

  long key_depth(const Key& k) const override {
    if (k[1] == 0) return static_cast<long>(k.size() - 2);
    return trunks_[static_cast<std::size_t>(k[0])] - k[2] + 1;
  }

  ExtDistance key_dist(const Key& a, const Key& b) const override {
    if (a[0] != b[0]) return ExtDistance::infinity();
    if (a[1] == 1 && b[1] == 1) return ExtDistance(rat(std::abs(a[2] - b[2])));
    if (a[1] == 0 && b[1] == 0) {
      std::size_t p = 2;
      while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
      return ExtDistance(rat(static_cast<long>(a.size() + b.size() - 2 * p)));
    }
    const Key& t = a[1] == 1 ? a : b; // trunk vertex
    const Key& w = a[1] == 1 ? b : a; // group word
    return ExtDistance(rat(key_depth(t) + static_cast<long>(w.size() - 2)));
  }

  std::string key_label(const Key& k) const override {
    std::string s = "c" + std::to_string(k[0]) + ":";
    if (k[1] == 1) return s + "t" + std::to_string(k[2]);
    if (k.size() == 2) return s + "e";
    for (std::size_t i = 2; i < k.size(); ++i) {
      int g = k[i];
      s += g > 0 ? static_cast<char>('a' + g - 1) : static_cast<char>('A' - g - 1);
    }
    return s;
  }

  Key key_from_label(const std::string& s) const override {
    auto colon = s.find(':');
    if (s.empty() || s[0] != 'c' || colon == std::string::npos)
      fail(Errc::bad_input, "bad component label '" + s + "'");
    int comp = std::stoi(s.substr(1, colon - 1));
    if (comp < 0 || static_cast<std::size_t>(comp) >= trunks_.size())
      fail(Errc::bad_input, "component index out of range in '" + s + "'");
    std::string rest = s.substr(colon + 1);
    Key k{static_cast<std::int32_t>(comp), 0};
    if (!rest.empty() && rest[0] == 't') {
      int pos = std::stoi(rest.substr(1));
      if (pos < 1 || pos > trunks_[static_cast<std::size_t>(comp)])
        fail(Errc::bad_input, "trunk position out of range in '" + s + "'");
      return Key{static_cast<std::int32_t>(comp), 1, static_cast<std::int32_t>(pos)};
    }
    if (rest == "e") return k;
    for (char c : rest) {
      int g = 0;
      if (c == 'a' || c == 'b') g = c - 'a' + 1;
      else if (c == 'A' || c == 'B') g = -(c - 'A' + 1);
      else fail(Errc::bad_input, "bad letter in '" + s + "'");
      if (k.size() > 2 && k.back() == -g)
        fail(Errc::bad_input, "label '" + s + "' is not a reduced word");
      k.push_back(static_cast<std::int32_t>(g));
    }
    return k;
  }

private:
  std::vector<int> trunks_;
};

/// Disjoint union with pairwise infinite distance. Global id of local id n in
/// part p is n * parts + p, which stays deterministic for lazily generated
/// parts of unbounded size.
class DisjointUnionSpace final : public SpaceImpl {
public:
  DisjointUnionSpace(std::vector<ExtendedMetricSpace> parts, std::size_t cap)
      : SpaceImpl(cap), parts_(std::move(parts)) {
    if (parts_.empty()) fail(Errc::bad_input, "disjoint union of zero parts");
  }

  std::string kind() const override { return "disjoint_union"; }
  const std::vector<ExtendedMetricSpace>& parts() const { return parts_; }

  ExtDistance dist(PointId x, PointId y) const override {
    auto [px, lx] = split(x);
    auto [py, ly] = split(y);
    if (px != py) return ExtDistance::infinity();
    return parts_[px].dist(lx, ly);
  }

  PointSet ball(PointId x, const Rational& radius) const override {
    auto [p, l] = split(x);
    PointSet local = parts_[p].ball(l, radius);
    PointSet out;
    out.reserve(local.size());
    for (PointId q : local) out.push_back(join(p, q));
    ps_normalize(out);
    return out;
  }

  bool contains(PointId x) const override {
    if (x < 0) return false;
    auto [p, l] = split(x);
    return parts_[p].contains(l);
  }

  std::string label(PointId x) const override {
    auto [p, l] = split(x);
    return std::to_string(p) + "/" + parts_[p].label(l);
  }

  PointId point_from_label(const std::string& s) const override {
    auto slash = s.find('/');
    if (slash == std::string::npos) fail(Errc::bad_input, "bad union label '" + s + "'");
    std::size_t p = static_cast<std::size_t>(std::stoul(s.substr(0, slash)));
    if (p >= parts_.size()) fail(Errc::bad_input, "part index out of range in '" + s + "'");
    return join(p, parts_[p].point(s.substr(slash + 1)));
  }

  std::optional<PointSet> all_points() const override {
    PointSet all;
    for (std::size_t p = 0; p < parts_.size(); ++p) {
      auto sub = parts_[p].all_points();
      if (!sub) return std::nullopt;
      for (PointId l : *sub) all.push_back(join(p, l));
    }
    ps_normalize(all);
    return all;
  }

  std::optional<bool> component_is_finite(PointId x) const override {
    auto [p, l] = split(x);
    return parts_[p].component_is_finite(l);
  }

  std::optional<PointSet> component_points(PointId x) const override {
    auto [p, l] = split(x);
    auto sub = parts_[p].component_points(l);
    if (!sub) return std::nullopt;
    PointSet out;
    for (PointId q : *sub) out.push_back(join(p, q));
    ps_normalize(out);
    return out;
  }

private:
  std::pair<std::size_t, PointId> split(PointId x) const {
    auto n = static_cast<PointId>(parts_.size());
    return {static_cast<std::size_t>(x % n), x / n};
  }
  PointId join(std::size_t part, PointId local) const {
    return local * static_cast<PointId>(parts_.size()) + static_cast<PointId>(part);
  }

  std::vector<ExtendedMetricSpace> parts_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDefaultQueryCap = 1'000'000;

inline ExtendedMetricSpace from_matrix(std::vector<std::vector<ExtDistance>> m,
                                       std::vector<std::string> labels = {},
                                       std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(
      std::make_shared<detail::MatrixSpace>(std::move(m), std::move(labels), cap));
}

inline ExtendedMetricSpace from_graph(std::size_t n,
                                      std::vector<std::pair<PointId, PointId>> edges,
                                      std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(std::make_shared<detail::GraphSpace>(n, std::move(edges), cap));
}

inline ExtendedMetricSpace grid(int dim, std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(std::make_shared<detail::GridSpace>(dim, cap));
}

inline ExtendedMetricSpace free_group(int rank, std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(std::make_shared<detail::FreeGroupSpace>(rank, cap));
}

inline ExtendedMetricSpace trunked_free_group(std::vector<int> trunks,
                                              std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(
      std::make_shared<detail::TrunkedFreeGroupSpace>(std::move(trunks), cap));
}

inline ExtendedMetricSpace disjoint_union(std::vector<ExtendedMetricSpace> parts,
                                          std::size_t cap = kDefaultQueryCap) {
  return ExtendedMetricSpace(
      std::make_shared<detail::DisjointUnionSpace>(std::move(parts), cap));
}

// ---------------------------------------------------------------------------
// Boundary calculus
// ---------------------------------------------------------------------------

inline ExtDistance dist_to_set(const ExtendedMetricSpace& X, PointId x, const PointSet& A) {
  ExtDistance best = ExtDistance::infinity(); // d(x, {}) = infinity
  for (PointId a : A) {
    ExtDistance d = X.dist(x, a);
    if (d < best) best = d;
  }
  return best;
}

inline PointSet ball(const ExtendedMetricSpace& X, PointId x, const Rational& radius) {
  return X.ball(x, radius);
}

/// N^+_R A = {x : d(x,A) <= R}; contains A.
inline PointSet neighborhood(const ExtendedMetricSpace& X, const PointSet& A, const Rational& R) {
  PointSet out = A;
  for (PointId a : A)
    for (PointId y : X.ball(a, R)) out.push_back(y);
  ps_normalize(out);
  return out;
}

/// Outer R-boundary: points outside A within distance R of A.
inline PointSet outer_boundary(const ExtendedMetricSpace& X, const PointSet& A,
                               const Rational& R) {
  return ps_difference(neighborhood(X, A, R), A);
}

/// Inner R-boundary: points of A within distance R of the complement.
inline PointSet inner_boundary(const ExtendedMetricSpace& X, const PointSet& A,
                               const Rational& R) {
  PointSet out;
  for (PointId a : A) {
    PointSet b = X.ball(a, R);
    if (!ps_subset(b, A)) out.push_back(a);
  }
  ps_normalize(out);
  return out;
}

/// R-boundary as the disjoint union of the outer and inner boundaries.
inline PointSet boundary(const ExtendedMetricSpace& X, const PointSet& A, const Rational& R) {
  return ps_union(outer_boundary(X, A, R), inner_boundary(X, A, R));
}

/// Partition of the window by the finite-distance equivalence. Parts are
/// ordered by their smallest member.
inline std::vector<PointSet> coarse_components(const Window& W) {
  std::vector<PointSet> parts;
  std::vector<PointId> rep; // representative per part
  for (PointId x : W.members) {
    bool placed = false;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (W.ambient.dist(x, rep[i]).is_finite()) {
        parts[i].push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) {
      parts.push_back({x});
      rep.push_back(x);
    }
  }
  return parts;
}

/// Window consisting of the ball of the given radius around a center point.
inline Window ball_window(const ExtendedMetricSpace& X, PointId center, const Rational& radius) {
  return Window{X, X.ball(center, radius)};
}

/// Inner sub-window at the given margin: members farther than `margin` from
/// the complement of the window.
inline PointSet inner_margin_set(const ExtendedMetricSpace& X, const PointSet& W,
                                 const Rational& margin) {
  return ps_difference(W, inner_boundary(X, W, margin));
}

} // namespace amen
