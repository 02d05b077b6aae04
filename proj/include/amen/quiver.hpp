#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "amen/errors.hpp"

namespace amen {

using VertexId = int;
using EdgeId = int;

struct Edge {
  EdgeId id;
  VertexId src;
  VertexId rng;
};

/// Declared infinite emitter: the vertex emits infinitely many edges beyond
/// the materialized ones, all landing inside `unmaterialized_into`.
struct InfiniteEmitter {
  VertexId vertex;
  std::vector<VertexId> unmaterialized_into;
};

/// Finite materialized quiver, optionally with infinite-emitter flags and a
/// declared infinite vertex set.
struct DirectedGraph {
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<InfiniteEmitter> infinite_emitters;
  bool infinite_vertices = false; // the vertex set extends beyond the materialized one

  bool has_vertex(VertexId v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
  }

  bool flagged(VertexId v) const {
    for (const auto& ie : infinite_emitters)
      if (ie.vertex == v) return true;
    return false;
  }

  const InfiniteEmitter* flag_of(VertexId v) const {
    for (const auto& ie : infinite_emitters)
      if (ie.vertex == v) return &ie;
    return nullptr;
  }

  std::vector<EdgeId> out_edges(VertexId v) const {
    std::vector<EdgeId> out;
    for (const auto& e : edges)
      if (e.src == v) out.push_back(e.id);
    return out;
  }

  const Edge& edge(EdgeId id) const {
    for (const auto& e : edges)
      if (e.id == id) return e;
    fail(Errc::bad_input, "unknown edge id " + std::to_string(id));
  }

  std::size_t out_degree(VertexId v) const {
    std::size_t n = 0;
    for (const auto& e : edges)
      if (e.src == v) ++n;
    return n;
  }

  bool is_sink(VertexId v) const { return !flagged(v) && out_degree(v) == 0; }

  /// Regular: finitely many outgoing edges and at least one. Flagged vertices
  /// are infinite emitters, hence never regular.
  bool is_regular(VertexId v) const { return !flagged(v) && out_degree(v) > 0; }

  void validate() const {
    std::set<VertexId> vs(vertices.begin(), vertices.end());
    if (vs.size() != vertices.size()) fail(Errc::bad_input, "duplicate vertex ids");
    std::set<EdgeId> es;
    for (const auto& e : edges) {
      if (!es.insert(e.id).second) fail(Errc::bad_input, "duplicate edge ids");
      if (!vs.count(e.src) || !vs.count(e.rng))
        fail(Errc::bad_input, "edge " + std::to_string(e.id) + " has unknown endpoints");
    }
    for (const auto& ie : infinite_emitters) {
      if (!vs.count(ie.vertex)) fail(Errc::bad_input, "flagged vertex is unknown");
      for (VertexId w : ie.unmaterialized_into)
        if (!vs.count(w)) fail(Errc::bad_input, "unmaterialized target is unknown");
    }
  }
};

// ---------------------------------------------------------------------------
// Strongly connected components and cycle classes
// ---------------------------------------------------------------------------

struct Condensation {
  std::vector<std::vector<VertexId>> components; // reverse topological order
  std::map<VertexId, int> component_of;
  std::vector<std::set<int>> dag; // edges between distinct components
  std::vector<bool> cyclic;       // component contains a cycle
};

inline Condensation scc_condensation(const DirectedGraph& g) {
  g.validate();
  // Iterative Tarjan.
  std::map<VertexId, int> index, low;
  std::map<VertexId, bool> on_stack;
  std::vector<VertexId> stack;
  Condensation out;
  int counter = 0;

  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto& e : g.edges) adj[e.src].push_back(e.rng);

  struct Frame {
    VertexId v;
    std::size_t next = 0;
  };
  for (VertexId start : g.vertices) {
    if (index.count(start)) continue;
    std::vector<Frame> call{{start}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto& ns = adj[f.v];
      if (f.next < ns.size()) {
        VertexId w = ns[f.next++];
        if (!index.count(w)) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<VertexId> comp;
          while (true) {
            VertexId w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          int ci = static_cast<int>(out.components.size());
          for (VertexId w : comp) out.component_of[w] = ci;
          out.components.push_back(std::move(comp));
        }
        VertexId v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }

  out.dag.assign(out.components.size(), {});
  out.cyclic.assign(out.components.size(), false);
  for (const auto& e : g.edges) {
    int a = out.component_of[e.src], b = out.component_of[e.rng];
    if (a != b) out.dag[a].insert(b);
    else out.cyclic[a] = true; // covers self-loops and larger cycles
  }
  return out;
}

/// One equivalence class of cycles under mutual reachability (= one cyclic
/// strongly connected component).
struct CycleClass {
  std::vector<EdgeId> representative; // edge sequence of one cycle
  std::vector<VertexId> vertex_set;   // vertices of the representative
  std::vector<VertexId> scc;          // the whole component
  bool exclusive = false;             // the component carries exactly one cycle
  bool maximal = false;               // no other cyclic component reaches it
};

namespace detail {

/// Finds a cycle through the edges of one cyclic SCC (deterministic: smallest
/// vertex, smallest edge ids first).
inline std::vector<EdgeId> find_cycle_in_scc(const DirectedGraph& g,
                                             const std::vector<VertexId>& comp) {
  std::set<VertexId> inside(comp.begin(), comp.end());
  VertexId base = comp.front();
  // DFS from base restricted to the component, looking for a return to base.
  std::vector<EdgeId> path;
  std::set<VertexId> visited;
  std::function<bool(VertexId)> dfs = [&](VertexId v) -> bool {
    for (EdgeId eid : g.out_edges(v)) {
      const Edge& e = g.edge(eid);
      if (!inside.count(e.rng)) continue;
      if (e.rng == base) {
        path.push_back(eid);
        return true;
      }
      if (visited.insert(e.rng).second) {
        path.push_back(eid);
        if (dfs(e.rng)) return true;
        path.pop_back();
      }
    }
    return false;
  };
  visited.insert(base);
  if (!dfs(base)) fail(Errc::bad_input, "component is not cyclic");
  return path;
}

inline std::vector<bool> reachable_from(const Condensation& c, int source) {
  std::vector<bool> seen(c.components.size(), false);
  std::vector<int> todo{source};
  seen[static_cast<std::size_t>(source)] = true;
  while (!todo.empty()) {
    int u = todo.back();
    todo.pop_back();
    for (int v : c.dag[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        todo.push_back(v);
      }
  }
  return seen;
}

} // namespace detail

/// Cycle classes with exclusivity and maximality per the reachability
/// preorder. Exclusive: the class's component has exactly as many internal
/// edges as the cycle has vertices. Maximal: no distinct cyclic component
/// reaches it.
inline std::vector<CycleClass> cycles_summary(const DirectedGraph& g) {
  Condensation c = scc_condensation(g);
  std::vector<CycleClass> out;
  // Reachability between components (transitive closure over the DAG).
  std::vector<std::vector<bool>> reach;
  reach.reserve(c.components.size());
  for (std::size_t i = 0; i < c.components.size(); ++i)
    reach.push_back(detail::reachable_from(c, static_cast<int>(i)));

  for (std::size_t i = 0; i < c.components.size(); ++i) {
    if (!c.cyclic[i]) continue;
    CycleClass cc;
    cc.scc = c.components[i];
    cc.representative = detail::find_cycle_in_scc(g, c.components[i]);
    for (EdgeId eid : cc.representative) cc.vertex_set.push_back(g.edge(eid).src);
    std::sort(cc.vertex_set.begin(), cc.vertex_set.end());
    long internal_edges = 0;
    std::set<VertexId> inside(c.components[i].begin(), c.components[i].end());
    for (const auto& e : g.edges)
      if (inside.count(e.src) && inside.count(e.rng)) ++internal_edges;
    cc.exclusive = internal_edges == static_cast<long>(cc.representative.size()) &&
                   cc.vertex_set.size() == c.components[i].size();
    cc.maximal = true;
    for (std::size_t j = 0; j < c.components.size(); ++j)
      if (j != i && c.cyclic[j] && reach[j][i]) cc.maximal = false;
    out.push_back(std::move(cc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hereditary saturated closures
// ---------------------------------------------------------------------------

/// Forward-reachable set T(X) (the hereditary closure).
inline std::vector<VertexId> tree(const DirectedGraph& g, const std::vector<VertexId>& x) {
  std::set<VertexId> seen(x.begin(), x.end());
  std::vector<VertexId> todo(x.begin(), x.end());
  while (!todo.empty()) {
    VertexId v = todo.back();
    todo.pop_back();
    for (const auto& e : g.edges)
      if (e.src == v && seen.insert(e.rng).second) todo.push_back(e.rng);
  }
  return {seen.begin(), seen.end()};
}

struct SaturationTrace {
  std::vector<VertexId> closure;
  std::vector<std::vector<VertexId>> increments; // vertices added per iteration
};

/// Hereditary saturated closure: T(X) followed by the saturation iteration
/// that adds regular vertices all of whose out-neighbors already lie inside.
/// Flagged vertices are never added (they are not regular).
inline SaturationTrace saturation_closure(const DirectedGraph& g,
                                          const std::vector<VertexId>& x) {
  SaturationTrace trace;
  std::set<VertexId> h;
  for (VertexId v : tree(g, x)) h.insert(v);
  trace.increments.push_back({h.begin(), h.end()});
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<VertexId> added;
    for (VertexId v : g.vertices) {
      if (h.count(v) || !g.is_regular(v)) continue;
      bool all_in = true;
      for (const auto& e : g.edges)
        if (e.src == v && !h.count(e.rng)) {
          all_in = false;
          break;
        }
      if (all_in) added.push_back(v);
    }
    if (!added.empty()) {
      grew = true;
      for (VertexId v : added) h.insert(v);
      trace.increments.push_back(added);
    }
  }
  trace.closure.assign(h.begin(), h.end());
  return trace;
}

inline bool is_hereditary_saturated(const DirectedGraph& g, const std::vector<VertexId>& h) {
  std::set<VertexId> hs(h.begin(), h.end());
  for (const auto& e : g.edges)
    if (hs.count(e.src) && !hs.count(e.rng)) return false;
  for (VertexId v : g.vertices) {
    if (hs.count(v) || !g.is_regular(v)) continue;
    bool all_in = true;
    for (const auto& e : g.edges)
      if (e.src == v && !hs.count(e.rng)) {
        all_in = false;
        break;
      }
    if (all_in) return false;
  }
  return true;
}

/// Breaking vertices of H: flagged infinite emitters outside H with finitely
/// many (at least one) materialized edges into the complement, whose
/// unmaterialized edges are declared to land inside H.
inline std::vector<VertexId> breaking_vertices(const DirectedGraph& g,
                                               const std::vector<VertexId>& h) {
  if (!is_hereditary_saturated(g, h))
    fail(Errc::validation_failed, "set is not hereditary saturated");
  std::set<VertexId> hs(h.begin(), h.end());
  std::vector<VertexId> out;
  for (const auto& ie : g.infinite_emitters) {
    if (hs.count(ie.vertex)) continue;
    bool declared_into_h = true;
    for (VertexId w : ie.unmaterialized_into)
      if (!hs.count(w)) {
        declared_into_h = false;
        break;
      }
    if (!declared_into_h) continue; // infinitely many edges into the complement
    long mat_out = 0;
    for (const auto& e : g.edges)
      if (e.src == ie.vertex && !hs.count(e.rng)) ++mat_out;
    if (mat_out >= 1) out.push_back(ie.vertex);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Quotient graph E/H: vertices outside H, edges with range outside H. Only
/// valid when H has no breaking vertices.
inline DirectedGraph quotient_graph(const DirectedGraph& g, const std::vector<VertexId>& h) {
  if (!breaking_vertices(g, h).empty())
    fail(Errc::breaking_vertices_present, "quotient requires an empty breaking-vertex set");
  std::set<VertexId> hs(h.begin(), h.end());
  DirectedGraph out;
  for (VertexId v : g.vertices)
    if (!hs.count(v)) out.vertices.push_back(v);
  for (const auto& e : g.edges)
    if (!hs.count(e.rng)) out.edges.push_back(e);
  for (const auto& ie : g.infinite_emitters) {
    if (hs.count(ie.vertex)) continue;
    std::vector<VertexId> into;
    for (VertexId w : ie.unmaterialized_into)
      if (!hs.count(w)) into.push_back(w);
    // A flag whose unmaterialized edges all land in H disappears in E/H.
    if (!into.empty()) out.infinite_emitters.push_back({ie.vertex, into});
  }
  out.infinite_vertices = g.infinite_vertices;
  return out;
}

// ---------------------------------------------------------------------------
// The amenability trichotomy classifier
// ---------------------------------------------------------------------------

enum class Verdict { A1, A2, A3 };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::A1: return "A1"; // not algebraically amenable
    case Verdict::A2: return "A2"; // amenable, not properly
    case Verdict::A3: return "A3"; // properly amenable
  }
  return "?";
}

struct Classification {
  Verdict verdict;
  std::vector<std::string> reasons; // matched condition tags
  std::vector<VertexId> closure;    // H = hereditary saturated closure of all cycles
  std::vector<std::string> notes;   // caveats for edge cases
  std::vector<std::string> witness_trace;
};

namespace detail {

/// Textual comparison trace for the properly-infinite direction: every vertex
/// compares below the chosen cycle-base idempotents by saturation induction.
inline std::vector<std::string> comparison_trace(const DirectedGraph& g,
                                                 const std::vector<VertexId>& bases,
                                                 const SaturationTrace& trace) {
  std::vector<std::string> out;
  std::string basestr;
  for (VertexId b : bases) basestr += (basestr.empty() ? "" : "+") + std::string("v") +
                                      std::to_string(b);
  out.push_back("p = " + basestr + " dominates every vertex (trace level):");
  for (std::size_t n = 0; n < trace.increments.size(); ++n) {
    for (VertexId v : trace.increments[n]) {
      if (n == 0) {
        out.push_back("  v" + std::to_string(v) + " reaches a maximal cycle, so v" +
                      std::to_string(v) + " <~ p");
      } else {
        std::string rhs;
        for (const auto& e : g.edges)
          if (e.src == v) rhs += (rhs.empty() ? "" : " + ") + std::string("e") +
                                 std::to_string(e.id) + " e" + std::to_string(e.id) + "*";
        out.push_back("  v" + std::to_string(v) + " = " + rhs +
                      " with all ranges already dominated, so v" + std::to_string(v) +
                      " <~ p");
      }
    }
  }
  return out;
}

} // namespace detail

/// Trichotomy for the Leavitt path algebra of a finite materialized graph
/// (with optional flags / declared-infinite vertex set):
///   A3  if the vertex set is declared infinite, or some flagged infinite
///       emitter lies outside H, or an exclusive maximal cycle exists, or the
///       graph is acyclic (finite dimensional);
///   A1  if all vertices lie in H and every maximal cycle is non-exclusive;
///   A2  otherwise (cycles exist, all maximal ones non-exclusive, and the
///       complement of H is nonempty with no flagged emitters).
/// The complement of H may contain sinks; they behave like the
/// finite-dimensional direct summand of the A2 case.
inline Classification classify(const DirectedGraph& g) {
  g.validate();
  if (g.vertices.empty()) fail(Errc::empty_graph, "the empty graph is not classified");

  Classification out;
  auto cycles = cycles_summary(g);
  std::vector<VertexId> cycle_vertices;
  {
    Condensation c = scc_condensation(g);
    for (std::size_t i = 0; i < c.components.size(); ++i)
      if (c.cyclic[i])
        cycle_vertices.insert(cycle_vertices.end(), c.components[i].begin(),
                              c.components[i].end());
  }
  SaturationTrace trace = saturation_closure(g, cycle_vertices);
  out.closure = trace.closure;
  std::set<VertexId> h(out.closure.begin(), out.closure.end());

  bool acyclic = cycles.empty();
  bool excl_max = false;
  for (const auto& cc : cycles)
    if (cc.exclusive && cc.maximal) excl_max = true;
  bool flagged_outside = false;
  for (const auto& ie : g.infinite_emitters)
    if (!h.count(ie.vertex)) flagged_outside = true;

  if (g.infinite_vertices || excl_max || flagged_outside || acyclic) {
    out.verdict = Verdict::A3;
    if (g.infinite_vertices) out.reasons.push_back("B3a");
    if (flagged_outside) out.reasons.push_back("B3b");
    if (excl_max) out.reasons.push_back("B3c");
    if (acyclic && !g.infinite_vertices) {
      out.reasons.push_back("finite-dimensional");
      out.notes.push_back("acyclic finite graph: the algebra is finite dimensional, hence "
                          "properly amenable without any Folner construction");
    }
    for (const auto& cc : cycles)
      if (cc.exclusive && cc.maximal) {
        std::string w = "exclusive maximal cycle at v" + std::to_string(cc.vertex_set.front()) +
                        " (edges";
        for (EdgeId e : cc.representative) w += " e" + std::to_string(e);
        out.witness_trace.push_back(w + ")");
        break;
      }
    return out;
  }

  // All maximal cycles are non-exclusive and no flags survive outside H.
  std::vector<VertexId> outside;
  for (VertexId v : g.vertices)
    if (!h.count(v)) outside.push_back(v);
  if (outside.empty()) {
    out.verdict = Verdict::A1;
    out.reasons.push_back("B1");
    std::vector<VertexId> bases;
    for (const auto& cc : cycles)
      if (cc.maximal) bases.push_back(cc.vertex_set.front());
    out.witness_trace = detail::comparison_trace(g, bases, trace);
    return out;
  }

  out.verdict = Verdict::A2;
  out.reasons.push_back("B2");
  bool sinks = false;
  for (VertexId v : outside)
    if (g.is_sink(v)) sinks = true;
  if (sinks)
    out.notes.push_back("complement of the cycle closure contains sinks; they contribute a "
                        "finite-dimensional direct summand");
  {
    std::string w = "vertices outside the cycle closure:";
    for (VertexId v : outside) w += " v" + std::to_string(v);
    out.witness_trace.push_back(w);
  }
  return out;
}

/// Two distinct simple closed paths based at a vertex of a non-exclusive
/// cycle, with their first divergence (two edges sharing a source).
struct VertexWitness {
  std::vector<EdgeId> path1;
  std::vector<EdgeId> path2;
  EdgeId diverge1;
  EdgeId diverge2;
};

inline VertexWitness properly_infinite_vertex_witness(const DirectedGraph& g, VertexId v) {
  // Enumerate closed paths based at v (base visited once, every edge used at
  // most twice, bounded length) in lexicographic edge order. Two such paths
  // exist exactly when v lies on a non-exclusive cycle.
  std::vector<std::vector<EdgeId>> found;
  std::vector<EdgeId> path;
  std::map<EdgeId, int> uses;
  const std::size_t max_len = 2 * g.edges.size() + 2;
  std::function<void(VertexId)> dfs = [&](VertexId u) {
    if (found.size() >= 2 || path.size() >= max_len) return;
    std::vector<EdgeId> outs = g.out_edges(u);
    std::sort(outs.begin(), outs.end());
    for (EdgeId eid : outs) {
      if (found.size() >= 2) return;
      if (uses[eid] >= 2) continue;
      const Edge& e = g.edge(eid);
      if (e.rng == v) {
        path.push_back(eid);
        found.push_back(path);
        path.pop_back();
        continue;
      }
      ++uses[eid];
      path.push_back(eid);
      dfs(e.rng);
      path.pop_back();
      --uses[eid];
    }
  };
  dfs(v);
  if (found.size() < 2)
    fail(Errc::not_non_exclusive,
         "vertex v" + std::to_string(v) + " does not lie on a non-exclusive cycle");
  VertexWitness w;
  w.path1 = found[0];
  w.path2 = found[1];
  std::size_t t = 0;
  while (t < w.path1.size() && t < w.path2.size() && w.path1[t] == w.path2[t]) ++t;
  w.diverge1 = w.path1[t];
  w.diverge2 = w.path2[t];
  return w;
}

} // namespace amen
