#pragma once

// Exact search for rainbow Hamilton cycles (Y) and rainbow perfect matchings
// (Z) in edge-coloured multigraphs.

#include "rainbow/colouring.hpp"
#include "rainbow/config_model.hpp"
#include "rainbow/errors.hpp"

#include <cstdint>
#include <vector>

namespace rainbow {

enum class SearchMode { count, exists };

struct SearchResult {
  std::uint64_t count = 0;
  bool exists = false;
  std::uint64_t nodes_expanded = 0;
};

namespace detail {

struct Arc {
  int edge;
  int to;
  int colour;  // 0-based
};

inline std::vector<std::vector<Arc>> arcs_without_loops(const Multigraph& mg, const EquitableColouring& col) {
  std::vector<std::vector<Arc>> adj(mg.n);
  for (std::size_t e = 0; e < mg.edge_count(); ++e) {
    const auto& edge = mg.edges[e];
    if (edge.is_loop()) continue;
    const int c = col.colour[e] - 1;
    adj[edge.u].push_back({static_cast<int>(e), edge.v, c});
    adj[edge.v].push_back({static_cast<int>(e), edge.u, c});
  }
  return adj;
}

/// Depth-first extension of a path from vertex 0. Every unoriented cycle is
/// produced once: its first edge must have a smaller id than its closing edge.
class HamiltonSearch {
public:
  HamiltonSearch(const Multigraph& mg, const EquitableColouring& col, SearchMode mode)
      : n_(mg.n), colours_(col.colours), mode_(mode), adj_(arcs_without_loops(mg, col)),
        edge_colour_(mg.edge_count()), visited_(mg.n, 0), colour_used_(col.colours, 0),
        stamp_(mg.n, 0), colour_seen_(col.colours, 0), queue_(mg.n) {
    for (std::size_t e = 0; e < mg.edge_count(); ++e) edge_colour_[e] = col.colour[e] - 1;
    ends_.reserve(mg.edge_count());
    for (const auto& e : mg.edges) ends_.emplace_back(e.u, e.v);
  }

  SearchResult run() {
    SearchResult r;
    if (n_ < 3) return r;
    visited_[0] = 1;
    extend(0, 1, -1, r);
    r.exists = r.count > 0;
    return r;
  }

private:
  bool done(const SearchResult& r) const { return mode_ == SearchMode::exists && r.count > 0; }

  // Edges usable by the remaining path v -> (unvisited) -> anchor.
  bool usable_end(int w, int v) const { return !visited_[w] || w == v || w == 0; }

  // Prunes branches that cannot be completed. Sound for exact counting.
  bool feasible(int v) {
    ++epoch_;
    // Every unused colour needs an edge whose endpoints are still reachable
    // and which does not join v to the anchor directly.
    int colours_left = 0;
    for (int c = 0; c < colours_; ++c) colours_left += !colour_used_[c];
    int colours_found = 0;
    for (std::size_t e = 0; e < ends_.size() && colours_found < colours_left; ++e) {
      const int c = edge_colour_[e];
      if (colour_used_[c] || colour_seen_[c] == epoch_) continue;
      auto [a, b] = ends_[e];
      if (a == b || !usable_end(a, v) || !usable_end(b, v)) continue;
      if (visited_[a] && visited_[b]) continue;
      colour_seen_[c] = epoch_;
      ++colours_found;
    }
    if (colours_found < colours_left) return false;

    // Unvisited vertices need two distinct usable neighbours and must form a
    // connected set touching both v and the anchor.
    int start = -1, unvisited = 0;
    for (int u = 0; u < n_; ++u) {
      if (visited_[u]) continue;
      ++unvisited;
      if (count_distinct_usable(u, v) < 2) return false;
      if (start < 0) start = u;
    }
    if (unvisited == 0) return true;
    bool touches_v = false, touches_anchor = false;
    int head = 0, tail = 0, reached = 0;
    queue_[tail++] = start;
    stamp_[start] = epoch_;
    while (head < tail) {
      const int u = queue_[head++];
      ++reached;
      for (const auto& a : adj_[u]) {
        if (colour_used_[a.colour]) continue;
        if (a.to == v) touches_v = true;
        if (a.to == 0) touches_anchor = true;
        if (visited_[a.to] || stamp_[a.to] == epoch_) continue;
        stamp_[a.to] = epoch_;
        queue_[tail++] = a.to;
      }
    }
    return reached == unvisited && touches_v && touches_anchor;
  }

  void extend(int v, int len, int first_edge, SearchResult& r) {
    ++r.nodes_expanded;
    if (len == n_) {
      for (const auto& a : adj_[v]) {
        if (a.to == 0 && !colour_used_[a.colour] && a.edge > first_edge) {
          ++r.count;
          if (done(r)) return;
        }
      }
      return;
    }
    if (!feasible(v)) return;
    // Away from the anchor, an unvisited neighbour of v with only two usable
    // neighbours must come next.
    int forced = -1;
    if (v != 0) {
      for (const auto& a : adj_[v]) {
        if (visited_[a.to] || colour_used_[a.colour] || a.to == forced) continue;
        if (count_distinct_usable(a.to, v) == 2) {
          if (forced >= 0) return;
          forced = a.to;
        }
      }
    }
    for (const auto& a : adj_[v]) {
      if (visited_[a.to] || colour_used_[a.colour]) continue;
      if (forced >= 0 && a.to != forced) continue;
      visited_[a.to] = 1;
      colour_used_[a.colour] = 1;
      extend(a.to, len + 1, first_edge < 0 ? a.edge : first_edge, r);
      visited_[a.to] = 0;
      colour_used_[a.colour] = 0;
      if (done(r)) return;
    }
  }

  int count_distinct_usable(int u, int v) const {
    int seen[3] = {-1, -1, -1};
    int k = 0;
    for (const auto& b : adj_[u]) {
      if (colour_used_[b.colour] || !usable_end(b.to, v)) continue;
      bool fresh = true;
      for (int i = 0; i < k; ++i) fresh &= seen[i] != b.to;
      if (fresh) {
        seen[k++] = b.to;
        if (k == 3) return 3;
      }
    }
    return k;
  }

  int n_;
  int colours_;
  SearchMode mode_;
  std::vector<std::vector<Arc>> adj_;
  std::vector<int> edge_colour_;
  std::vector<std::pair<int, int>> ends_;
  std::vector<char> visited_;
  std::vector<char> colour_used_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> colour_seen_;
  std::vector<int> queue_;
  std::uint32_t epoch_ = 0;
};

}  // namespace detail

/// Number of unoriented Hamilton cycles of mg using n distinct colours.
/// Parallel edges count separately; loops are never used.
inline SearchResult count_rainbow_hamilton(const Multigraph& mg, const EquitableColouring& col,
                                           SearchMode mode = SearchMode::count) {
  col.validate(mg.edge_count());
  if (mg.n >= 3 && col.colours != mg.n) throw ParameterError("rainbow Hamilton search needs n colours");
  return detail::HamiltonSearch(mg, col, mode).run();
}

/// Number of perfect matchings of g whose edges carry n distinct colours.
inline SearchResult count_rainbow_matching(const Multigraph& g, const EquitableColouring& col) {
  if (g.n % 2 != 0) throw ParameterError("perfect matchings need an even vertex count");
  col.validate(g.edge_count());
  if (col.colours * 2 != g.n) throw ParameterError("matching model needs n colours on 2n vertices");
  const auto adj = detail::arcs_without_loops(g, col);
  std::vector<char> covered(g.n, 0), used(col.colours, 0);
  SearchResult r;
  auto rec = [&](auto&& self, int lowest) -> void {
    ++r.nodes_expanded;
    while (lowest < g.n && covered[lowest]) ++lowest;
    if (lowest == g.n) {
      ++r.count;
      return;
    }
    covered[lowest] = 1;
    for (const auto& a : adj[lowest]) {
      if (covered[a.to] || used[a.colour]) continue;
      covered[a.to] = 1;
      used[a.colour] = 1;
      self(self, lowest + 1);
      covered[a.to] = 0;
      used[a.colour] = 0;
    }
    covered[lowest] = 0;
  };
  rec(rec, 0);
  r.exists = r.count > 0;
  return r;
}

}  // namespace rainbow
