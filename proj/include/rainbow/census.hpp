#pragma once

// Short-cycle census X_ij on the traffic bipartite graph: the number of
// 2i-cycles that break the traffic rule at exactly j coloured vertices.

#include "rainbow/colouring.hpp"
#include "rainbow/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace rainbow {

inline constexpr int kMaxCensusLength = 12;

struct CensusTable {
  int i_max = 0;
  // counts[i][j] for 1 <= i <= i_max, 0 <= j <= i; row 0 unused.
  std::vector<std::vector<std::uint64_t>> counts;

  explicit CensusTable(int imax = 0) : i_max(imax), counts(imax + 1) {
    for (int i = 0; i <= imax; ++i) counts[i].assign(i + 1, 0);
  }

  std::uint64_t at(int i, int j) const { return counts.at(i).at(j); }
  std::uint64_t& at(int i, int j) { return counts.at(i).at(j); }

  std::uint64_t cycles_of_length(int i) const {
    std::uint64_t s = 0;
    for (auto c : counts.at(i)) s += c;
    return s;
  }

  CensusTable& operator+=(const CensusTable& other) {
    if (other.i_max != i_max) throw ParameterError("census tables of different size");
    for (int i = 1; i <= i_max; ++i)
      for (int j = 0; j <= i; ++j) counts[i][j] += other.counts[i][j];
    return *this;
  }

  friend bool operator==(const CensusTable&, const CensusTable&) = default;
};

/// CSV "i,j,count" with a header row.
inline std::string census_csv(const CensusTable& t) {
  std::ostringstream os;
  os << "i,j,count\n";
  for (int i = 1; i <= t.i_max; ++i)
    for (int j = 0; j <= i; ++j) os << i << ',' << j << ',' << t.counts[i][j] << '\n';
  return os.str();
}

namespace detail {

// A walk of `length` bipartite edges from a root plain vertex. Vertices are
// encoded as plain v -> v, coloured c -> n_plain + c.
struct HalfCycle {
  int end = 0;
  int first = 0;
  int last = 0;
  int violations = 0;
  std::array<int, kMaxCensusLength> interior{};
};

class CensusBuilder {
public:
  explicit CensusBuilder(const TrafficBipartite& tb)
      : tb_(tb), on_path_(tb.n_plain + tb.n_coloured, 0) {}

  // Each cycle is rooted at its smallest plain vertex and split at the
  // opposite vertex into two half-cycles of length i; the unordered pair of
  // halves identifies the unoriented cycle.
  void count_length(int i, std::vector<std::uint64_t>& row) {
    length_ = i;
    for (int root = 0; root < tb_.n_plain; ++root) {
      root_ = root;
      halves_.clear();
      on_path_[root] = 1;
      walk(root, false, -1, -1, 0, 0);
      on_path_[root] = 0;
      std::sort(halves_.begin(), halves_.end(), [](const HalfCycle& a, const HalfCycle& b) { return a.end < b.end; });
      const bool end_coloured = (i % 2) == 1;
      for (std::size_t lo = 0; lo < halves_.size();) {
        std::size_t hi = lo;
        while (hi < halves_.size() && halves_[hi].end == halves_[lo].end) ++hi;
        for (std::size_t a = lo; a < hi; ++a) {
          for (std::size_t b = a + 1; b < hi; ++b) {
            const auto& p = halves_[a];
            const auto& q = halves_[b];
            if (p.first == q.first || p.last == q.last) continue;
            if (!disjoint(p, q, i - 1)) continue;
            int j = p.violations + q.violations;
            if (end_coloured && !tb_.obeys_traffic(p.last, q.last)) ++j;
            ++row[j];
          }
        }
        lo = hi;
      }
    }
  }

private:
  static bool disjoint(const HalfCycle& p, const HalfCycle& q, int k) {
    for (int x = 0; x < k; ++x)
      for (int y = 0; y < k; ++y)
        if (p.interior[x] == q.interior[y]) return false;
    return true;
  }

  void walk(int vertex, bool coloured, int first, int in_edge, int depth, int violations) {
    if (depth == length_) {
      HalfCycle h;
      h.end = coloured ? tb_.n_plain + vertex : vertex;
      h.first = first;
      h.last = in_edge;
      h.violations = violations;
      std::copy(interior_.begin(), interior_.begin() + std::max(0, length_ - 1), h.interior.begin());
      halves_.push_back(h);
      return;
    }
    if (depth > 0) interior_[depth - 1] = coloured ? tb_.n_plain + vertex : vertex;
    const auto& incident = coloured ? tb_.at_coloured[vertex] : tb_.at_plain[vertex];
    for (int e : incident) {
      if (e == in_edge) continue;
      const auto& be = tb_.edges[e];
      const int next = coloured ? be.plain : be.coloured;
      const int code = coloured ? next : tb_.n_plain + next;
      if (coloured && next <= root_) continue;
      const bool closing = depth + 1 == length_;
      // The far end may be shared by both halves; only interior vertices are marked.
      if (on_path_[code]) continue;
      const int v = violations + ((coloured && depth > 0 && !tb_.obeys_traffic(in_edge, e)) ? 1 : 0);
      if (!closing) on_path_[code] = 1;
      walk(next, !coloured, first < 0 ? e : first, e, depth + 1, v);
      if (!closing) on_path_[code] = 0;
    }
  }

  const TrafficBipartite& tb_;
  std::vector<char> on_path_;
  std::vector<HalfCycle> halves_;
  std::array<int, kMaxCensusLength> interior_{};
  int length_ = 0;
  int root_ = 0;
};

}  // namespace detail

/// X_ij for 1 <= i <= i_max. Cycles use distinct vertices and distinct edges
/// and are counted once, unrooted and unoriented.
inline CensusTable census(const TrafficBipartite& tb, int i_max) {
  if (i_max < 1 || i_max > tb.n_plain) throw ParameterError("census needs 1 <= i_max <= n");
  if (i_max > kMaxCensusLength) throw ParameterError("census length limited to 12");
  CensusTable t(i_max);
  detail::CensusBuilder builder(tb);
  for (int i = 1; i <= i_max; ++i) builder.count_length(i, t.counts[i]);
  return t;
}

/// Direct multigraph-level counts for the two census columns with a simple
/// interpretation: X_i0 counts rainbow i-cycles, and X_i1 counts paths of
/// i+1 edges whose first and last edges share a colour that the rainbow
/// middle avoids. The X_i1 objects are counted including degenerate shapes
/// where an end vertex meets the path; `degenerate` isolates those.
struct CrossCheck {
  int i_max = 0;
  std::vector<std::uint64_t> rainbow_cycles;   // [i]
  std::vector<std::uint64_t> end_colour_all;   // [i] equals X_i1 exactly
  std::vector<std::uint64_t> same_end_paths;   // [i] proper paths only
  std::vector<std::uint64_t> degenerate;       // [i] end_colour_all - same_end_paths

  bool agrees_with(const CensusTable& t, int i) const {
    return t.at(i, 0) == rainbow_cycles[i] && t.at(i, 1) == same_end_paths[i];
  }
};

inline CrossCheck interpret_cross_check(const Multigraph& mg, const EquitableColouring& col, int i_max) {
  col.validate(mg.edge_count());
  if (i_max < 1 || i_max > mg.n) throw ParameterError("cross-check needs 1 <= i_max <= n");
  CrossCheck out;
  out.i_max = i_max;
  out.rainbow_cycles.assign(i_max + 1, 0);
  out.end_colour_all.assign(i_max + 1, 0);
  out.same_end_paths.assign(i_max + 1, 0);
  out.degenerate.assign(i_max + 1, 0);

  struct Inc {
    int edge;
    int to;
  };
  std::vector<std::vector<Inc>> inc(mg.n);  // one entry per half-edge at the vertex
  for (std::size_t e = 0; e < mg.edge_count(); ++e) {
    const auto& edge = mg.edges[e];
    inc[edge.u].push_back({static_cast<int>(e), edge.v});
    inc[edge.v].push_back({static_cast<int>(e), edge.u});
  }
  auto colour = [&](int e) { return col.colour[e]; };

  for (const auto& e : mg.edges)
    if (e.is_loop()) ++out.rainbow_cycles[1];

  std::vector<int> path;        // vertices
  std::vector<int> path_edges;  // edges
  std::vector<char> on_path(mg.n, 0), colour_used(col.colours + 1, 0);

  // Rainbow cycles of length >= 2, rooted at their smallest vertex; each is
  // found once per direction.
  std::vector<std::uint64_t> ordered_cycles(i_max + 1, 0);
  auto cycles = [&](auto&& self, int root, int v, int len) -> void {
    for (const auto& a : inc[v]) {
      if (a.to == v || colour_used[colour(a.edge)]) continue;
      if (!path_edges.empty() && a.edge == path_edges.back()) continue;
      if (a.to == root && len + 1 >= 2) {
        ++ordered_cycles[len + 1];
        continue;
      }
      if (a.to < root || on_path[a.to] || len + 1 >= i_max) continue;
      on_path[a.to] = 1;
      colour_used[colour(a.edge)] = 1;
      path_edges.push_back(a.edge);
      self(self, root, a.to, len + 1);
      path_edges.pop_back();
      colour_used[colour(a.edge)] = 0;
      on_path[a.to] = 0;
    }
  };
  for (int root = 0; root < mg.n; ++root) {
    on_path[root] = 1;
    cycles(cycles, root, root, 0);
    on_path[root] = 0;
  }
  for (int i = 2; i <= i_max; ++i) out.rainbow_cycles[i] = ordered_cycles[i] / 2;

  // Same-end-colour objects: an ordered rainbow middle path p_1..p_i plus one
  // half-edge at each end, from two different edges of a colour the middle
  // does not use.
  std::vector<std::uint64_t> all(i_max + 1, 0), proper(i_max + 1, 0);
  auto ends = [&](int i) {
    const int x = path.front(), y = path.back();
    for (const auto& ha : inc[x]) {
      const int c = colour(ha.edge);
      if (colour_used[c]) continue;
      for (const auto& hb : inc[y]) {
        if (hb.edge == ha.edge || colour(hb.edge) != c) continue;
        ++all[i];
        const int xa = ha.to, yb = hb.to;
        if (xa != yb && !on_path[xa] && !on_path[yb]) ++proper[i];
      }
    }
  };
  auto middles = [&](auto&& self, int v, int len) -> void {
    // len = edges in the middle so far; the object has i = len + 1 plain vertices.
    ends(len + 1);
    if (len + 1 >= i_max) return;
    for (const auto& a : inc[v]) {
      if (a.to == v || on_path[a.to] || colour_used[colour(a.edge)]) continue;
      on_path[a.to] = 1;
      colour_used[colour(a.edge)] = 1;
      path.push_back(a.to);
      self(self, a.to, len + 1);
      path.pop_back();
      colour_used[colour(a.edge)] = 0;
      on_path[a.to] = 0;
    }
  };
  for (int x = 0; x < mg.n; ++x) {
    on_path[x] = 1;
    path.assign(1, x);
    middles(middles, x, 0);
    on_path[x] = 0;
  }
  for (int i = 1; i <= i_max; ++i) {
    out.end_colour_all[i] = all[i] / 2;
    out.same_end_paths[i] = proper[i] / 2;
    out.degenerate[i] = (all[i] - proper[i]) / 2;
  }
  return out;
}

}  // namespace rainbow
