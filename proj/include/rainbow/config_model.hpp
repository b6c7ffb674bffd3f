#pragma once

// Configuration (pairing) model: n cells of d half-edges, a uniformly random
// perfect matching of the half-edges, and its projection to a d-regular
// multigraph.

#include "rainbow/errors.hpp"
#include "rainbow/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rainbow {

using HalfEdgeId = std::uint32_t;

struct DegreeSpec {
  int n = 0;  // cells (vertices)
  int d = 0;  // half-edges per cell

  int half_edges() const noexcept { return n * d; }

  void validate() const {
    if (n < 1 || d < 1) throw ParameterError("degree spec needs n >= 1 and d >= 1");
    if ((static_cast<long long>(n) * d) % 2 != 0) throw ParameterError("n*d must be even");
  }

  friend bool operator==(const DegreeSpec&, const DegreeSpec&) = default;
};

struct HalfEdge {
  int cell = 0;
  int slot = 0;
  friend auto operator<=>(const HalfEdge&, const HalfEdge&) = default;
};

inline HalfEdge locate(HalfEdgeId h, int d) {
  return {static_cast<int>(h) / d, static_cast<int>(h) % d};
}
inline HalfEdgeId half_edge_id(HalfEdge he, int d) {
  return static_cast<HalfEdgeId>(he.cell * d + he.slot);
}

/// Fixed-point-free involution on the n*d half-edges.
class Pairing {
public:
  Pairing() = default;

  /// Takes ownership of a partner table; throws unless it is a fixed-point-free
  /// involution of the right size.
  Pairing(DegreeSpec spec, std::vector<HalfEdgeId> partner) : spec_(spec), partner_(std::move(partner)) {
    spec_.validate();
    if (partner_.size() != static_cast<std::size_t>(spec_.half_edges()))
      throw ParameterError("partner table has wrong size");
    for (HalfEdgeId h = 0; h < partner_.size(); ++h) {
      const HalfEdgeId p = partner_[h];
      if (p >= partner_.size() || p == h || partner_[p] != h)
        throw ParameterError("partner table is not a fixed-point-free involution");
    }
  }

  const DegreeSpec& spec() const noexcept { return spec_; }
  HalfEdgeId partner(HalfEdgeId h) const { return partner_[h]; }
  std::span<const HalfEdgeId> partners() const noexcept { return partner_; }
  std::size_t size() const noexcept { return partner_.size(); }

  /// Pairs (a, b) with a < b, in increasing order of a.
  std::vector<std::pair<HalfEdgeId, HalfEdgeId>> pairs() const {
    std::vector<std::pair<HalfEdgeId, HalfEdgeId>> out;
    out.reserve(partner_.size() / 2);
    for (HalfEdgeId h = 0; h < partner_.size(); ++h)
      if (partner_[h] > h) out.emplace_back(h, partner_[h]);
    return out;
  }

  friend bool operator==(const Pairing&, const Pairing&) = default;

private:
  DegreeSpec spec_;
  std::vector<HalfEdgeId> partner_;
};

/// Sequential matching: the lowest unmatched half-edge is joined to a uniformly
/// chosen other unmatched half-edge. Every pairing has probability 1/(nd-1)!!.
inline Pairing sample_pairing(DegreeSpec spec, Stream& rng) {
  spec.validate();
  const auto total = static_cast<HalfEdgeId>(spec.half_edges());
  std::vector<HalfEdgeId> partner(total, 0);
  // pool holds unmatched half-edges; where[h] is h's index in pool.
  std::vector<HalfEdgeId> pool(total), where(total);
  for (HalfEdgeId h = 0; h < total; ++h) pool[h] = where[h] = h;
  std::size_t live = total;
  auto remove = [&](HalfEdgeId h) {
    const HalfEdgeId last = pool[live - 1];
    pool[where[h]] = last;
    where[last] = where[h];
    --live;
  };
  for (HalfEdgeId h = 0; h < total; ++h) {
    if (where[h] >= live || pool[where[h]] != h) continue;  // already matched
    remove(h);
    const HalfEdgeId other = pool[rng.below(live)];
    remove(other);
    partner[h] = other;
    partner[other] = h;
  }
  return Pairing(spec, std::move(partner));
}

inline Pairing sample_pairing(DegreeSpec spec, std::uint64_t seed) {
  Stream rng(seed);
  return sample_pairing(spec, rng);
}

inline constexpr int kMaxEnumeratedHalfEdges = 16;

/// (m-1)!! for even m: the number of pairings of m points.
inline std::uint64_t pairing_count(int half_edges) {
  std::uint64_t r = 1;
  for (int k = half_edges - 1; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

/// Calls visit(const Pairing&) once for every pairing, in lexicographic order of
/// the partner chosen for the lowest unmatched half-edge.
template <class Visitor>
void for_each_pairing(DegreeSpec spec, Visitor&& visit) {
  spec.validate();
  const int total = spec.half_edges();
  if (total > kMaxEnumeratedHalfEdges)
    throw SizeError("exhaustive pairing enumeration limited to n*d <= 16");
  std::vector<HalfEdgeId> partner(total, 0);
  std::vector<char> used(total, 0);
  std::function<void(int)> rec = [&](int first) {
    while (first < total && used[first]) ++first;
    if (first == total) {
      visit(Pairing(spec, partner));
      return;
    }
    used[first] = 1;
    for (int other = first + 1; other < total; ++other) {
      if (used[other]) continue;
      used[other] = 1;
      partner[first] = static_cast<HalfEdgeId>(other);
      partner[other] = static_cast<HalfEdgeId>(first);
      rec(first + 1);
      used[other] = 0;
    }
    used[first] = 0;
  };
  rec(0);
}

/// An edge remembers the two half-edges it came from; hu < hv, hu lies at u.
struct Edge {
  int u = 0;
  int v = 0;
  HalfEdgeId hu = 0;
  HalfEdgeId hv = 0;

  bool is_loop() const noexcept { return u == v; }
  int other(int w) const noexcept { return w == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Multigraph with stable edge ids (indices into `edges`). Loops and parallel
/// edges are allowed. `d` is the common degree, or 0 for a non-regular graph
/// built by hand.
struct Multigraph {
  int n = 0;
  int d = 0;
  std::vector<Edge> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }

  std::vector<int> degrees() const {
    std::vector<int> deg(n, 0);
    for (const auto& e : edges) {
      ++deg[e.u];
      ++deg[e.v];
    }
    return deg;
  }

  bool has_loop() const {
    return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.is_loop(); });
  }

  bool has_multi_edge() const {
    std::vector<std::pair<int, int>> ends;
    ends.reserve(edges.size());
    for (const auto& e : edges) ends.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    std::sort(ends.begin(), ends.end());
    return std::adjacent_find(ends.begin(), ends.end()) != ends.end();
  }

  /// No loops nor multiple edges.
  bool is_simple() const { return !has_loop() && !has_multi_edge(); }

  /// Builds a multigraph from vertex pairs, handing out half-edge slots in
  /// order of appearance. Slot ids use `slots_per_vertex` (at least the max
  /// degree).
  static Multigraph from_vertex_pairs(int n, std::span<const std::pair<int, int>> pairs, int slots_per_vertex) {
    Multigraph g;
    g.n = n;
    std::vector<int> next(n, 0);
    for (auto [a, b] : pairs) {
      if (a < 0 || b < 0 || a >= n || b >= n) throw ParameterError("vertex out of range");
      const auto ha = static_cast<HalfEdgeId>(a * slots_per_vertex + next[a]++);
      const auto hb = static_cast<HalfEdgeId>(b * slots_per_vertex + next[b]++);
      if (next[a] > slots_per_vertex || next[b] > slots_per_vertex)
        throw ParameterError("vertex degree exceeds slots_per_vertex");
      if (ha < hb) g.edges.push_back({a, b, ha, hb});
      else g.edges.push_back({b, a, hb, ha});
    }
    const auto deg = g.degrees();
    if (n > 0 && std::all_of(deg.begin(), deg.end(), [&](int x) { return x == deg[0]; })) g.d = deg[0];
    return g;
  }
};

/// One edge per pair, in increasing order of the pair's smaller half-edge.
inline Multigraph project_multigraph(const Pairing& p) {
  Multigraph g;
  g.n = p.spec().n;
  g.d = p.spec().d;
  g.edges.reserve(p.size() / 2);
  for (auto [a, b] : p.pairs()) {
    g.edges.push_back({static_cast<int>(a) / g.d, static_cast<int>(b) / g.d, a, b});
  }
  return g;
}

/// "cellA.slotA-cellB.slotB" per pair, sorted lexicographically by (cell, slot).
inline std::vector<std::string> serialize_pairing(const Pairing& p) {
  const int d = p.spec().d;
  std::vector<std::pair<HalfEdge, HalfEdge>> rows;
  for (auto [a, b] : p.pairs()) rows.emplace_back(locate(a, d), locate(b, d));
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& [a, b] : rows) {
    std::ostringstream os;
    os << a.cell << '.' << a.slot << '-' << b.cell << '.' << b.slot;
    out.push_back(os.str());
  }
  return out;
}

inline Pairing parse_pairing(DegreeSpec spec, std::span<const std::string> lines) {
  spec.validate();
  std::vector<HalfEdgeId> partner(spec.half_edges(), 0);
  std::vector<char> seen(spec.half_edges(), 0);
  for (const auto& line : lines) {
    int ca, sa, cb, sb;
    char dot1, dash, dot2;
    std::istringstream is(line);
    if (!(is >> ca >> dot1 >> sa >> dash >> cb >> dot2 >> sb) || dot1 != '.' || dash != '-' || dot2 != '.')
      throw ParameterError("malformed pairing line: " + line);
    if (ca < 0 || cb < 0 || ca >= spec.n || cb >= spec.n || sa < 0 || sb < 0 || sa >= spec.d || sb >= spec.d)
      throw ParameterError("half-edge out of range: " + line);
    const auto a = half_edge_id({ca, sa}, spec.d), b = half_edge_id({cb, sb}, spec.d);
    if (seen[a] || seen[b]) throw ParameterError("half-edge paired twice: " + line);
    seen[a] = seen[b] = 1;
    partner[a] = b;
    partner[b] = a;
  }
  return Pairing(spec, std::move(partner));
}

}  // namespace rainbow
