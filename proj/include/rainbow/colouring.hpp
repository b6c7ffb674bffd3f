#pragma once

// Equitable edge colourings and the bipartite traffic-rule representation:
// every edge is subdivided by a vertex of its colour, same-coloured
// subdivision vertices are merged, and each merged vertex remembers which of
// its half-edges belong to the same original edge.

#include "rainbow/config_model.hpp"
#include "rainbow/errors.hpp"
#include "rainbow/rational.hpp"
#include "rainbow/rng.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rainbow {

struct EquitableColouring {
  int colours = 0;
  int q = 0;                // edges per colour
  std::vector<int> colour;  // edge id -> colour in 1..colours

  void validate(std::size_t edge_count) const {
    if (colour.size() != edge_count) throw ParameterError("colouring size does not match edge count");
    std::vector<int> tally(colours + 1, 0);
    for (int c : colour) {
      if (c < 1 || c > colours) throw ParameterError("colour out of range");
      ++tally[c];
    }
    for (int c = 1; c <= colours; ++c)
      if (tally[c] != q) throw ParameterError("colouring is not equitable");
  }

  friend bool operator==(const EquitableColouring&, const EquitableColouring&) = default;
};

inline void check_colouring_shape(const Multigraph& mg, int colours, int q) {
  if (colours < 1 || q < 1) throw ParameterError("need colours >= 1 and q >= 1");
  if (mg.edge_count() != static_cast<std::size_t>(colours) * q)
    throw ParameterError("edge count must equal colours * q");
}

/// (colours*q)! / (q!)^colours
inline BigInt colouring_count(int colours, int q) {
  return factorial(static_cast<std::int64_t>(colours) * q) / ipow(factorial(q), colours);
}

/// Uniform over equitable colourings: a uniform shuffle of the colour multiset.
inline EquitableColouring sample_colouring(const Multigraph& mg, int colours, int q, Stream& rng) {
  check_colouring_shape(mg, colours, q);
  EquitableColouring col{colours, q, {}};
  col.colour.reserve(mg.edge_count());
  for (int c = 1; c <= colours; ++c) col.colour.insert(col.colour.end(), q, c);
  shuffle(col.colour.begin(), col.colour.end(), rng);
  return col;
}

inline EquitableColouring sample_colouring(const Multigraph& mg, int colours, int q, std::uint64_t seed) {
  Stream rng(seed);
  return sample_colouring(mg, colours, q, rng);
}

inline constexpr long long kMaxEnumeratedColourings = 1'000'000;

/// All equitable colourings as multiset permutations in lexicographic order.
template <class Visitor>
void for_each_colouring(const Multigraph& mg, int colours, int q, Visitor&& visit) {
  check_colouring_shape(mg, colours, q);
  if (colouring_count(colours, q) > kMaxEnumeratedColourings)
    throw SizeError("too many colourings to enumerate");
  EquitableColouring col{colours, q, {}};
  for (int c = 1; c <= colours; ++c) col.colour.insert(col.colour.end(), q, c);
  do {
    visit(static_cast<const EquitableColouring&>(col));
  } while (std::next_permutation(col.colour.begin(), col.colour.end()));
}

struct BipartiteEdge {
  int plain = 0;
  int coloured = 0;       // 0-based colour vertex (colour - 1)
  HalfEdgeId half = 0;    // originating configuration half-edge at `plain`
  int source_edge = 0;    // multigraph edge this half comes from
};

/// Bipartite multigraph with n plain and n coloured vertices. Bipartite edges
/// 2e and 2e+1 are the two halves of multigraph edge e; `partner` pairs them
/// at their common coloured vertex.
struct TrafficBipartite {
  int n_plain = 0;
  int n_coloured = 0;
  int plain_degree = 0;
  std::vector<BipartiteEdge> edges;
  std::vector<int> partner;
  std::vector<std::vector<int>> at_plain;     // incident bipartite edge ids, ascending
  std::vector<std::vector<int>> at_coloured;  // incident bipartite edge ids, ascending

  bool obeys_traffic(int in_edge, int out_edge) const { return partner[in_edge] == out_edge; }
};

inline TrafficBipartite build_bipartite(const Multigraph& mg, const EquitableColouring& col) {
  col.validate(mg.edge_count());
  TrafficBipartite tb;
  tb.n_plain = mg.n;
  tb.n_coloured = col.colours;
  tb.plain_degree = mg.d;
  tb.edges.resize(2 * mg.edge_count());
  tb.partner.resize(2 * mg.edge_count());
  tb.at_plain.assign(mg.n, {});
  tb.at_coloured.assign(col.colours, {});
  for (std::size_t e = 0; e < mg.edge_count(); ++e) {
    const auto& edge = mg.edges[e];
    const int c = col.colour[e] - 1;
    const int a = static_cast<int>(2 * e), b = a + 1;
    tb.edges[a] = {edge.u, c, edge.hu, static_cast<int>(e)};
    tb.edges[b] = {edge.v, c, edge.hv, static_cast<int>(e)};
    tb.partner[a] = b;
    tb.partner[b] = a;
    tb.at_plain[edge.u].push_back(a);
    tb.at_plain[edge.v].push_back(b);
    tb.at_coloured[c].push_back(a);
    tb.at_coloured[c].push_back(b);
  }
  return tb;
}

/// Inverse of build_bipartite: merges partner halves back into edges.
inline std::pair<Multigraph, EquitableColouring> project_back(const TrafficBipartite& tb) {
  struct Row {
    Edge edge;
    int colour;
  };
  std::vector<Row> rows;
  for (int c = 0; c < tb.n_coloured; ++c) {
    for (int b : tb.at_coloured[c]) {
      const int p = tb.partner[b];
      if (p < b) continue;
      const auto& x = tb.edges[b];
      const auto& y = tb.edges[p];
      Edge e = x.half < y.half ? Edge{x.plain, y.plain, x.half, y.half} : Edge{y.plain, x.plain, y.half, x.half};
      rows.push_back({e, c + 1});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.edge.hu < b.edge.hu; });
  Multigraph mg;
  mg.n = tb.n_plain;
  mg.d = tb.plain_degree;
  EquitableColouring col;
  col.colours = tb.n_coloured;
  col.q = tb.n_coloured > 0 ? static_cast<int>(rows.size()) / tb.n_coloured : 0;
  for (const auto& r : rows) {
    mg.edges.push_back(r.edge);
    col.colour.push_back(r.colour);
  }
  return {std::move(mg), std::move(col)};
}

/// CSV "edge_id,colour" with a header row.
inline std::string colouring_csv(const EquitableColouring& col) {
  std::ostringstream os;
  os << "edge_id,colour\n";
  for (std::size_t e = 0; e < col.colour.size(); ++e) os << e << ',' << col.colour[e] << '\n';
  return os.str();
}

inline EquitableColouring parse_colouring_csv(const std::string& text, int colours, int q) {
  std::istringstream is(text);
  std::string line;
  EquitableColouring col{colours, q, {}};
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "edge_id,colour") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParameterError("malformed colouring row: " + line);
    const auto id = std::stoul(line.substr(0, comma));
    if (id != col.colour.size()) throw ParameterError("colouring rows must be in edge-id order");
    col.colour.push_back(std::stoi(line.substr(comma + 1)));
  }
  return col;
}

}  // namespace rainbow
