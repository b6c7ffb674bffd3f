#pragma once

// Reproducible Monte Carlo experiments over the three random models, the
// exhaustive ground-truth oracle, and a Poisson goodness-of-fit check.

#include "rainbow/census.hpp"
#include "rainbow/colouring.hpp"
#include "rainbow/config_model.hpp"
#include "rainbow/errors.hpp"
#include "rainbow/rational.hpp"
#include "rainbow/rng.hpp"
#include "rainbow/search.hpp"
#include "rainbow/theory.hpp"
#include "rainbow/variance.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace rainbow::mc {

enum class Model { hamilton, matching, planted };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::hamilton: return "hamilton";
    case Model::matching: return "matching";
    case Model::planted: return "planted";
  }
  return "?";
}

inline Model parse_model(const std::string& s) {
  if (s == "hamilton") return Model::hamilton;
  if (s == "matching") return Model::matching;
  if (s == "planted") return Model::planted;
  throw ParameterError("unknown model: " + s);
}

/// E[ Y^{with_y} * prod [X_ij]_{m} ] over the listed (i, j, m).
struct FactorialMoment {
  bool with_y = false;
  std::vector<std::tuple<int, int, int>> orders;

  int total_order() const {
    int s = 0;
    for (const auto& [i, j, m] : orders) s += m;
    return s;
  }

  std::string name() const {
    std::ostringstream os;
    bool first = true;
    if (with_y) {
      os << "Y";
      first = false;
    }
    for (const auto& [i, j, m] : orders) {
      if (!first) os << '*';
      os << "[X_" << i << '_' << j << "]_" << m;
      first = false;
    }
    return os.str();
  }
};

struct ExperimentPlan {
  Model model = Model::hamilton;
  int n = 3;
  int d = 4;
  long long trials = 10000;
  std::uint64_t seed = 0;
  int i_max = 4;
  bool hamilton_count = false;   // E Y
  bool hamilton_exists = false;  // P(Y > 0)
  bool census = true;            // E X_ij for i <= i_max
  bool matching_count = false;   // E Z
  std::vector<FactorialMoment> moments;
  int threads = 1;  // execution only; never part of the output

  void validate() const {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (threads < 1) throw ParameterError("threads must be >= 1");
    switch (model) {
      case Model::hamilton:
        if (d < 4 || d % 2) throw ParameterError("hamilton model needs even d >= 4");
        if (n < 3) throw ParameterError("hamilton model needs n >= 3");
        break;
      case Model::planted:
        if (d < 6 || d % 2) throw ParameterError("planted model needs even d >= 6");
        if (n < 3) throw ParameterError("planted model needs n >= 3");
        break;
      case Model::matching:
        if (n < 1 || d < 1) throw ParameterError("matching model needs n >= 1 and d >= 1");
        break;
    }
    const int vertices = model == Model::matching ? 2 * n : n;
    if (census && (i_max < 1 || i_max > std::min(vertices, kMaxCensusLength)))
      throw ParameterError("i_max out of range");
    if (matching_count && model != Model::matching) throw ParameterError("Z is defined for the matching model");
    if ((hamilton_count || hamilton_exists) && model == Model::matching)
      throw ParameterError("Y is defined for the Hamilton models");
    for (const auto& fm : moments) {
      if (fm.total_order() > 6) throw ParameterError("factorial moment orders must sum to <= 6");
      if (fm.with_y && model == Model::matching) throw ParameterError("Y is defined for the Hamilton models");
      for (const auto& [i, j, m] : fm.orders)
        if (m < 0 || i < 1 || j < 0 || j > i || i > i_max || !census)
          throw ParameterError("factorial moment index outside the census");
    }
  }
};

/// Mean and standard error (sample sd / sqrt(trials)).
struct Estimate {
  double mean = 0;
  double stderr_ = 0;
  long long trials = 0;
};

/// Welford accumulator with Chan's merge; merging in a fixed order gives
/// bit-identical results.
struct Accumulator {
  long long count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Accumulator& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }

  Estimate estimate() const {
    Estimate e;
    e.mean = mean;
    e.trials = count;
    e.stderr_ = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    return e;
  }
};

// ---------------------------------------------------------------------------
// Instances.

struct Instance {
  Multigraph graph;
  EquitableColouring colouring;
};

inline Instance sample_hamilton_instance(int n, int d, Stream& rng) {
  auto g = project_multigraph(sample_pairing(DegreeSpec{n, d}, rng));
  auto col = sample_colouring(g, n, d / 2, rng);
  return {std::move(g), std::move(col)};
}

/// 2n vertices of degree d, n colours on d edges each.
inline Instance sample_matching_instance(int n, int d, Stream& rng) {
  auto g = project_multigraph(sample_pairing(DegreeSpec{2 * n, d}, rng));
  auto col = sample_colouring(g, n, d, rng);
  return {std::move(g), std::move(col)};
}

/// A uniform rainbow Hamilton cycle on slots 0 and 1 of every cell, overlaid
/// with an independent coloured configuration on slots 2..d-1 that carries
/// q-1 edges of each colour.
inline Instance sample_planted_instance(int n, int d, Stream& rng) {
  if (d < 6 || d % 2) throw ParameterError("planted model needs even d >= 6");
  std::vector<int> order(n), colours(n);
  for (int v = 0; v < n; ++v) order[v] = v, colours[v] = v + 1;
  shuffle(order.begin(), order.end(), rng);
  shuffle(colours.begin(), colours.end(), rng);

  std::vector<HalfEdgeId> partner(static_cast<std::size_t>(n) * d);
  std::vector<int> pair_colour(partner.size(), 0);  // colour keyed by either half-edge
  for (int i = 0; i < n; ++i) {
    const auto a = half_edge_id({order[i], 1}, d);
    const auto b = half_edge_id({order[(i + 1) % n], 0}, d);
    partner[a] = b;
    partner[b] = a;
    pair_colour[a] = pair_colour[b] = colours[i];
  }
  const auto rest = project_multigraph(sample_pairing(DegreeSpec{n, d - 2}, rng));
  const auto rest_col = sample_colouring(rest, n, d / 2 - 1, rng);
  auto lift = [&](HalfEdgeId h) {
    const auto he = locate(h, d - 2);
    return half_edge_id({he.cell, he.slot + 2}, d);
  };
  for (std::size_t e = 0; e < rest.edge_count(); ++e) {
    const auto a = lift(rest.edges[e].hu), b = lift(rest.edges[e].hv);
    partner[a] = b;
    partner[b] = a;
    pair_colour[a] = pair_colour[b] = rest_col.colour[e];
  }
  Instance inst;
  inst.graph = project_multigraph(Pairing(DegreeSpec{n, d}, std::move(partner)));
  inst.colouring = {n, d / 2, {}};
  for (const auto& e : inst.graph.edges) inst.colouring.colour.push_back(pair_colour[e.hu]);
  return inst;
}

/// Structural invariant of a planted instance: degree d everywhere, and the
/// edges on slots 0/1 form a Hamilton cycle using every colour once.
inline bool planted_structure_ok(const Instance& inst) {
  const auto& g = inst.graph;
  const auto deg = g.degrees();
  if (std::any_of(deg.begin(), deg.end(), [&](int x) { return x != g.d; })) return false;
  std::vector<int> next(g.n, -1);
  std::vector<char> colour_seen(inst.colouring.colours + 1, 0);
  int cycle_edges = 0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto a = locate(g.edges[e].hu, g.d), b = locate(g.edges[e].hv, g.d);
    const bool ha = a.slot < 2, hb = b.slot < 2;
    if (ha != hb) return false;
    if (!ha) continue;
    ++cycle_edges;
    const int c = inst.colouring.colour[e];
    if (colour_seen[c]) return false;
    colour_seen[c] = 1;
    const auto& from = a.slot == 1 ? a : b;
    const auto& to = a.slot == 1 ? b : a;
    if (to.slot != 0 || next[from.cell] != -1) return false;
    next[from.cell] = to.cell;
  }
  if (cycle_edges != g.n) return false;
  int v = 0, steps = 0;
  do {
    v = next[v];
    ++steps;
  } while (v > 0 && steps <= g.n);
  return v == 0 && steps == g.n;
}

// ---------------------------------------------------------------------------
// Trials.

namespace detail {

inline double falling_double(std::uint64_t x, int m) {
  double r = 1;
  for (int i = 0; i < m; ++i) r *= static_cast<double>(x) - i;
  return r;
}

struct ChunkResult {
  std::map<std::string, Accumulator> stats;
  // census histograms: key "X_i_j" -> value -> frequency
  std::map<std::string, std::map<std::uint64_t, long long>> histograms;
  long long planted_failures = 0;

  void merge(const ChunkResult& o) {
    for (const auto& [k, a] : o.stats) stats[k].merge(a);
    for (const auto& [k, h] : o.histograms)
      for (const auto& [v, c] : h) histograms[k][v] += c;
    planted_failures += o.planted_failures;
  }
};

inline std::string census_key(int i, int j) {
  return "X_" + std::to_string(i) + "_" + std::to_string(j);
}

inline void run_one(const ExperimentPlan& plan, long long trial, ChunkResult& out) {
  Stream rng(plan.seed, static_cast<std::uint64_t>(trial));
  Instance inst;
  switch (plan.model) {
    case Model::hamilton: inst = sample_hamilton_instance(plan.n, plan.d, rng); break;
    case Model::matching: inst = sample_matching_instance(plan.n, plan.d, rng); break;
    case Model::planted:
      inst = sample_planted_instance(plan.n, plan.d, rng);
      if (!planted_structure_ok(inst)) ++out.planted_failures;
      break;
  }
  std::optional<std::uint64_t> y;
  if (plan.hamilton_count || std::any_of(plan.moments.begin(), plan.moments.end(), [](const auto& m) { return m.with_y; })) {
    y = count_rainbow_hamilton(inst.graph, inst.colouring, SearchMode::count).count;
  }
  if (plan.hamilton_count) out.stats["Y"].add(static_cast<double>(*y));
  if (plan.hamilton_exists) {
    const bool found = y ? *y > 0 : count_rainbow_hamilton(inst.graph, inst.colouring, SearchMode::exists).exists;
    out.stats["P(Y>0)"].add(found ? 1.0 : 0.0);
  }
  if (plan.matching_count) out.stats["Z"].add(static_cast<double>(count_rainbow_matching(inst.graph, inst.colouring).count));
  if (plan.census) {
    const auto table = census(build_bipartite(inst.graph, inst.colouring), plan.i_max);
    for (int i = 1; i <= plan.i_max; ++i)
      for (int j = 0; j <= i; ++j) {
        const auto key = census_key(i, j);
        out.stats[key].add(static_cast<double>(table.at(i, j)));
        ++out.histograms[key][table.at(i, j)];
      }
    for (const auto& fm : plan.moments) {
      double v = fm.with_y ? static_cast<double>(*y) : 1.0;
      for (const auto& [i, j, m] : fm.orders) v *= falling_double(table.at(i, j), m);
      out.stats[fm.name()].add(v);
    }
  } else {
    for (const auto& fm : plan.moments) out.stats[fm.name()].add(fm.with_y ? static_cast<double>(*y) : 1.0);
  }
}

}  // namespace detail

inline constexpr long long kChunkTrials = 256;

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<std::pair<std::string, Estimate>> estimates;  // in plan order
  std::map<std::string, std::map<std::uint64_t, long long>> histograms;
  long long planted_failures = 0;

  const Estimate& at(const std::string& stat) const {
    for (const auto& [k, e] : estimates)
      if (k == stat) return e;
    throw ParameterError("no such statistic: " + stat);
  }

  std::vector<std::uint64_t> samples(const std::string& stat) const {
    std::vector<std::uint64_t> out;
    for (const auto& [v, c] : histograms.at(stat)) out.insert(out.end(), static_cast<std::size_t>(c), v);
    return out;
  }
};

/// Trials are grouped in fixed chunks; each chunk accumulates its trials in
/// index order and chunks are merged pairwise in a fixed tree, so the result
/// does not depend on the number of threads.
inline ExperimentResult run_trials(const ExperimentPlan& plan) {
  plan.validate();
  const long long chunks = (plan.trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<detail::ChunkResult> results(static_cast<std::size_t>(chunks));
  std::atomic<long long> next{0};
  auto worker = [&] {
    for (long long c = next++; c < chunks; c = next++) {
      const long long lo = c * kChunkTrials, hi = std::min(plan.trials, lo + kChunkTrials);
      for (long long t = lo; t < hi; ++t) detail::run_one(plan, t, results[c]);
    }
  };
  const int workers = static_cast<int>(std::min<long long>(plan.threads, chunks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (long long width = 1; width < chunks; width *= 2)
    for (long long i = 0; i + width < chunks; i += 2 * width) results[i].merge(results[i + width]);

  ExperimentResult out;
  out.plan = plan;
  auto& merged = results.front();
  auto push = [&](const std::string& key) {
    if (merged.stats.count(key)) out.estimates.emplace_back(key, merged.stats.at(key).estimate());
  };
  push("Y");
  push("P(Y>0)");
  push("Z");
  if (plan.census)
    for (int i = 1; i <= plan.i_max; ++i)
      for (int j = 0; j <= i; ++j) push(detail::census_key(i, j));
  for (const auto& fm : plan.moments) push(fm.name());
  out.histograms = std::move(merged.histograms);
  out.planted_failures = merged.planted_failures;
  return out;
}

// ---------------------------------------------------------------------------
// Poisson goodness of fit.

struct PoissonReport {
  double lambda = 0;
  double expected_mean = 0;
  double mean = 0;
  double mean_gap = 0;       // |mean - expected_mean|
  double mean_tolerance = 0; // 3 sqrt(lambda / trials)
  double tv = 0;             // total variation vs Poisson(lambda)
  long long samples = 0;
  bool pass = false;
};

inline constexpr double kPoissonTvThreshold = 0.05;

/// Compares an empirical distribution with Poisson(lambda), truncated at
/// lambda + 10 sqrt(lambda) with both tails folded into the last cell. The
/// mean check targets `expected_mean` (lambda unless given).
inline PoissonReport poisson_gof(std::span<const std::uint64_t> samples, double lambda,
                                 std::optional<double> expected_mean = std::nullopt) {
  if (!(lambda > 0)) throw ParameterError("poisson_gof needs lambda > 0");
  if (samples.size() < 1000) throw ParameterError("poisson_gof needs at least 1000 samples");
  PoissonReport r;
  r.lambda = lambda;
  r.expected_mean = expected_mean.value_or(lambda);
  r.samples = static_cast<long long>(samples.size());
  const auto cutoff = static_cast<std::uint64_t>(std::ceil(lambda + 10 * std::sqrt(lambda)));
  std::vector<double> freq(cutoff + 2, 0.0);
  double sum = 0;
  for (auto s : samples) {
    sum += static_cast<double>(s);
    freq[std::min<std::uint64_t>(s, cutoff + 1)] += 1;
  }
  const double total = static_cast<double>(samples.size());
  r.mean = sum / total;
  double tv = 0, mass = 0;
  double p = std::exp(-lambda);
  for (std::uint64_t k = 0; k <= cutoff; ++k) {
    tv += std::fabs(freq[k] / total - p);
    mass += p;
    p *= lambda / static_cast<double>(k + 1);
  }
  tv += std::fabs(freq[cutoff + 1] / total - std::max(0.0, 1 - mass));
  r.tv = tv / 2;
  r.mean_gap = std::fabs(r.mean - r.expected_mean);
  r.mean_tolerance = 3 * std::sqrt(lambda / total);
  r.pass = r.tv <= kPoissonTvThreshold && r.mean_gap <= r.mean_tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle.

/// Classifies every traffic-obeying Hamilton configuration H2 compatible with
/// a fixed H1 by its overlap (k, j). H1 uses slots 0 (in) and 1 (out) at
/// every plain and coloured vertex along p0 c0 p1 c1 ... ; coloured slots
/// s and s^1 are traffic partners.
inline std::map<std::pair<int, int>, BigInt> overlap_census(int n, int d) {
  if (n < 3 || d < 4 || d % 2) throw ParameterError("overlap census needs n >= 3 and even d >= 4");
  if (n * d > 32) throw SizeError("overlap census limited to n*d <= 32");
  const int slots = d;
  // Pairs join a plain half-edge P = p*d+s with a coloured half-edge C = c*d+s.
  std::vector<int> h1_plain(n * slots, -1), h1_col(n * slots, -1);
  for (int i = 0; i < n; ++i) {
    const int p_out = i * slots + 1, c_in = i * slots + 0;
    const int c_out = i * slots + 1, p_next_in = ((i + 1) % n) * slots + 0;
    h1_plain[p_out] = c_in;
    h1_col[c_in] = p_out;
    h1_plain[p_next_in] = c_out;
    h1_col[c_out] = p_next_in;
  }
  auto compatible = [&](int P, int C) { return h1_plain[P] == C || (h1_plain[P] < 0 && h1_col[C] < 0); };

  std::vector<char> plain_used(n, 0), col_used(n, 0);
  std::vector<int> plain_in(n, -1), plain_out(n, -1), col_in(n, -1);
  std::map<std::pair<int, int>, std::uint64_t> oriented;

  auto classify = [&]() {
    int k = 0, j = 0;
    for (int c = 0; c < n; ++c) k += (col_in[c] >> 1) == 0;  // slots {0,1}
    for (int p = 0; p < n; ++p) {
      const int a = plain_in[p], b = plain_out[p];
      j += (a == 0 && b == 1) || (a == 1 && b == 0);
    }
    if (k == n) return;  // H2 = H1
    ++oriented[{k, j}];
  };

  // At plain p with chosen out-slot; `placed` plain vertices visited so far.
  auto from_plain = [&](auto&& self, int p, int placed) -> void {
    const int P = p * slots + plain_out[p];
    for (int c = 0; c < n; ++c) {
      if (col_used[c]) continue;
      for (int s = 0; s < slots; ++s) {
        const int C = c * slots + s;
        if (!compatible(P, C)) continue;
        const int C_out = c * slots + (s ^ 1);
        col_used[c] = 1;
        col_in[c] = s;
        if (placed == n) {
          // close the cycle at p0 through any slot other than its out-slot
          for (int s2 = 0; s2 < slots; ++s2) {
            if (s2 == plain_out[0] || !compatible(0 * slots + s2, C_out)) continue;
            plain_in[0] = s2;
            classify();
            plain_in[0] = -1;
          }
        } else {
          for (int q = 1; q < n; ++q) {
            if (plain_used[q]) continue;
            for (int s2 = 0; s2 < slots; ++s2) {
              if (!compatible(q * slots + s2, C_out)) continue;
              plain_used[q] = 1;
              plain_in[q] = s2;
              for (int s3 = 0; s3 < slots; ++s3) {
                if (s3 == s2) continue;
                plain_out[q] = s3;
                self(self, q, placed + 1);
              }
              plain_out[q] = -1;
              plain_in[q] = -1;
              plain_used[q] = 0;
            }
          }
        }
        col_used[c] = 0;
        col_in[c] = -1;
      }
    }
  };
  plain_used[0] = 1;
  for (int s = 0; s < slots; ++s) {
    plain_out[0] = s;
    from_plain(from_plain, 0, 1);
  }
  std::map<std::pair<int, int>, BigInt> out;
  for (const auto& [key, c] : oriented) out[key] = BigInt(c / 2);  // both orientations from p0
  return out;
}

struct OracleRecord {
  int n = 0;
  int d = 0;
  int i_max = 0;
  std::uint64_t instances = 0;
  Rational expected_y;
  Rational expected_y2;
  Rational prob_y_positive;
  std::vector<std::vector<Rational>> expected_census;  // [i][j]
  std::map<std::pair<int, int>, BigInt> overlap;
  Rational second_moment_ratio() const { return expected_y2 / (expected_y * expected_y); }
};

inline constexpr long long kOracleMaxColourings = 10'000;

/// Exact averages over all pairings and all equitable colourings.
inline OracleRecord oracle_exhaustive(int n, int d, int i_max) {
  if (n < 3 || d < 4 || d % 2) throw ParameterError("oracle needs n >= 3 and even d >= 4");
  if (n * d > 12) throw SizeError("oracle limited to n*d <= 12");
  if (colouring_count(n, d / 2) > kOracleMaxColourings) throw SizeError("oracle limited to 10^4 colourings");
  if (i_max < 1 || i_max > n) throw ParameterError("oracle needs 1 <= i_max <= n");
  OracleRecord rec;
  rec.n = n;
  rec.d = d;
  rec.i_max = i_max;
  std::uint64_t sum_y = 0, sum_y2 = 0, positive = 0;
  CensusTable census_sum(i_max);
  for_each_pairing(DegreeSpec{n, d}, [&](const Pairing& p) {
    const auto g = project_multigraph(p);
    for_each_colouring(g, n, d / 2, [&](const EquitableColouring& col) {
      const auto y = count_rainbow_hamilton(g, col).count;
      sum_y += y;
      sum_y2 += y * y;
      positive += y > 0;
      census_sum += census(build_bipartite(g, col), i_max);
      ++rec.instances;
    });
  });
  const BigInt total = rec.instances;
  rec.expected_y = Rational(BigInt(sum_y), total);
  rec.expected_y2 = Rational(BigInt(sum_y2), total);
  rec.prob_y_positive = Rational(BigInt(positive), total);
  rec.expected_census.resize(i_max + 1);
  for (int i = 1; i <= i_max; ++i)
    for (int j = 0; j <= i; ++j) rec.expected_census[i].push_back(Rational(BigInt(census_sum.at(i, j)), total));
  rec.overlap = overlap_census(n, d);
  return rec;
}

// ---------------------------------------------------------------------------
// JSON.

inline nlohmann::json to_json(const ExperimentPlan& p) {
  nlohmann::json moments = nlohmann::json::array();
  for (const auto& m : p.moments) moments.push_back(m.name());
  return {{"model", to_string(p.model)}, {"n", p.n},          {"d", p.d},
          {"trials", p.trials},          {"seed", p.seed},    {"i_max", p.i_max},
          {"Y", p.hamilton_count},       {"P(Y>0)", p.hamilton_exists},
          {"census", p.census},          {"Z", p.matching_count}, {"moments", moments}};
}

inline nlohmann::json to_json(const OracleRecord& r) {
  nlohmann::json census = nlohmann::json::array();
  for (int i = 1; i <= r.i_max; ++i)
    for (int j = 0; j <= i; ++j)
      census.push_back({{"i", i}, {"j", j}, {"expected", theory::exact_json(r.expected_census[i][j])}});
  nlohmann::json overlap = nlohmann::json::array();
  for (const auto& [key, c] : r.overlap) overlap.push_back({{"k", key.first}, {"j", key.second}, {"N", c.str()}});
  return {{"n", r.n},
          {"d", r.d},
          {"instances", r.instances},
          {"E_Y", theory::exact_json(r.expected_y)},
          {"E_Y2", theory::exact_json(r.expected_y2)},
          {"second_moment_ratio", theory::exact_json(r.second_moment_ratio())},
          {"P_Y_positive", theory::exact_json(r.prob_y_positive)},
          {"census", census},
          {"overlap", overlap}};
}

/// Reference values for the statistics of a plan, where closed forms exist.
inline nlohmann::json theory_for(const ExperimentPlan& p) {
  nlohmann::json t = nlohmann::json::object();
  if (p.model == Model::hamilton) {
    t["E_Y"] = theory::exact_json(theory::expected_hamilton_exact(p.n, p.d).expected);
    if (p.census)
      for (int i = 1; i <= p.i_max; ++i)
        for (int j = 0; j <= i; ++j) {
          t[detail::census_key(i, j)] = {{"finite_n", theory::exact_json(theory::expected_census_exact(p.n, p.d, i, j))},
                                         {"lambda", theory::exact_json(theory::lambda_delta_mu(p.d, i, j).lambda)}};
        }
  } else if (p.model == Model::planted) {
    if (p.census)
      for (int i = 1; i <= p.i_max; ++i)
        for (int j = 0; j <= i; ++j)
          t[detail::census_key(i, j)] = {{"mu", theory::exact_json(theory::lambda_delta_mu(p.d, i, j).mu)}};
  } else {
    t["E_Z"] = theory::exact_json(theory::matching_theory(p.n, p.d, 1).expected);
  }
  return t;
}

/// {"plan", "estimates", "theory", "oracle"}; deterministic for a fixed plan.
inline nlohmann::json results_document(const ExperimentResult& r, const std::optional<OracleRecord>& oracle = std::nullopt) {
  nlohmann::json estimates = nlohmann::json::array();
  for (const auto& [k, e] : r.estimates)
    estimates.push_back({{"stat", k}, {"mean", e.mean}, {"stderr", e.stderr_}, {"trials", e.trials}});
  nlohmann::json doc = {{"plan", to_json(r.plan)}, {"estimates", estimates}, {"theory", theory_for(r.plan)}};
  doc["oracle"] = oracle ? to_json(*oracle) : nlohmann::json(nullptr);
  if (r.plan.model == Model::planted) doc["planted_structure_failures"] = r.planted_failures;
  return doc;
}

}  // namespace rainbow::mc
