#pragma once

// Closed forms for the coloured configuration model: Poisson parameters of
// the short-cycle census, exact expectations, growth rates, and the
// rainbow-matching analogues. Exact values are big rationals; limits are
// doubles.

#include "rainbow/errors.hpp"
#include "rainbow/rational.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace rainbow::theory {

inline void require_hamilton_degree(int d) {
  if (d < 4 || d % 2 != 0) throw ParameterError("Hamilton model needs even d >= 4");
}

/// Poisson mean lambda, relative shift delta and conditioned mean
/// mu = lambda (1 + delta) of one census variable.
struct LimitTriple {
  Rational lambda;
  Rational delta;
  Rational mu;
};

inline void require_index(int i, int j) {
  if (i < 1 || j < 0 || j > i) throw ParameterError("need i >= 1 and 0 <= j <= i");
}

inline LimitTriple lambda_delta_mu(int d, int i, int j) {
  require_hamilton_degree(d);
  require_index(i, j);
  LimitTriple t;
  t.lambda = Rational(binomial(i, j) * ipow(d - 1, i) * ipow(d - 2, j), 2 * i);
  if (j > 0) {
    const int sign = (i + j) % 2 == 0 ? 1 : -1;
    t.delta = Rational(sign * ipow(2, j), ipow(d - 1, i) * ipow(d - 2, j));
  } else {
    t.delta = i % 2 == 1 ? Rational(-2, ipow(d - 1, i)) : Rational(0);
  }
  t.mu = t.lambda * (1 + t.delta);
  return t;
}

/// 2x2 integer matrices counting half-edge choices along a cycle split into
/// edges of the planted Hamilton cycle (type 1) and of the rest (type 2).
struct TransferMatrices {
  using M = std::array<std::array<BigInt, 2>, 2>;
  M A, B, Btilde;

  explicit TransferMatrices(int d) {
    A = {{{1, d - 2}, {2, d - 3}}};
    B = {{{1, 0}, {0, 1}}};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) Btilde[r][c] = A[r][c] - B[r][c];
  }

  static M mul(const M& x, const M& y) {
    M z;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) z[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
    return z;
  }
  static M power(M x, int e) {
    M r = {{{1, 0}, {0, 1}}};
    for (; e > 0; --e) r = mul(r, x);
    return r;
  }
  static BigInt trace(const M& x) { return x[0][0] + x[1][1]; }
};

/// mu_ij from the trace of the transfer-matrix product, as an independent
/// route to lambda (1 + delta).
inline Rational mu_from_trace(int d, int i, int j) {
  require_hamilton_degree(d);
  require_index(i, j);
  TransferMatrices tm(d);
  auto m = TransferMatrices::power(tm.A, i);
  m = TransferMatrices::mul(m, TransferMatrices::power(tm.Btilde, j));
  BigInt tr = TransferMatrices::trace(m);
  if (j == 0) tr -= 1;  // the all-type-1 cycle needs i = n
  return Rational(binomial(i, j) * tr, 2 * i);
}

struct HamiltonExpectation {
  Rational expected;  // E Y
  Rational growth;    // f(d) = (d-1)(1-2/d)^(d-2)
};

inline Rational growth_rate(int d) {
  require_hamilton_degree(d);
  return Rational(d - 1) * rpow(Rational(d - 2, d), d - 2);
}

/// E Y = d^{2n} (d-1)^n (n!)^2 ((d-2)n)! / (2n (dn)!)
inline HamiltonExpectation expected_hamilton_exact(int n, int d) {
  require_hamilton_degree(d);
  if (n < 3) throw ParameterError("Hamilton expectation needs n >= 3");
  BigInt num = ipow(d, 2 * n) * ipow(d - 1, n) * factorial(n) * factorial(n) * factorial(static_cast<std::int64_t>(d - 2) * n);
  BigInt den = BigInt(2 * n) * factorial(static_cast<std::int64_t>(d) * n);
  return {Rational(num, den), growth_rate(d)};
}

/// E Y written over the pairing count (dn-1)!!, as "a/b" unreduced, when
/// that numerator is an integer; otherwise the reduced fraction.
inline std::string expected_hamilton_per_pairing(int n, int d) {
  const Rational ey = expected_hamilton_exact(n, d).expected;
  BigInt pairings = 1;
  for (std::int64_t k = static_cast<std::int64_t>(d) * n - 1; k > 1; k -= 2) pairings *= k;
  const Rational scaled = ey * pairings;
  if (boost::multiprecision::denominator(scaled) != 1) return to_string(ey);
  return boost::multiprecision::numerator(scaled).str() + "/" + pairings.str();
}

/// ln E Y via lgamma, for n beyond exact arithmetic.
inline double log_expected_hamilton(int n, int d) {
  const double nn = n, dd = d;
  return 2 * nn * std::log(dd) + nn * std::log(dd - 1) + 2 * std::lgamma(nn + 1) + std::lgamma((dd - 2) * nn + 1) -
         std::log(2 * nn) - std::lgamma(dd * nn + 1);
}

/// E X_ij = C(i,j) d^{2i} (d-1)^i (d-2)^j [n]_i^2 / (2i [dn]_{2i})
inline Rational expected_census_exact(int n, int d, int i, int j) {
  require_hamilton_degree(d);
  require_index(i, j);
  if (i > n) throw ParameterError("census expectation needs i <= n");
  BigInt fn = falling(n, i);
  BigInt num = binomial(i, j) * ipow(d, 2 * i) * ipow(d - 1, i) * ipow(d - 2, j) * fn * fn;
  BigInt den = BigInt(2 * i) * falling(static_cast<std::int64_t>(d) * n, 2 * i);
  return Rational(num, den);
}

struct LambdaDeltaSum {
  double with_violations = 0;  // sum over j > 0
  double traffic_obeying = 0;  // sum over j = 0
  double total = 0;
  double closed_with_violations = 0;  // (1/2) ln((d-2)^2 / (d(d-4)))
  double closed_traffic_obeying = 0;  // ln(d/(d-2))
  double closed_total = 0;            // (1/2) ln(d/(d-4))
  int terms_i = 0;                    // rows summed before the cutoff
};

/// Sums lambda_ij delta_ij^2 term by term, stopping once a whole row i is
/// below 1e-15 and the geometric tail bound is below 1e-15 as well.
inline LambdaDeltaSum sum_lambda_delta_sq(int d, int max_rows = 100000) {
  if (d <= 4) throw DivergenceError("sum of lambda*delta^2 diverges for d <= 4");
  LambdaDeltaSum s;
  const double dd = d;
  // Row i is bounded by (1/2i) ((d+2)/((d-1)(d-2)))^i + (2/i)(d-1)^-i, so
  // the tail after row i is bounded by its geometric continuation.
  const double ratio = std::max((dd + 2) / ((dd - 1) * (dd - 2)), 1 / (dd - 1));
  double kv = 0, kv_c = 0, k0 = 0, k0_c = 0;  // Neumaier compensation
  auto add = [](double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  for (int i = 1; i <= max_rows; ++i) {
    double row = 0;
    for (int j = 0; j <= i; ++j) {
      // lambda * delta^2 evaluated from the two factors separately.
      const double log_lambda = std::lgamma(i + 1.0) - std::lgamma(j + 1.0) - std::lgamma(i - j + 1.0) +
                                i * std::log(dd - 1) + j * std::log(dd - 2) - std::log(2.0 * i);
      double term;
      if (j > 0) {
        const double log_delta = j * std::log(2.0) - i * std::log(dd - 1) - j * std::log(dd - 2);
        term = std::exp(log_lambda + 2 * log_delta);
        add(kv, kv_c, term);
      } else {
        if (i % 2 == 0) continue;
        const double log_delta = std::log(2.0) - i * std::log(dd - 1);
        term = std::exp(log_lambda + 2 * log_delta);
        add(k0, k0_c, term);
      }
      row += term;
    }
    s.terms_i = i;
    const double tail = row * ratio / (1 - ratio);
    if (row < 1e-15 && tail < 1e-15) break;
  }
  s.with_violations = kv + kv_c;
  s.traffic_obeying = k0 + k0_c;
  s.total = s.with_violations + s.traffic_obeying;
  s.closed_with_violations = 0.5 * std::log((dd - 2) * (dd - 2) / (dd * (dd - 4)));
  s.closed_traffic_obeying = std::log(dd / (dd - 2));
  s.closed_total = 0.5 * std::log(dd / (dd - 4));
  return s;
}

struct MatchingTheory {
  int n = 0;
  int d = 0;
  Rational expected;      // E Z
  Rational growth_base;   // (d-1)^{2d-2} / d^{2d-3}
  double variance_ratio;  // (d-1)/sqrt(d(d-3)), NaN for d < 4
  std::vector<std::vector<LimitTriple>> triples;  // [i][j], 1 <= i <= i_max
};

/// lambda_ij and delta_ij for the matching model.
inline LimitTriple matching_lambda_delta(int d, int i, int j) {
  if (d < 1) throw ParameterError("matching model needs d >= 1");
  require_index(i, j);
  LimitTriple t;
  t.lambda = Rational(binomial(i, j) * ipow(2, j) * ipow(d - 1, i + j), 2 * i);
  const int sign = (i + j) % 2 == 0 ? 1 : -1;
  t.delta = d == 1 ? Rational(0) : Rational(BigInt(sign), ipow(d - 1, i + j));
  t.mu = t.lambda * (1 + t.delta);
  return t;
}

inline MatchingTheory matching_theory(int n, int d, int i_max = 3) {
  if (n < 1 || d < 1) throw ParameterError("matching model needs n >= 1 and d >= 1");
  MatchingTheory m;
  m.n = n;
  m.d = d;
  m.expected = Rational(ipow(d, 3 * n) * factorial(2 * n) * factorial(static_cast<std::int64_t>(2 * d - 2) * n),
                        factorial(static_cast<std::int64_t>(2 * d) * n));
  m.growth_base = d >= 2 ? Rational(ipow(d - 1, 2 * d - 2), ipow(d, 2 * d - 3)) : Rational(0);
  m.variance_ratio = d >= 4 ? (d - 1.0) / std::sqrt(static_cast<double>(d) * (d - 3)) : std::nan("");
  m.triples.resize(i_max + 1);
  for (int i = 1; i <= i_max; ++i)
    for (int j = 0; j <= i; ++j) m.triples[i].push_back(matching_lambda_delta(d, i, j));
  return m;
}

// JSON records. Exact values are strings "p/q" next to a double.

inline nlohmann::json exact_json(const Rational& r) {
  return {{"exact", to_string(r)}, {"value", to_double(r)}};
}

inline nlohmann::json to_json(const LimitTriple& t) {
  return {{"lambda", exact_json(t.lambda)}, {"delta", exact_json(t.delta)}, {"mu", exact_json(t.mu)}};
}

inline nlohmann::json to_json(const LambdaDeltaSum& s) {
  return {{"with_violations", s.with_violations},
          {"traffic_obeying", s.traffic_obeying},
          {"total", s.total},
          {"closed_with_violations", s.closed_with_violations},
          {"closed_traffic_obeying", s.closed_traffic_obeying},
          {"closed_total", s.closed_total},
          {"rows", s.terms_i}};
}

inline nlohmann::json to_json(const MatchingTheory& m) {
  nlohmann::json triples = nlohmann::json::array();
  for (int i = 1; i < static_cast<int>(m.triples.size()); ++i)
    for (int j = 0; j <= i; ++j) {
      auto t = to_json(m.triples[i][j]);
      t["i"] = i;
      t["j"] = j;
      triples.push_back(t);
    }
  nlohmann::json out = {{"n", m.n},
                        {"d", m.d},
                        {"expected_Z", exact_json(m.expected)},
                        {"growth_base", exact_json(m.growth_base)},
                        {"triples", triples}};
  if (std::isfinite(m.variance_ratio)) out["variance_ratio"] = m.variance_ratio;
  else out["variance_ratio"] = nullptr;
  return out;
}

/// Every Hamilton-model closed form for (n, d), census indices up to i_max.
inline nlohmann::json hamilton_report(int n, int d, int i_max) {
  require_hamilton_degree(d);
  const auto ey = expected_hamilton_exact(n, d);
  nlohmann::json census = nlohmann::json::array();
  for (int i = 1; i <= i_max; ++i)
    for (int j = 0; j <= i; ++j) {
      auto t = to_json(lambda_delta_mu(d, i, j));
      t["i"] = i;
      t["j"] = j;
      t["mu_trace"] = exact_json(mu_from_trace(d, i, j));
      if (i <= n) t["expected_finite_n"] = exact_json(expected_census_exact(n, d, i, j));
      census.push_back(t);
    }
  nlohmann::json out = {{"n", n},
                        {"d", d},
                        {"expected_Y", exact_json(ey.expected)},
                        {"expected_Y_per_pairing", expected_hamilton_per_pairing(n, d)},
                        {"growth_rate", exact_json(ey.growth)},
                        {"census", census}};
  if (d > 4) out["lambda_delta_sq"] = to_json(sum_lambda_delta_sq(d));
  return out;
}

}  // namespace rainbow::theory
