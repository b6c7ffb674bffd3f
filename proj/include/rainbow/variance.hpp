#pragma once

// Second moment of the rainbow Hamilton cycle count: exact overlap counts
// N(k, j), the finite-n ratio E Y^2 / (E Y)^2, the exponent surface F on the
// triangle T, the quintic locating its stationary points, and the Laplace
// evaluation at the maximiser.

#include "rainbow/errors.hpp"
#include "rainbow/rational.hpp"
#include "rainbow/theory.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rainbow::variance {

/// Overlap between two traffic-obeying Hamilton configurations: k shared
/// coloured vertices, j plain vertices where both half-edges are shared.
struct OverlapPoint {
  int n = 0;
  int k = 0;
  int j = 0;

  int strings() const { return k - j; }
  int string_ends() const { return 2 * (k - j); }  // |S1|
  int untouched() const { return n - 2 * k + j; }  // |S2|

  /// k = 0 forces j = 0; otherwise at least one string and room for it.
  bool feasible() const {
    if (k == 0) return j == 0;
    if (k >= n || j < 0 || j >= k) return false;
    return untouched() >= 0 && (n - k - 1) >= (k - j - 1);
  }
};

inline void require_model(int n, int d) {
  if (n < 3) throw ParameterError("variance needs n >= 3");
  if (d < 4) throw ParameterError("variance needs d >= 4");
}

/// Number of H2 != H1 overlapping a fixed H1 in (k, j).
///   N = (n/k) C(k,j) C(n-k-1, k-j-1) 2^{k-j} (d-2)^{2n-k-j} (d-3)^{n-2k+j} (n-k)! (n-k-1)! / 2
/// with the placement factor taken as 1 when k = j = 0. Infeasible points give 0.
inline Rational overlap_count(int n, int d, int k, int j) {
  require_model(n, d);
  const OverlapPoint p{n, k, j};
  if (!p.feasible()) return 0;
  Rational placement = 1;
  if (k > 0) placement = Rational(BigInt(n) * binomial(k, j) * binomial(n - k - 1, k - j - 1), k);
  BigInt choices = ipow(2, k - j) * ipow(d - 2, 2 * n - k - j) * ipow(d - 3, n - 2 * k + j);
  BigInt closing = factorial(n - k) * factorial(n - k - 1);
  return placement * Rational(choices * closing, 2);
}

/// P(H2 | H1) = ((d-4)n + 2k)! / ((d-2)n)!
inline Rational conditional_prob(int n, int d, int k) {
  if (d < 4) throw ParameterError("conditional probability needs d >= 4");
  if (k < 0 || k > n) throw ParameterError("need 0 <= k <= n");
  const std::int64_t top = static_cast<std::int64_t>(d - 2) * n;
  const std::int64_t bottom = static_cast<std::int64_t>(d - 4) * n + 2 * k;
  return Rational(1, falling(top, top - bottom));
}

/// f(n,d,k,j) = N(k,j) P(H2|H1) / E Y, exactly.
inline Rational term_exact(int n, int d, int k, int j) {
  const Rational N = overlap_count(n, d, k, j);
  if (N == 0) return 0;
  return N * conditional_prob(n, d, k) / theory::expected_hamilton_exact(n, d).expected;
}

/// The single-fraction form of f for k >= 1:
///   n^2 (k-1)! ((n-k)!)^3 2^{k-j} (d-2)^{2n-k-j} (d-3)^{n-2k+j} ((d-4)n+2k)! (dn)!
///   / [ (n-k)^2 (k-j)! (k-j-1)! j! (n-2k+j)! ((d-2)n)!^2 d^{2n} (d-1)^n (n!)^2 ]
inline Rational term_closed_form(int n, int d, int k, int j) {
  require_model(n, d);
  const OverlapPoint p{n, k, j};
  if (k < 1 || !p.feasible()) throw DomainError("closed form needs a feasible point with k >= 1");
  const BigInt fk = factorial(n - k);
  BigInt num = BigInt(n) * n * factorial(k - 1) * fk * fk * fk * ipow(2, k - j) * ipow(d - 2, 2 * n - k - j) *
               ipow(d - 3, n - 2 * k + j) * factorial(static_cast<std::int64_t>(d - 4) * n + 2 * k) *
               factorial(static_cast<std::int64_t>(d) * n);
  const BigInt fd = factorial(static_cast<std::int64_t>(d - 2) * n);
  const BigInt fn = factorial(n);
  BigInt den = BigInt(n - k) * (n - k) * factorial(k - j) * factorial(k - j - 1) * factorial(j) *
               factorial(n - 2 * k + j) * fd * fd * ipow(d, 2 * n) * ipow(d - 1, n) * fn * fn;
  return Rational(num, den);
}

namespace detail {
inline double lf(double x) { return std::lgamma(x + 1); }
}  // namespace detail

/// ln f(n,d,k,j) through lgamma; -inf at infeasible points.
inline double log_term(int n, int d, int k, int j) {
  using detail::lf;
  const OverlapPoint p{n, k, j};
  if (!p.feasible()) return -std::numeric_limits<double>::infinity();
  const double N = n, D = d;
  double log_n;
  if (k == 0) {
    log_n = 2 * N * std::log(D - 2) + N * std::log(D - 3) + lf(N) + lf(N - 1) - std::log(2.0);
  } else {
    const double s = k - j;
    log_n = std::log(N) - std::log(double(k)) + lf(k) - lf(j) - lf(s) + lf(N - k - 1) - lf(s - 1) -
            lf(N - k - 1 - (s - 1)) + s * std::log(2.0) + (2 * N - k - j) * std::log(D - 2) +
            (N - 2 * k + j) * std::log(D - 3) + lf(N - k) + lf(N - k - 1) - std::log(2.0);
  }
  const double log_p = lf((D - 4) * N + 2 * k) - lf((D - 2) * N);
  return log_n + log_p - theory::log_expected_hamilton(n, d);
}

/// Pairwise summation of a sequence in its given order.
inline double pairwise_sum(const double* x, std::size_t len) {
  if (len <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, len - half);
}

struct Term {
  int k = 0;
  int j = 0;
  double f = 0;
};

struct SecondMoment {
  int n = 0;
  int d = 0;
  double ratio = 0;                   // E Y^2 / (E Y)^2
  double inverse_expectation = 0;     // 1 / E Y
  std::optional<Rational> ratio_exact;
  std::vector<Term> terms;            // feasible (k, j) in increasing k then j
};

inline constexpr int kExactSecondMomentMaxN = 8;

/// E Y^2/(E Y)^2 = 1/E Y + sum over feasible (k, j) of f(n,d,k,j), including
/// the k = 0 term. Exact rationals up to n = 8, lgamma beyond (or when
/// force_float is set).
inline SecondMoment second_moment_finite(int n, int d, bool force_float = false) {
  require_model(n, d);
  SecondMoment out;
  out.n = n;
  out.d = d;
  const bool exact = !force_float && n <= kExactSecondMomentMaxN;
  Rational exact_sum = 0;
  std::vector<double> values;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j <= k; ++j) {
      if (!OverlapPoint{n, k, j}.feasible()) continue;
      double f;
      if (exact) {
        const Rational t = term_exact(n, d, k, j);
        exact_sum += t;
        f = to_double(t);
      } else {
        f = std::exp(log_term(n, d, k, j));
      }
      out.terms.push_back({k, j, f});
      values.push_back(f);
    }
  }
  if (exact) {
    const Rational inv = 1 / theory::expected_hamilton_exact(n, d).expected;
    out.ratio_exact = inv + exact_sum;
    out.inverse_expectation = to_double(inv);
    out.ratio = to_double(*out.ratio_exact);
  } else {
    out.inverse_expectation = std::exp(-theory::log_expected_hamilton(n, d));
    out.ratio = out.inverse_expectation + pairwise_sum(values.data(), values.size());
  }
  return out;
}

/// CSV "k,j,f".
inline std::string terms_csv(const SecondMoment& sm) {
  std::ostringstream os;
  os.precision(17);
  os << "k,j,f\n";
  for (const auto& t : sm.terms) os << t.k << ',' << t.j << ',' << t.f << '\n';
  return os.str();
}

/// Stirling prefactor f0(n,d,k,j).
inline double stirling_prefactor(double n, double d, double k, double j) {
  return std::sqrt((d * n - 4 * n + 2 * k) * n * d) /
         (2 * std::numbers::pi * (d - 2) * std::sqrt(k * (n - k) * j * (n - 2 * k + j)));
}

// ---------------------------------------------------------------------------
// The exponent surface.

/// x ln x with the convention 0 ln 0 = 0.
inline double xlogx(double x) { return x == 0 ? 0.0 : x * std::log(x); }

/// (alpha, delta) in T = {0 <= alpha <= delta, alpha + delta <= 1};
/// kappa = 1 - delta and gamma = kappa - alpha.
struct SurfacePoint {
  double t = 6;
  double alpha = 0;
  double delta = 0;

  double kappa() const { return 1 - delta; }
  double gamma() const { return kappa() - alpha; }

  bool in_triangle(double tol = 1e-12) const {
    return alpha >= -tol && alpha <= delta + tol && alpha + delta <= 1 + tol;
  }
};

/// ln F(alpha, delta) at t = d - 2.
inline double log_F(double t, double alpha, double delta) {
  return alpha * std::log(2.0) + t * std::log(t + 2) + (delta - alpha) * std::log(t - 1) + xlogx(t - 2 * delta) +
         xlogx(1 - delta) + 3 * xlogx(delta) - std::log(t + 1) - (2 * t - 2 * delta - alpha) * std::log(t) -
         xlogx(1 - delta - alpha) - 2 * xlogx(alpha) - xlogx(delta - alpha);
}

/// ln G(kappa, gamma) for degree d, written in the overlap densities.
inline double log_G(double d, double kappa, double gamma) {
  return (kappa - gamma) * std::log(2.0) + (d - 2) * std::log(d) + (1 + gamma - 2 * kappa) * std::log(d - 3) +
         xlogx(d - 4 + 2 * kappa) + xlogx(kappa) + 3 * xlogx(1 - kappa) - std::log(d - 1) -
         (2 * d - 6 + kappa + gamma) * std::log(d - 2) - xlogx(gamma) - 2 * xlogx(kappa - gamma) -
         xlogx(1 - 2 * kappa + gamma);
}

struct SurfaceValue {
  double F = 0;
  double G = 0;
  std::array<double, 2> gradient{};   // (d ln F / d alpha, d ln F / d delta)
  std::array<double, 2> residuals{};  // stationary equations, delta-equation first
};

inline std::array<double, 2> log_F_gradient(double t, double alpha, double delta) {
  const double da = std::log(2 * t * (delta - alpha) * (1 - delta - alpha) / ((t - 1) * alpha * alpha));
  const double dd = std::log(t * t * (t - 1) * delta * delta * delta * (1 - delta - alpha) /
                             ((t - 2 * delta) * (t - 2 * delta) * (1 - delta) * (delta - alpha)));
  return {da, dd};
}

/// Hessian of ln F: {aa, ad, dd}.
inline std::array<double, 3> log_F_hessian(double t, double alpha, double delta) {
  const double r = 1 / (1 - delta - alpha), s = 1 / (delta - alpha);
  return {-r - 2 / alpha - s, -r + s, 3 / delta + 4 / (t - 2 * delta) + 1 / (1 - delta) - r - s};
}

inline std::array<double, 2> stationary_residuals(double t, double alpha, double delta) {
  const double r1 = t * t * (t - 1) * delta * delta * delta * (1 - delta - alpha) -
                    (t - 2 * delta) * (t - 2 * delta) * (1 - delta) * (delta - alpha);
  const double r2 = (t + 1) * alpha * alpha - 2 * t * alpha + 2 * t * delta * (1 - delta);
  return {r1, r2};
}

inline SurfaceValue surface_F(const SurfacePoint& p) {
  if (!p.in_triangle()) throw DomainError("point outside the triangle T");
  if (p.t <= 2) throw DomainError("surface needs t > 2");
  SurfaceValue v;
  v.F = std::exp(log_F(p.t, p.alpha, p.delta));
  v.G = std::exp(log_G(p.t + 2, p.kappa(), p.gamma()));
  v.gradient = log_F_gradient(p.t, p.alpha, p.delta);
  v.residuals = stationary_residuals(p.t, p.alpha, p.delta);
  return v;
}

/// F at a lattice point of T (alpha, delta integers) as an exact rational,
/// with 0^0 = 1.
inline Rational surface_F_exact(int t, int alpha, int delta) {
  if (!(alpha >= 0 && alpha <= delta && alpha + delta <= 1)) throw DomainError("not a lattice point of T");
  if (t <= 2) throw DomainError("surface needs t > 2");
  auto pw = [](Rational b, int e) { return e == 0 ? Rational(1) : rpow(b, e); };
  Rational num = pw(2, alpha) * pw(t + 2, t) * pw(t - 1, delta - alpha) * pw(t - 2 * delta, t - 2 * delta) *
                 pw(1 - delta, 1 - delta) * pw(delta, 3 * delta);
  Rational den = Rational(t + 1) * pw(t, 2 * t - 2 * delta - alpha) * pw(1 - delta - alpha, 1 - delta - alpha) *
                 pw(alpha, 2 * alpha) * pw(delta - alpha, delta - alpha);
  return num / den;
}

// ---------------------------------------------------------------------------
// The quintic whose roots in (0, 1) contain every interior stationary delta.

inline double quintic_g(double t, double x) {
  const double a = (t - 2 * x) * (t - 2 * x) - t * t * (t - 1) * x * x;
  return (1 - x) * a * a - 2 * t * t * t * x * (1 - 2 * x) * (1 - 2 * x) * (t - 2 * x) * (t - 2 * x);
}

inline double quartic_h(double t, double x) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
  return t5 * x4 - 2 * x * (2 * x3 + x2 - 2 * x + 1) * t4 + (9 * x4 - 12 * x3 + 6 * x2 + 1) * t3 +
         2 * x * (x - 1) * (3 * x2 + 2 * x + 3) * t2 - 4 * x2 * (x + 3) * (x - 1) * t + 8 * x3 * (x - 1);
}

inline double quartic_h_second(double t, double x) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, x2 = x * x;
  return 12 * t5 * x2 + (-48 * x2 - 12 * x + 8) * t4 + 12 * (9 * x2 - 6 * x + 1) * t3 +
         (72 * x2 - 12 * x + 4) * t2 + (-48 * x2 - 48 * x + 24) * t + 96 * x2 - 48 * x;
}

/// h'' regrouped into terms that are each nonnegative for t >= 6, x >= 0.
inline std::array<double, 8> quartic_h_second_terms(double t, double x) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, x2 = x * x;
  return {12 * (t - 6) * t4 * x2,
          (24 * x2 - 12 * x + 8) * t4,
          12 * (9 * x2 - 6 * x + 1) * t3,
          12 * x * (t2 - 4),
          12 * x2 * (t2 - 6 * t),
          4 * (15 * x2 - 6 * x + 1) * t2,
          24 * (x2 - 2 * x + 1) * t,
          96 * x2};
}

struct QuinticReport {
  double t = 0;
  double delta = 0;
  double g = 0;
  double h = 0;
  double factorization_residual = 0;  // g - (t+2)(delta0 - delta) h
  double h_second = 0;
  double h_second_regrouped = 0;
};

inline QuinticReport quintic_tools(double t, double delta) {
  if (t <= 2) throw DomainError("quintic needs t > 2");
  QuinticReport q;
  q.t = t;
  q.delta = delta;
  q.g = quintic_g(t, delta);
  q.h = quartic_h(t, delta);
  const double delta0 = t / (t + 2);
  q.factorization_residual = q.g - (t + 2) * (delta0 - delta) * q.h;
  q.h_second = quartic_h_second(t, delta);
  const auto parts = quartic_h_second_terms(t, delta);
  q.h_second_regrouped = 0;
  for (double v : parts) q.h_second_regrouped += v;
  return q;
}

/// d^2/d delta^2 of ln F(beta delta, delta).
inline double case1_second_derivative(double t, double beta, double delta) {
  const double num = 2 * t - beta * t - 4 * t * delta + 2 * t * delta * delta - 2 * beta * t * delta +
                     2 * beta * t * delta * delta + 2 * beta * delta;
  const double den = (1 - delta) * (1 - delta - beta * delta) * delta * (t - 2 * delta);
  return num / den;
}

// ---------------------------------------------------------------------------
// Maximisation over T and the quadratic expansion at the maximiser.

struct HessianData {
  Rational c1, c2, c3, D;  // D = 4 c1 c3 - c2^2
};

inline HessianData hessian_constants(int d) {
  if (d <= 3) throw DomainError("Hessian constants need d > 3");
  HessianData h;
  const BigInt D = d;
  h.c1 = -Rational(D * (D * D * D - 3 * D * D + 4 * D + 4), 4 * (D - 2) * (D - 2) * (D - 3));
  h.c2 = Rational(D * (D - 1) * (D - 1), (D - 2) * (D - 3));
  h.c3 = -Rational(D * (D - 1) * (D - 1), 4 * (D - 3));
  h.D = 4 * h.c1 * h.c3 - h.c2 * h.c2;
  return h;
}

/// Hessian of ln G at (kappa, gamma) by central differences, returned as the
/// quadratic-form constants (c1, c2, c3).
inline std::array<double, 3> numeric_hessian_constants(double d, double kappa, double gamma, double h = 1e-4) {
  auto f = [&](double a, double b) { return log_G(d, a, b); };
  const double fkk = (f(kappa + h, gamma) - 2 * f(kappa, gamma) + f(kappa - h, gamma)) / (h * h);
  const double fgg = (f(kappa, gamma + h) - 2 * f(kappa, gamma) + f(kappa, gamma - h)) / (h * h);
  const double fkg = (f(kappa + h, gamma + h) - f(kappa + h, gamma - h) - f(kappa - h, gamma + h) +
                      f(kappa - h, gamma - h)) / (4 * h * h);
  return {fkk / 2, fkg, fgg / 2};
}

struct ArgmaxReport {
  double t = 0;
  double alpha = 0;
  double delta = 0;
  double F = 0;
  double alpha_expected = 0;  // 2 delta0 / (t+1)
  double delta_expected = 0;  // t / (t+2)
  double kappa0 = 0;
  double gamma0 = 0;
  int grid = 0;
  HessianData hessian;
  Rational laplace_limit_squared;  // exact; equals d/(d-4)
  double laplace_limit = 0;
};

/// Newton iteration on the gradient of ln F, kept strictly inside T.
inline std::optional<std::array<double, 2>> refine_stationary(double t, double alpha, double delta) {
  for (int it = 0; it < 100; ++it) {
    const auto g = log_F_gradient(t, alpha, delta);
    const auto H = log_F_hessian(t, alpha, delta);
    const double det = H[0] * H[2] - H[1] * H[1];
    if (!std::isfinite(det) || det == 0) return std::nullopt;
    const double sa = -(H[2] * g[0] - H[1] * g[1]) / det;
    const double sd = -(-H[1] * g[0] + H[0] * g[1]) / det;
    double step = 1;
    double na = alpha + sa, nd = delta + sd;
    while (step > 1e-12 && !(na > 0 && na < nd && na + nd < 1 && nd < t / 2)) {
      step /= 2;
      na = alpha + step * sa;
      nd = delta + step * sd;
    }
    if (step <= 1e-12) return std::nullopt;
    alpha = na;
    delta = nd;
    if (std::fabs(step * sa) < 1e-15 && std::fabs(step * sd) < 1e-15) break;
  }
  const auto g = log_F_gradient(t, alpha, delta);
  if (!(std::fabs(g[0]) < 1e-9 && std::fabs(g[1]) < 1e-9)) return std::nullopt;
  return std::array<double, 2>{alpha, delta};
}

/// Global maximum of F over T: a grid of spacing 1/grid followed by Newton
/// refinement from the ten best cells. Ties on the grid break toward the
/// lexicographically smaller (delta, alpha).
inline ArgmaxReport argmax_F(int d, int grid = 2000) {
  if (d - 2 < 4) throw DivergenceError("Laplace limit undefined for d <= 4 (variance diverges)");
  const double t = d - 2;
  struct Cell {
    double value;
    int a, b;
  };
  std::vector<Cell> best;
  auto better = [](const Cell& x, const Cell& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.b != y.b) return x.b < y.b;
    return x.a < y.a;
  };
  for (int b = 0; b <= grid; ++b) {
    const double delta = double(b) / grid;
    const int amax = std::min(b, grid - b);
    for (int a = 0; a <= amax; ++a) {
      const Cell c{log_F(t, double(a) / grid, delta), a, b};
      if (best.size() < 10 || better(c, best.back())) {
        best.insert(std::upper_bound(best.begin(), best.end(), c, better), c);
        if (best.size() > 10) best.pop_back();
      }
    }
  }
  ArgmaxReport r;
  r.t = t;
  r.grid = grid;
  r.alpha = double(best.front().a) / grid;
  r.delta = double(best.front().b) / grid;
  double best_value = best.front().value;
  for (const auto& c : best) {
    const auto refined = refine_stationary(t, double(c.a) / grid, double(c.b) / grid);
    if (!refined) continue;
    const double v = log_F(t, (*refined)[0], (*refined)[1]);
    if (v >= best_value) {
      best_value = v;
      r.alpha = (*refined)[0];
      r.delta = (*refined)[1];
    }
  }
  r.F = std::exp(best_value);
  r.delta_expected = t / (t + 2);
  r.alpha_expected = 2 * r.delta_expected / (t + 1);
  r.kappa0 = 2.0 / d;
  r.gamma0 = r.kappa0 / (d - 1);
  r.hessian = hessian_constants(d);
  // (f0 * 2 pi n / sqrt(D))^2 at kappa0 = 2/d, gamma0 = kappa0/(d-1);
  // every factor is rational.
  const Rational kappa(2, d), gamma = Rational(2, d) / (d - 1);
  r.laplace_limit_squared = (Rational(d - 4) + 2 * kappa) * d /
                            (Rational((d - 2) * (d - 2)) * kappa * (1 - kappa) * gamma * (1 - 2 * kappa + gamma) *
                             r.hessian.D);
  r.laplace_limit = std::sqrt(to_double(r.laplace_limit_squared));
  return r;
}

inline nlohmann::json to_json(const HessianData& h) {
  return {{"c1", theory::exact_json(h.c1)},
          {"c2", theory::exact_json(h.c2)},
          {"c3", theory::exact_json(h.c3)},
          {"D", theory::exact_json(h.D)}};
}

inline nlohmann::json to_json(const ArgmaxReport& r) {
  return {{"t", r.t},
          {"d", r.t + 2},
          {"alpha", r.alpha},
          {"delta", r.delta},
          {"F", r.F},
          {"alpha_expected", r.alpha_expected},
          {"delta_expected", r.delta_expected},
          {"kappa0", r.kappa0},
          {"gamma0", r.gamma0},
          {"grid", r.grid},
          {"hessian", to_json(r.hessian)},
          {"laplace_limit_squared", theory::exact_json(r.laplace_limit_squared)},
          {"laplace_limit", r.laplace_limit}};
}

inline nlohmann::json to_json(const QuinticReport& q) {
  return {{"t", q.t},
          {"delta", q.delta},
          {"g", q.g},
          {"h", q.h},
          {"factorization_residual", q.factorization_residual},
          {"h_second", q.h_second},
          {"h_second_regrouped", q.h_second_regrouped}};
}

inline nlohmann::json to_json(const SecondMoment& sm) {
  nlohmann::json out = {{"n", sm.n}, {"d", sm.d}, {"ratio", sm.ratio}, {"inverse_expectation", sm.inverse_expectation}};
  if (sm.ratio_exact) out["ratio_exact"] = to_string(*sm.ratio_exact);
  if (sm.d > 4) out["limit"] = std::sqrt(double(sm.d) / (sm.d - 4));
  return out;
}

}  // namespace rainbow::variance
