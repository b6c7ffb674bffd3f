#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace rainbow {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(std::int64_t n) {
  BigInt r = 1;
  for (std::int64_t i = 2; i <= n; ++i) r *= i;
  return r;
}

/// [x]_m = x (x-1) ... (x-m+1); zero once a factor hits zero.
inline BigInt falling(std::int64_t x, std::int64_t m) {
  BigInt r = 1;
  for (std::int64_t i = 0; i < m; ++i) r *= (x - i);
  return r;
}

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

inline BigInt ipow(BigInt base, std::int64_t e) {
  return boost::multiprecision::pow(base, static_cast<unsigned>(e));
}

inline Rational rpow(const Rational& base, std::int64_t e) {
  if (e < 0) return rpow(Rational(1) / base, -e);
  Rational r = 1;
  for (std::int64_t i = 0; i < e; ++i) r *= base;
  return r;
}

/// "p/q" (or "p" for integers), always in lowest terms.
inline std::string to_string(const Rational& r) {
  const auto& num = boost::multiprecision::numerator(r);
  const auto& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

}  // namespace rainbow
