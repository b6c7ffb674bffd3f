#pragma once

#include <stdexcept>
#include <string>

namespace rainbow {

/// Invalid model parameters (odd n*d, wrong edge count, d out of range...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive routine was asked for an instance beyond its size bound.
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

/// Point outside the domain of a function (e.g. outside the triangle T).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A divergent series or an undefined limit was requested.
struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace rainbow
