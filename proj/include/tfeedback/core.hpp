#pragma once

/**
 * @file core.hpp
 * @brief Shared vocabulary: exact rationals, candidates, square matrices and
 *        the exception types thrown across the library.
 */

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfeedback {

/// Exact rational number. Canonical form is maintained by GMP arithmetic.
using Rational = mpq_class;

/// A candidate, identified by a dense index in 0..m-1.
struct Candidate {
  std::size_t index{0};

  constexpr Candidate() = default;
  constexpr explicit Candidate(std::size_t i) : index(i) {}

  constexpr auto operator<=>(const Candidate&) const = default;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two objects that must agree on the candidate count do not.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected m=" + std::to_string(expected) +
              ", got m=" + std::to_string(got)) {}
};

/// An argument is outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The reach vector of a feedback distribution is not nonincreasing, so it
/// cannot serve as a scoring vector.
class NonMonotone : public Error {
 public:
  explicit NonMonotone(std::size_t position)
      : Error("reach vector is not nonincreasing at position " +
              std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// Parses "p/q", an integer, or a plain decimal such as "-0.125".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational {
    throw InvalidArgument("not a rational number: '" + s + "'");
  };
  if (s.empty()) return fail();

  const auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rational r;
    if (r.set_str(s, 10) != 0) return fail();
    if (r.get_den() == 0) return fail();
    r.canonicalize();
    return r;
  }

  std::size_t start = 0;
  bool negative = false;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    start = 1;
  }
  std::string digits = s.substr(start, dot - start) + s.substr(dot + 1);
  const std::size_t frac_len = s.size() - dot - 1;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    return fail();
  }
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  Rational r(num, den);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

/// num/den in lowest terms. The two-argument mpq_class constructor does not
/// canonicalize, and non-canonical values compare unequal.
inline Rational make_rational(long num, long den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense row-major square matrix. Indices are 0-based.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, const T& fill = T{})
      : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const {
    return data_[row * n_ + col];
  }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_{0};
  std::vector<T> data_;
};

}  // namespace tfeedback
