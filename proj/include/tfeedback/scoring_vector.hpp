#pragma once

#include "tfeedback/core.hpp"

#include <string>
#include <vector>

namespace tfeedback {

/// Nonincreasing positional weights s_1 >= ... >= s_m with s_1 > s_m.
class ScoringVector {
 public:
  explicit ScoringVector(std::vector<Rational> weights) : s_(std::move(weights)) {
    if (s_.size() < 2) throw InvalidArgument("scoring vector needs m >= 2");
    for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
      if (s_[i] < s_[i + 1]) {
        throw InvalidArgument("scoring vector increases at position " + std::to_string(i + 2));
      }
    }
    if (!(s_.front() > s_.back())) throw InvalidArgument("scoring vector is constant");
  }

  std::size_t m() const noexcept { return s_.size(); }
  /// Weight of 1-based position i.
  const Rational& operator[](std::size_t pos) const { return s_.at(pos - 1); }
  const std::vector<Rational>& weights() const noexcept { return s_; }

  bool operator==(const ScoringVector&) const = default;

 private:
  std::vector<Rational> s_;
};

inline ScoringVector plurality_vector(std::size_t m) {
  std::vector<Rational> s(m, Rational(0));
  s.at(0) = 1;
  return ScoringVector(std::move(s));
}

inline ScoringVector veto_vector(std::size_t m) {
  std::vector<Rational> s(m, Rational(1));
  s.at(m - 1) = 0;
  return ScoringVector(std::move(s));
}

inline ScoringVector borda_vector(std::size_t m) {
  std::vector<Rational> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = Rational(static_cast<long>(m - 1 - i));
  return ScoringVector(std::move(s));
}

}  // namespace tfeedback
