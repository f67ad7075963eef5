#pragma once

/**
 * @file rules.hpp
 * @brief Voting rules over exact profiles and over feedback observations:
 *        positional scores, scores recovered from a feedback matrix,
 *        Condorcet winners, Copeland and Borda.
 *
 * Winner extraction always breaks ties towards the lowest candidate index.
 */

#include "tfeedback/feedback.hpp"

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tfeedback {

// ---------------------------------------------------------------------------
// Majority matrices
// ---------------------------------------------------------------------------

/// Pairwise weights w(a, b). With Rational entries w(a, b) = Pr[a > b];
/// with integer entries w(a, b) counts observed wins of a over b.
template <typename Weight>
class MajorityMatrix {
 public:
  explicit MajorityMatrix(std::size_t m) : w_(m, Weight(0)) {}
  explicit MajorityMatrix(SquareMatrix<Weight> w) : w_(std::move(w)) {
    for (std::size_t a = 0; a < w_.size(); ++a) {
      if (w_(a, a) != 0) throw InvalidArgument("majority matrix diagonal must be zero");
    }
  }

  std::size_t m() const noexcept { return w_.size(); }
  const Weight& operator()(Candidate a, Candidate b) const { return w_(a.index, b.index); }
  Weight& at(Candidate a, Candidate b) { return w_(a.index, b.index); }

  /// a strictly beats b.
  bool beats(Candidate a, Candidate b) const { return (*this)(a, b) > (*this)(b, a); }

 private:
  SquareMatrix<Weight> w_;
};

using ExactMajority = MajorityMatrix<Rational>;
using CountMajority = MajorityMatrix<std::uint64_t>;

inline ExactMajority majority_matrix(const PreferenceProfile& d) {
  SquareMatrix<Rational> w(d.m(), Rational(0));
  for (std::size_t a = 0; a < d.m(); ++a) {
    for (std::size_t b = a + 1; b < d.m(); ++b) {
      w(a, b) = pairwise_pref(d, Candidate(a), Candidate(b));
      w(b, a) = 1 - w(a, b);
    }
  }
  return ExactMajority(std::move(w));
}

// ---------------------------------------------------------------------------
// Winner extraction
// ---------------------------------------------------------------------------

/// Index of the first maximum.
template <typename T>
Candidate argmax(std::span<const T> scores) {
  if (scores.empty()) throw InvalidArgument("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return Candidate(best);
}

template <typename T>
Candidate argmax(const std::vector<T>& scores) {
  return argmax(std::span<const T>(scores));
}

/// True when exactly one candidate attains the maximum.
template <typename T>
bool unique_max(const std::vector<T>& scores) {
  const auto best = argmax(scores);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (c != best.index && scores[c] == scores[best.index]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Positional scoring
// ---------------------------------------------------------------------------

/// sc_s(a, D) = sum_i Pr[a at position i] * s_i.
inline std::vector<Rational> positional_scores(const ScoringVector& s, const PreferenceProfile& d) {
  if (s.m() != d.m()) throw DimensionMismatch(d.m(), s.m());
  std::vector<Rational> out(d.m(), Rational(0));
  for (std::size_t a = 0; a < d.m(); ++a) {
    const auto marginal = position_marginal(d, Candidate(a));
    for (std::size_t i = 1; i <= d.m(); ++i) out[a] += marginal[i - 1] * s[i];
  }
  return out;
}

/// Scores of lambda1 * s_plu + lambda2 * s*_t, read off the feedback matrix:
/// the plurality score of a is Q(a, a) and the s*_t score of a is the column
/// sum of Q over queries b != a.
inline std::vector<Rational> scores_from_feedback(const FeedbackMatrix& q, const Rational& lambda1,
                                                  const Rational& lambda2) {
  const std::size_t m = q.m();
  std::vector<Rational> out(m, Rational(0));
  for (std::size_t a = 0; a < m; ++a) {
    Rational reached = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (b != a) reached += q(Candidate(b), Candidate(a));
    }
    out[a] = lambda1 * q(Candidate(a), Candidate(a)) + lambda2 * reached;
  }
  return out;
}

/// Coefficients (lambda1, lambda2) with s - s_m * 1 = lambda1 * s_plu + lambda2 * s*_t,
/// or nothing when s (up to an additive constant) is outside the learnable span.
struct SpanCoefficients {
  Rational lambda1;
  Rational lambda2;
};

inline std::optional<SpanCoefficients> learnable_span_coefficients(const ScoringVector& s,
                                                                   const FeedbackDistribution& fd) {
  if (s.m() != fd.m()) throw DimensionMismatch(fd.m(), s.m());
  const std::size_t m = fd.m();
  const auto reach = reach_vector(fd);
  const Rational& floor = s[m];
  std::optional<Rational> lambda2;
  for (std::size_t i = 2; i < m; ++i) {
    const Rational target = s[i] - floor;
    if (reach[i] == 0) {
      if (target != 0) return std::nullopt;
      continue;
    }
    const Rational ratio = target / reach[i];
    if (!lambda2) {
      lambda2 = ratio;
    } else if (*lambda2 != ratio) {
      return std::nullopt;
    }
  }
  const Rational l2 = lambda2.value_or(Rational(0));
  return SpanCoefficients{s[1] - floor - l2 * reach[1], l2};
}

struct BordaFromFeedback {
  std::vector<Rational> scores;
  /// The recovered scores equal the true Borda scores only when this holds.
  bool valid{false};
};

/// Borda scores recovered from feedback by treating Borda as a member of
/// span(s_plu, s*_t): score(a) = sum_{b != a} Q(b, a) / c + (m - 1 - P(1) / c) * Q(a, a)
/// where c = P(m-1) is the proportionality constant of P(i) = c * (m - i).
/// With c = 1 this is the textbook identity. The vector is always returned;
/// `valid` reports whether the ratio condition holds for fd.
inline BordaFromFeedback borda_from_feedback(const FeedbackMatrix& q, const FeedbackDistribution& fd) {
  if (q.m() != fd.m()) throw DimensionMismatch(fd.m(), q.m());
  const std::size_t m = fd.m();
  const auto reach = reach_vector(fd);
  Rational scale = 1;
  if (m >= 3 && reach[m - 1] != 0) scale = reach[m - 1];
  const Rational plurality_coeff = Rational(static_cast<long>(m - 1)) - reach[1] / scale;
  auto scores = scores_from_feedback(q, plurality_coeff, Rational(1) / scale);
  return {std::move(scores), ratio_condition(fd)};
}

// ---------------------------------------------------------------------------
// Pairwise rules
// ---------------------------------------------------------------------------

/// The candidate that strictly beats every other candidate, if any.
template <typename Weight>
std::optional<Candidate> condorcet_winner(const MajorityMatrix<Weight>& w) {
  for (std::size_t a = 0; a < w.m(); ++a) {
    bool wins_all = true;
    for (std::size_t b = 0; b < w.m() && wins_all; ++b) {
      if (a != b && !w.beats(Candidate(a), Candidate(b))) wins_all = false;
    }
    if (wins_all) return Candidate(a);
  }
  return std::nullopt;
}

inline std::optional<Candidate> condorcet_winner(const PreferenceProfile& d) {
  return condorcet_winner(majority_matrix(d));
}

/// Number of strict pairwise victories; ties count zero.
template <typename Weight>
std::vector<std::size_t> copeland_scores(const MajorityMatrix<Weight>& w) {
  std::vector<std::size_t> out(w.m(), 0);
  for (std::size_t a = 0; a < w.m(); ++a) {
    for (std::size_t b = 0; b < w.m(); ++b) {
      if (a != b && w.beats(Candidate(a), Candidate(b))) ++out[a];
    }
  }
  return out;
}

/// Borda score as the sum of pairwise win probabilities. Exact form only.
template <typename Weight>
  requires std::same_as<Weight, Rational>
std::vector<Rational> borda_scores_pairwise(const MajorityMatrix<Weight>& w) {
  std::vector<Rational> out(w.m(), Rational(0));
  for (std::size_t a = 0; a < w.m(); ++a) {
    for (std::size_t b = 0; b < w.m(); ++b) {
      if (a != b) out[a] += w(Candidate(a), Candidate(b));
    }
  }
  return out;
}

}  // namespace tfeedback
