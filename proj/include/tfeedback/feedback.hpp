#pragma once

/**
 * @file feedback.hpp
 * @brief t-improvement feedback: response distributions, reach
 *        probabilities, the exact feedback matrix of a profile, and
 *        per-voter response sampling.
 *
 * When a voter is asked about the candidate at position i > 1, they answer
 * with the candidate at position j, i-t <= j < i, with probability p(i, j).
 * A voter asked about their top candidate answers with that candidate.
 */

#include "tfeedback/rankings.hpp"
#include "tfeedback/scoring_vector.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tfeedback {

enum class FeedbackKind { Uniform, Linear, Exponential, Custom };

inline std::string to_string(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::Uniform: return "uniform";
    case FeedbackKind::Linear: return "linear";
    case FeedbackKind::Exponential: return "exponential";
    case FeedbackKind::Custom: return "custom";
  }
  return "custom";
}

/// The response law p(i, j), indexed by 1-based positions.
class FeedbackDistribution {
 public:
  /// Validates the support and normalisation constraints. `probs` is m x m
  /// with entry (i-1, j-1) = p(i, j).
  FeedbackDistribution(std::size_t m, std::size_t t, SquareMatrix<Rational> probs,
                       FeedbackKind kind = FeedbackKind::Custom,
                       std::optional<Rational> lambda = std::nullopt)
      : m_(m), t_(t), p_(std::move(probs)), kind_(kind), lambda_(std::move(lambda)) {
    if (m < 2) throw InvalidArgument("feedback needs m >= 2");
    if (t < 1 || t > m - 1) {
      throw InvalidArgument("window t=" + std::to_string(t) + " outside 1..m-1 for m=" +
                            std::to_string(m));
    }
    if (p_.size() != m) throw DimensionMismatch(m, p_.size());
    for (std::size_t j = 1; j <= m; ++j) {
      if (p(1, j) != (j == 1 ? 1 : 0)) throw InvalidArgument("row 1 must be the unit vector e_1");
    }
    for (std::size_t i = 2; i <= m; ++i) {
      Rational row_sum = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        const Rational& v = p(i, j);
        if (v < 0) throw InvalidArgument("negative response probability");
        const bool in_window = j < i && i - j <= t;
        if (!in_window && v != 0) {
          throw InvalidArgument("p(" + std::to_string(i) + "," + std::to_string(j) +
                                ") lies outside the t-above neighbourhood");
        }
        row_sum += v;
      }
      if (row_sum != 1) {
        throw InvalidArgument("row " + std::to_string(i) + " sums to " + to_string(row_sum));
      }
    }
    approx_.resize(m * m);
    for (std::size_t i = 1; i <= m; ++i) {
      for (std::size_t j = 1; j <= m; ++j) approx_[(i - 1) * m + (j - 1)] = p(i, j).get_d();
    }
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t t() const noexcept { return t_; }
  FeedbackKind kind() const noexcept { return kind_; }
  const std::optional<Rational>& lambda() const noexcept { return lambda_; }

  /// p(i, j) for 1-based positions.
  const Rational& p(std::size_t i, std::size_t j) const { return p_(i - 1, j - 1); }
  double p_approx(std::size_t i, std::size_t j) const { return approx_[(i - 1) * m_ + (j - 1)]; }

  const SquareMatrix<Rational>& matrix() const noexcept { return p_; }

  /// Width of the response window for a voter queried at position i > 1.
  std::size_t window(std::size_t i) const { return std::min(t_, i - 1); }

  /// Equality of the response law; the kind label is ignored.
  bool same_law(const FeedbackDistribution& other) const {
    return m_ == other.m_ && t_ == other.t_ && p_ == other.p_;
  }

 private:
  std::size_t m_;
  std::size_t t_;
  SquareMatrix<Rational> p_;
  FeedbackKind kind_;
  std::optional<Rational> lambda_;
  std::vector<double> approx_;
};

namespace detail {

inline void check_window(std::size_t m, std::size_t t) {
  if (m < 2 || t < 1 || t > m - 1) {
    throw InvalidArgument("window t=" + std::to_string(t) + " outside 1..m-1 for m=" +
                          std::to_string(m));
  }
}

/// Builds a distribution whose row i puts weight proportional to
/// raw(w, d) on distance d = 1..w, where w is the row's window width.
template <typename RawWeight>
SquareMatrix<Rational> window_law(std::size_t m, std::size_t t, RawWeight raw) {
  SquareMatrix<Rational> probs(m, Rational(0));
  probs(0, 0) = 1;
  for (std::size_t i = 2; i <= m; ++i) {
    const std::size_t w = std::min(t, i - 1);
    Rational total = 0;
    for (std::size_t d = 1; d <= w; ++d) total += raw(w, d);
    for (std::size_t d = 1; d <= w; ++d) probs(i - 1, i - d - 1) = raw(w, d) / total;
  }
  return probs;
}

}  // namespace detail

inline FeedbackDistribution uniform_feedback(std::size_t m, std::size_t t) {
  detail::check_window(m, t);
  auto probs = detail::window_law(m, t, [](std::size_t, std::size_t) { return Rational(1); });
  return FeedbackDistribution(m, t, std::move(probs), FeedbackKind::Uniform);
}

/// Weight of distance d within a window of width w is proportional to w-d+1.
inline FeedbackDistribution linear_decay_feedback(std::size_t m, std::size_t t) {
  detail::check_window(m, t);
  auto probs = detail::window_law(
      m, t, [](std::size_t w, std::size_t d) { return Rational(static_cast<long>(w - d + 1)); });
  return FeedbackDistribution(m, t, std::move(probs), FeedbackKind::Linear);
}

/// Weight of distance d is proportional to lambda^(d-1), 0 < lambda < 1.
inline FeedbackDistribution exp_decay_feedback(std::size_t m, std::size_t t,
                                               const Rational& lambda = Rational(1, 2)) {
  detail::check_window(m, t);
  if (lambda <= 0 || lambda >= 1) throw InvalidArgument("decay lambda must lie in (0,1)");
  auto probs = detail::window_law(m, t, [&lambda](std::size_t, std::size_t d) {
    Rational v = 1;
    for (std::size_t k = 1; k < d; ++k) v *= lambda;
    return v;
  });
  return FeedbackDistribution(m, t, std::move(probs), FeedbackKind::Exponential, lambda);
}

/// Explicit rows: rows[i][j] = p(i, j) for i >= 2. Missing entries are zero.
inline FeedbackDistribution custom_feedback(
    std::size_t m, std::size_t t,
    const std::map<std::size_t, std::map<std::size_t, Rational>>& rows) {
  detail::check_window(m, t);
  SquareMatrix<Rational> probs(m, Rational(0));
  probs(0, 0) = 1;
  for (const auto& [i, row] : rows) {
    if (i < 2 || i > m) throw InvalidArgument("custom row index out of range");
    for (const auto& [j, v] : row) {
      if (j < 1 || j > m) throw InvalidArgument("custom column index out of range");
      probs(i - 1, j - 1) = v;
    }
  }
  return FeedbackDistribution(m, t, std::move(probs), FeedbackKind::Custom);
}

// ---------------------------------------------------------------------------
// Reach probabilities
// ---------------------------------------------------------------------------

/// P(i): total probability mass with which position i is returned from the
/// positions below it. Indexed by 1-based position.
class ReachVector {
 public:
  explicit ReachVector(std::vector<Rational> values) : values_(std::move(values)) {}

  std::size_t m() const noexcept { return values_.size(); }
  const Rational& operator[](std::size_t pos) const { return values_.at(pos - 1); }
  const std::vector<Rational>& values() const noexcept { return values_; }

  Rational total() const {
    Rational s = 0;
    for (const auto& v : values_) s += v;
    return s;
  }

 private:
  std::vector<Rational> values_;
};

inline ReachVector reach_vector(const FeedbackDistribution& fd) {
  const std::size_t m = fd.m();
  std::vector<Rational> out(m, Rational(0));
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= std::min(m, i + fd.t()); ++j) out[i - 1] += fd.p(j, i);
  }
  return ReachVector(std::move(out));
}

/// True iff P(i)/P(i+1) = (m-i)/(m-i-1) for every i in 2..m-2. This is the
/// one family of distributions under which Borda lies in the learnable span.
inline bool ratio_condition(const FeedbackDistribution& fd) {
  const auto reach = reach_vector(fd);
  const std::size_t m = fd.m();
  for (std::size_t i = 2; i + 2 <= m; ++i) {
    if (reach[i + 1] == 0) return false;
    const Rational lhs = reach[i] / reach[i + 1];
    const Rational rhs(static_cast<long>(m - i), static_cast<long>(m - i - 1));
    if (lhs != rhs) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Feedback matrix
// ---------------------------------------------------------------------------

/// Q(b, a) = Pr[querying b returns a]. The diagonal holds Pr[a is ranked first].
class FeedbackMatrix {
 public:
  explicit FeedbackMatrix(SquareMatrix<Rational> q) : q_(std::move(q)) {}

  std::size_t m() const noexcept { return q_.size(); }

  const Rational& operator()(Candidate queried, Candidate returned) const {
    return q_(queried.index, returned.index);
  }

  const SquareMatrix<Rational>& matrix() const noexcept { return q_; }

  Rational row_sum(Candidate queried) const {
    Rational s = 0;
    for (std::size_t a = 0; a < m(); ++a) s += q_(queried.index, a);
    return s;
  }

  Rational trace() const {
    Rational s = 0;
    for (std::size_t a = 0; a < m(); ++a) s += q_(a, a);
    return s;
  }

  bool operator==(const FeedbackMatrix&) const = default;

 private:
  SquareMatrix<Rational> q_;
};

/// The exact feedback matrix of profile D under fd.
inline FeedbackMatrix feedback_matrix(const PreferenceProfile& d, const FeedbackDistribution& fd) {
  if (d.m() != fd.m()) throw DimensionMismatch(fd.m(), d.m());
  const std::size_t m = d.m();
  const std::size_t t = fd.t();
  SquareMatrix<Rational> q(m, Rational(0));
  for (std::size_t a = 0; a < m; ++a) {
    q(a, a) = position_marginal(d, Candidate(a))[0];
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto joint = joint_position(d, Candidate(a), Candidate(b));
      Rational total = 0;
      for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = i + 1; j <= std::min(m, i + t); ++j) {
          const Rational& pji = fd.p(j, i);
          if (pji != 0) total += pji * joint(i - 1, j - 1);
        }
      }
      q(b, a) = total;
    }
  }
  return FeedbackMatrix(std::move(q));
}

/// One voter's response when asked about `queried`.
template <typename Urbg>
Candidate sample_feedback(const Ranking& sigma, const FeedbackDistribution& fd,
                          Candidate queried, Urbg& rng) {
  if (sigma.m() != fd.m()) throw DimensionMismatch(fd.m(), sigma.m());
  const std::size_t i = sigma.position_of(queried);
  if (i == 1) return queried;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  std::size_t last = i - 1;
  for (std::size_t j = i - 1; j >= i - fd.window(i); --j) {
    const double pij = fd.p_approx(i, j);
    if (pij <= 0.0) continue;
    last = j;
    u -= pij;
    if (u < 0.0) return sigma.at(j);
  }
  // Rounding left a sliver of mass; it belongs to the last reachable slot.
  return sigma.at(last);
}

/// s*_t = (P(1), ..., P(m)). Throws NonMonotone when P increases somewhere.
inline ScoringVector s_star(const FeedbackDistribution& fd) {
  const auto reach = reach_vector(fd);
  for (std::size_t i = 1; i < fd.m(); ++i) {
    if (reach[i] < reach[i + 1]) throw NonMonotone(i + 1);
  }
  return ScoringVector(reach.values());
}

}  // namespace tfeedback
