#pragma once

/**
 * @file constructions.hpp
 * @brief Profiles that no feedback-based algorithm can tell apart from their
 *        a<->b swap, the permutation families built from them, and the exact
 *        checker that certifies indistinguishability.
 *
 * Every builder returns a BlockMixture whose blocks pin only the two
 * designated candidates a and b. Mixing weights are exact rationals derived
 * from the reach vector of the feedback distribution.
 */

#include "tfeedback/rules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tfeedback {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ConstructionError : public Error {
 public:
  enum class Kind {
    BadWindow,         ///< t too large (or m too small) for the construction
    BadPositions,      ///< pinned positions violate the construction's spacing
    DegenerateWeight,  ///< mixing weight undefined or outside (0,1)
    Precondition,      ///< any other precondition (candidates, distribution kind)
  };

  ConstructionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline std::string to_string(ConstructionError::Kind kind) {
  switch (kind) {
    case ConstructionError::Kind::BadWindow: return "BadWindow";
    case ConstructionError::Kind::BadPositions: return "BadPositions";
    case ConstructionError::Kind::DegenerateWeight: return "DegenerateWeight";
    case ConstructionError::Kind::Precondition: return "Precondition";
  }
  return "Precondition";
}

// ---------------------------------------------------------------------------
// Indistinguishability
// ---------------------------------------------------------------------------

struct Discrepancy {
  Candidate queried;
  Candidate returned;
  Rational first;
  Rational second;
};

struct IndistinguishabilityReport {
  bool equal{true};
  Rational max_discrepancy{0};
  std::optional<Discrepancy> witness;
};

/// Compares the two exact feedback matrices entry by entry. The witness is
/// the first entry (row-major) attaining the largest absolute difference.
inline IndistinguishabilityReport check_indistinguishable(const PreferenceProfile& d1,
                                                          const PreferenceProfile& d2,
                                                          const FeedbackDistribution& fd) {
  if (d1.m() != d2.m()) throw DimensionMismatch(d1.m(), d2.m());
  const auto q1 = feedback_matrix(d1, fd);
  const auto q2 = feedback_matrix(d2, fd);
  IndistinguishabilityReport report;
  for (std::size_t b = 0; b < d1.m(); ++b) {
    for (std::size_t a = 0; a < d1.m(); ++a) {
      const Rational& x = q1(Candidate(b), Candidate(a));
      const Rational& y = q2(Candidate(b), Candidate(a));
      const Rational gap = abs(x - y);
      if (gap > report.max_discrepancy) {
        report.max_discrepancy = gap;
        report.witness = Discrepancy{Candidate(b), Candidate(a), x, y};
      }
    }
  }
  report.equal = report.max_discrepancy == 0;
  return report;
}

namespace detail {

inline void check_pair(std::size_t m, Candidate a, Candidate b) {
  if (a.index >= m || b.index >= m) {
    throw ConstructionError(ConstructionError::Kind::Precondition, "candidate out of range");
  }
  if (a == b) {
    throw ConstructionError(ConstructionError::Kind::Precondition,
                            "constructions need two distinct candidates");
  }
}

inline void check_fd(std::size_t m, const FeedbackDistribution& fd) {
  if (fd.m() != m) throw DimensionMismatch(m, fd.m());
}

inline Block pin(const Rational& weight, Candidate a, std::size_t pos_a, Candidate b,
                 std::size_t pos_b) {
  return Block{weight, {{a, pos_a}, {b, pos_b}}};
}

/// Two-block profile {p: a->i, b->j} + {1-p: a->ia, b->jb}.
inline PreferenceProfile two_block(std::size_t m, Candidate a, Candidate b, const Rational& p,
                                   std::size_t i, std::size_t j, std::size_t ia, std::size_t jb) {
  return PreferenceProfile::block_mixture(
      m, {pin(p, a, i, b, j), pin(Rational(1) - p, a, ia, b, jb)});
}

inline void require_open_unit(const Rational& p, const std::string& what) {
  if (p <= 0 || p >= 1) {
    throw ConstructionError(ConstructionError::Kind::DegenerateWeight,
                            what + ": mixing weight " + to_string(p) + " is outside (0,1)");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Mixing weight of D_{i,j,l}: P(l) / (P(i) - P(j) + P(l)).
inline Rational d_ijl_weight(const ReachVector& reach, std::size_t i, std::size_t j,
                             std::size_t l) {
  const Rational denom = reach[i] - reach[j] + reach[l];
  if (denom <= 0) {
    throw ConstructionError(ConstructionError::Kind::DegenerateWeight,
                            "D_ijl: P_i - P_j + P_l = " + to_string(denom) + " is not positive");
  }
  return reach[l] / denom;
}

/// With weight p: a at i, b at j. With weight 1-p: a at m, b at l. Everyone
/// else uniform. a and b stay more than t apart in both blocks.
inline PreferenceProfile build_D_ijl(std::size_t m, Candidate a, Candidate b, std::size_t i,
                                     std::size_t j, std::size_t l,
                                     const FeedbackDistribution& fd) {
  using K = ConstructionError::Kind;
  detail::check_fd(m, fd);
  detail::check_pair(m, a, b);
  const std::size_t t = fd.t();
  if (m < 4) throw ConstructionError(K::BadWindow, "D_ijl needs m >= 4");
  if (m < t + 3) {
    throw ConstructionError(K::BadWindow, "D_ijl needs t <= m-3 (no valid l or j otherwise)");
  }
  if (i < 2) throw ConstructionError(K::BadPositions, "D_ijl needs i > 1");
  if (j > m || j <= i + t) throw ConstructionError(K::BadPositions, "D_ijl needs i+t < j <= m");
  if (l < 2 || l + t >= m) throw ConstructionError(K::BadPositions, "D_ijl needs 1 < l < m-t");
  const Rational p = d_ijl_weight(reach_vector(fd), i, j, l);
  detail::require_open_unit(p, "D_ijl");
  return detail::two_block(m, a, b, p, i, j, m, l);
}

/// Uniform feedback only. With weight p: a at i, b at i+1. With weight 1-p:
/// a at m, b at m-1. p = min(i,t) / (t + min(i,t)).
inline PreferenceProfile build_D_hat(std::size_t m, Candidate a, Candidate b, std::size_t i,
                                     const FeedbackDistribution& fd) {
  using K = ConstructionError::Kind;
  detail::check_fd(m, fd);
  detail::check_pair(m, a, b);
  const std::size_t t = fd.t();
  if (!fd.same_law(uniform_feedback(m, t))) {
    throw ConstructionError(K::Precondition, "D_hat is defined for uniform feedback only");
  }
  const std::size_t lo = std::max<std::size_t>(2, m > t ? m - t : 2);
  if (i < lo || i + 1 >= m) {
    throw ConstructionError(K::BadPositions, "D_hat needs max(2, m-t) <= i < m-1");
  }
  const long k = static_cast<long>(std::min(i, t));
  const Rational p = make_rational(k, static_cast<long>(t) + k);
  return detail::two_block(m, a, b, p, i, i + 1, m, m - 1);
}

inline PreferenceProfile build_D_hat(std::size_t m, Candidate a, Candidate b, std::size_t i,
                                     std::size_t t) {
  if (t < 1 || t >= m) throw ConstructionError(ConstructionError::Kind::BadWindow, "t outside 1..m-1");
  return build_D_hat(m, a, b, i, uniform_feedback(m, t));
}

/// Three blocks: weight p with a at 2 and b at m; weight (1-p)/2 with a at 1
/// and b at m-1; weight (1-p)/2 with a at m and b at 1.
/// p = P(m-1) / (2 P(2) + P(m-1)).
inline PreferenceProfile build_three_block(std::size_t m, Candidate a, Candidate b,
                                           const FeedbackDistribution& fd) {
  using K = ConstructionError::Kind;
  detail::check_fd(m, fd);
  detail::check_pair(m, a, b);
  if (m < 4 || fd.t() + 3 > m) throw ConstructionError(K::BadWindow, "three-block needs t <= m-3");
  const auto reach = reach_vector(fd);
  const Rational denom = 2 * reach[2] + reach[m - 1];
  if (denom == 0) throw ConstructionError(K::DegenerateWeight, "three-block: zero denominator");
  const Rational p = reach[m - 1] / denom;
  detail::require_open_unit(p, "three-block");
  const Rational half_rest = (1 - p) / 2;
  return PreferenceProfile::block_mixture(m, {detail::pin(p, a, 2, b, m),
                                              detail::pin(half_rest, a, 1, b, m - 1),
                                              detail::pin(half_rest, a, m, b, 1)});
}

/// Mixing weight of the small-window Condorcet profile. Solves
/// p P(2) + (1-p) P(6) = (1-p) P(3) + p P(5); when every p solves it the
/// weight is fixed at 3/4.
inline Rational condorcet_small_t_weight(const ReachVector& reach) {
  const Rational denom = reach[2] - reach[6] + reach[3] - reach[5];
  const Rational numer = reach[3] - reach[6];
  if (denom == 0) {
    if (numer != 0) {
      throw ConstructionError(ConstructionError::Kind::DegenerateWeight,
                              "small-t Condorcet profile: no solution for p");
    }
    return Rational(3, 4);
  }
  return numer / denom;
}

/// Uniform t in {1,2}, m >= 6. With weight p: a at 2, b at 5. With weight
/// 1-p: a at 6, b at 3. Here p may equal 1.
inline PreferenceProfile build_condorcet_small_t(std::size_t m, Candidate a, Candidate b,
                                                 std::size_t t) {
  using K = ConstructionError::Kind;
  if (t < 1 || t > 2) throw ConstructionError(K::BadWindow, "small-t Condorcet profile needs t in {1,2}");
  if (m < 6) throw ConstructionError(K::BadWindow, "small-t Condorcet profile needs m >= 6");
  detail::check_pair(m, a, b);
  const auto fd = uniform_feedback(m, t);
  const Rational p = condorcet_small_t_weight(reach_vector(fd));
  if (p <= 0 || p > 1) {
    throw ConstructionError(K::DegenerateWeight, "small-t Condorcet weight " + to_string(p));
  }
  return detail::two_block(m, a, b, p, 2, 5, 6, 3);
}

/// One third D_{2,m,3}, one third a > b > rest, one third b > a > rest.
inline PreferenceProfile build_top_pair_mixture(std::size_t m, Candidate a, Candidate b,
                                                 const FeedbackDistribution& fd) {
  using K = ConstructionError::Kind;
  detail::check_fd(m, fd);
  detail::check_pair(m, a, b);
  if (m < 6 || fd.t() + 4 > m) {
    throw ConstructionError(K::BadWindow, "three-way mixture needs m >= 6 and t <= m-4");
  }
  const auto inner = build_D_ijl(m, a, b, 2, m, 3, fd);
  const Rational third(1, 3);
  PreferenceProfile::BlockMixture blocks;
  for (const auto& block : inner.blocks()) blocks.push_back(Block{block.weight * third, block.pins});
  blocks.push_back(detail::pin(third, a, 1, b, 2));
  blocks.push_back(detail::pin(third, b, 1, a, 2));
  return PreferenceProfile::block_mixture(m, std::move(blocks));
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

struct ProfileFamily {
  std::vector<PreferenceProfile> members;  // members[c] is D^c
  std::string designated_rule;
};

/// D^c averages pi∘D over uniformly random relabelings pi, using the swapped
/// profile whenever pi(b) = c. Because D pins only a and b and is uniform over
/// everyone else, the m! relabelings collapse to the m(m-1) ordered images
/// (x, y) = (pi(a), pi(b)).
///
/// For c to win D^c the caller orients the seed so that a leads b under the
/// designated rule.
inline ProfileFamily build_family(const PreferenceProfile& d, Candidate a, Candidate b,
                                  const FeedbackDistribution& fd, std::string designated_rule) {
  using K = ConstructionError::Kind;
  const std::size_t m = d.m();
  detail::check_fd(m, fd);
  detail::check_pair(m, a, b);
  if (!d.is_block_mixture()) throw ConstructionError(K::Precondition, "family seed must be a block mixture");
  for (const auto& block : d.blocks()) {
    for (const auto& [c, pos] : block.pins) {
      if (c != a && c != b) {
        throw ConstructionError(K::Precondition, "family seed may pin only a and b");
      }
    }
  }
  if (!check_indistinguishable(d, swap_profile(d, a, b), fd).equal) {
    throw ConstructionError(K::Precondition, "family seed is distinguishable from its swap");
  }

  const Rational share(1, static_cast<long>(m * (m - 1)));
  ProfileFamily family;
  family.designated_rule = std::move(designated_rule);
  family.members.reserve(m);
  for (std::size_t c = 0; c < m; ++c) {
    PreferenceProfile::BlockMixture blocks;
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = 0; y < m; ++y) {
        if (x == y) continue;
        const bool swapped = y == c;
        for (const auto& block : d.blocks()) {
          Block moved{block.weight * share, {}};
          for (const auto& [who, pos] : block.pins) {
            // Unswapped: a -> x, b -> y. Swapped seed first exchanges a and b.
            const bool is_a = (who == a) != swapped;
            moved.pins.emplace(Candidate(is_a ? x : y), pos);
          }
          blocks.push_back(std::move(moved));
        }
      }
    }
    family.members.push_back(
        merge_blocks(PreferenceProfile::block_mixture(m, std::move(blocks))));
  }
  return family;
}

/// Score difference sc_s(a, D) - sc_s(b, D).
inline Rational score_gap(const ScoringVector& s, const PreferenceProfile& d, Candidate a,
                          Candidate b) {
  const auto scores = positional_scores(s, d);
  return scores.at(a.index) - scores.at(b.index);
}

/// Difference of pairwise-victory mass: sum_x Pr[a > x] - sum_x Pr[b > x].
inline Rational condorcet_gap(const PreferenceProfile& d, Candidate a, Candidate b) {
  Rational gap = 0;
  for (std::size_t x = 0; x < d.m(); ++x) {
    if (x != a.index) gap += pairwise_pref(d, a, Candidate(x));
    if (x != b.index) gap -= pairwise_pref(d, b, Candidate(x));
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Witness search for positional rules
// ---------------------------------------------------------------------------

struct ScoreGapWitness {
  PreferenceProfile profile;
  Rational gap;
  std::string construction;  // e.g. "D_ijl(3,8,4)"
};

class OutsideValidityWindow : public Error {
 public:
  using Error::Error;
};

/// Looks for a profile D, indistinguishable from its swap of candidates 0 and
/// 1, on which s separates them. Scans D_{i,m,i+1} for i = 2..m-t-2, then
/// D_{2,i,2} for i = m-t..m-1; under uniform feedback continues with D_hat_i
/// for i = max(2,m-t)..m-2 and the three-block profile. Returns the first hit,
/// or nothing when s - s_m lies in span(s_plu, s*_t).
inline std::optional<ScoreGapWitness> score_gap_witness(const FeedbackDistribution& fd,
                                                        const ScoringVector& s) {
  const std::size_t m = fd.m();
  const std::size_t t = fd.t();
  if (s.m() != m) throw DimensionMismatch(m, s.m());
  const bool uniform = fd.same_law(uniform_feedback(m, t));
  const bool general_ok = m >= 6 && 2 * t + 4 <= m;
  if (m < 6 || (!uniform && !general_ok)) {
    throw OutsideValidityWindow("witness scan covers m >= 6 with t <= m/2-2, or uniform feedback");
  }
  const Candidate a(0);
  const Candidate b(1);
  const auto reach = reach_vector(fd);

  auto hit = [&](const PreferenceProfile& d, std::string name) -> std::optional<ScoreGapWitness> {
    Rational gap = score_gap(s, d, a, b);
    if (gap != 0) return ScoreGapWitness{d, std::move(gap), std::move(name)};
    return std::nullopt;
  };
  auto label = [](std::string name, std::initializer_list<std::size_t> args) {
    name += "(";
    bool first = true;
    for (auto v : args) {
      if (!first) name += ",";
      name += std::to_string(v);
      first = false;
    }
    return name + ")";
  };

  if (t + 4 <= m) {
    for (std::size_t i = 2; i + t + 2 <= m; ++i) {
      if (auto w = hit(build_D_ijl(m, a, b, i, m, i + 1, fd), label("D_ijl", {i, m, i + 1}))) return w;
    }
  }
  if (general_ok) {
    for (std::size_t i = m - t; i <= m - 1; ++i) {
      // P(2) = P(i) forces p = 1: a single block that is still indistinguishable.
      const Rational p = reach[2] / (2 * reach[2] - reach[i]);
      const auto d = p == 1 ? PreferenceProfile::block_mixture(m, {detail::pin(Rational(1), a, 2, b, i)})
                            : build_D_ijl(m, a, b, 2, i, 2, fd);
      if (auto w = hit(d, label("D_ijl", {2, i, 2}))) return w;
    }
  }
  if (uniform) {
    for (std::size_t i = std::max<std::size_t>(2, m - t); i + 2 <= m; ++i) {
      if (auto w = hit(build_D_hat(m, a, b, i, fd), label("D_hat", {i}))) return w;
    }
    if (t + 3 <= m) {
      if (auto w = hit(build_three_block(m, a, b, fd), "three_block")) return w;
    }
  }
  return std::nullopt;
}

}  // namespace tfeedback
