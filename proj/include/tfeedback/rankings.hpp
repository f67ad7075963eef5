#pragma once

/**
 * @file rankings.hpp
 * @brief Rankings, exact preference profiles and ranking samplers.
 *
 * A PreferenceProfile is an exact distribution over rankings, held either as
 * an explicit table of (ranking, weight) pairs or as a mixture of blocks.
 * A block pins a few candidates to fixed positions and orders every other
 * candidate uniformly at random over the remaining positions. Positions are
 * 1-based throughout the public interface.
 */

#include "tfeedback/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tfeedback {

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

/// A strict total order over m candidates; position i (1-based) holds at(i).
class Ranking {
 public:
  Ranking() = default;

  explicit Ranking(std::vector<Candidate> order) : order_(std::move(order)) {
    position_.assign(order_.size(), 0);
    std::vector<bool> seen(order_.size(), false);
    for (std::size_t pos = 0; pos < order_.size(); ++pos) {
      const std::size_t c = order_[pos].index;
      if (c >= order_.size() || seen[c]) {
        throw InvalidArgument("ranking is not a permutation of 0..m-1");
      }
      seen[c] = true;
      position_[c] = pos + 1;
    }
  }

  static Ranking from_indices(std::span<const std::size_t> indices) {
    std::vector<Candidate> order;
    order.reserve(indices.size());
    for (auto i : indices) order.emplace_back(i);
    return Ranking(std::move(order));
  }

  static Ranking identity(std::size_t m) {
    std::vector<Candidate> order;
    order.reserve(m);
    for (std::size_t i = 0; i < m; ++i) order.emplace_back(i);
    return Ranking(std::move(order));
  }

  std::size_t m() const noexcept { return order_.size(); }

  /// Candidate at 1-based position `pos`.
  Candidate at(std::size_t pos) const { return order_.at(pos - 1); }

  /// 1-based position of candidate `c`.
  std::size_t position_of(Candidate c) const {
    if (c.index >= order_.size()) {
      throw InvalidArgument("candidate " + std::to_string(c.index) +
                            " out of range for m=" + std::to_string(order_.size()));
    }
    return position_[c.index];
  }

  bool prefers(Candidate a, Candidate b) const { return position_of(a) < position_of(b); }

  const std::vector<Candidate>& order() const noexcept { return order_; }

  bool operator==(const Ranking& other) const { return order_ == other.order_; }
  auto operator<=>(const Ranking& other) const { return order_ <=> other.order_; }

 private:
  std::vector<Candidate> order_;
  std::vector<std::size_t> position_;  // indexed by candidate
};

inline std::size_t position_of(const Ranking& r, Candidate c) { return r.position_of(c); }

// ---------------------------------------------------------------------------
// Permutations of candidates
// ---------------------------------------------------------------------------

/// A bijection on candidates; image[c] is where c is sent.
class CandidatePermutation {
 public:
  explicit CandidatePermutation(std::vector<Candidate> image) : image_(std::move(image)) {
    std::vector<bool> hit(image_.size(), false);
    for (auto c : image_) {
      if (c.index >= image_.size() || hit[c.index]) {
        throw InvalidArgument("candidate map is not a bijection");
      }
      hit[c.index] = true;
    }
  }

  static CandidatePermutation identity(std::size_t m) {
    return CandidatePermutation(Ranking::identity(m).order());
  }

  static CandidatePermutation transposition(std::size_t m, Candidate a, Candidate b) {
    auto image = Ranking::identity(m).order();
    if (a.index >= m || b.index >= m) throw InvalidArgument("candidate out of range");
    std::swap(image[a.index], image[b.index]);
    return CandidatePermutation(std::move(image));
  }

  std::size_t m() const noexcept { return image_.size(); }
  Candidate operator()(Candidate c) const { return image_.at(c.index); }

  CandidatePermutation inverse() const {
    std::vector<Candidate> inv(image_.size());
    for (std::size_t c = 0; c < image_.size(); ++c) inv[image_[c].index] = Candidate(c);
    return CandidatePermutation(std::move(inv));
  }

 private:
  std::vector<Candidate> image_;
};

/// The ranking obtained by renaming every candidate c of `r` to pi(c).
inline Ranking apply(const CandidatePermutation& pi, const Ranking& r) {
  if (pi.m() != r.m()) throw DimensionMismatch(r.m(), pi.m());
  std::vector<Candidate> order;
  order.reserve(r.m());
  for (auto c : r.order()) order.push_back(pi(c));
  return Ranking(std::move(order));
}

// ---------------------------------------------------------------------------
// Block
// ---------------------------------------------------------------------------

/// A mixture component: pinned candidates sit at fixed positions and the
/// remaining candidates are ordered uniformly over the free positions.
struct Block {
  Rational weight;
  std::map<Candidate, std::size_t> pins;  // candidate -> 1-based position

  bool operator==(const Block&) const = default;
};

namespace detail {

inline void validate_block(const Block& block, std::size_t m) {
  if (block.weight < 0 || block.weight > 1) {
    throw InvalidArgument("block weight " + to_string(block.weight) + " outside [0,1]");
  }
  std::vector<bool> used(m + 1, false);
  for (const auto& [c, pos] : block.pins) {
    if (c.index >= m) throw InvalidArgument("pinned candidate out of range");
    if (pos < 1 || pos > m) throw InvalidArgument("pinned position out of range");
    if (used[pos]) throw InvalidArgument("two candidates pinned to position " + std::to_string(pos));
    used[pos] = true;
  }
}

inline std::vector<std::size_t> free_positions(const Block& block, std::size_t m) {
  std::vector<bool> used(m + 1, false);
  for (const auto& [c, pos] : block.pins) used[pos] = true;
  std::vector<std::size_t> out;
  for (std::size_t pos = 1; pos <= m; ++pos) {
    if (!used[pos]) out.push_back(pos);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PreferenceProfile
// ---------------------------------------------------------------------------

/// An exact distribution over rankings of m candidates.
class PreferenceProfile {
 public:
  using Explicit = std::map<Ranking, Rational>;
  using BlockMixture = std::vector<Block>;

  /// Explicit form. Duplicate rankings must already be merged (map keys).
  static PreferenceProfile explicit_form(std::size_t m, Explicit weights) {
    Rational total = 0;
    for (const auto& [r, w] : weights) {
      if (r.m() != m) throw DimensionMismatch(m, r.m());
      if (w < 0) throw InvalidArgument("negative ranking weight");
      total += w;
    }
    if (total != 1) {
      throw InvalidArgument("profile weights sum to " + to_string(total) + ", not 1");
    }
    return PreferenceProfile(m, std::move(weights));
  }

  static PreferenceProfile explicit_form(
      std::size_t m, const std::vector<std::pair<Ranking, Rational>>& entries) {
    Explicit weights;
    for (const auto& [r, w] : entries) weights[r] += w;
    return explicit_form(m, std::move(weights));
  }

  static PreferenceProfile block_mixture(std::size_t m, BlockMixture blocks) {
    Rational total = 0;
    for (const auto& block : blocks) {
      detail::validate_block(block, m);
      total += block.weight;
    }
    if (total != 1) {
      throw InvalidArgument("block weights sum to " + to_string(total) + ", not 1");
    }
    return PreferenceProfile(m, std::move(blocks));
  }

  std::size_t m() const noexcept { return m_; }
  bool is_explicit() const noexcept { return std::holds_alternative<Explicit>(form_); }
  bool is_block_mixture() const noexcept { return std::holds_alternative<BlockMixture>(form_); }

  const Explicit& explicit_weights() const { return std::get<Explicit>(form_); }
  const BlockMixture& blocks() const { return std::get<BlockMixture>(form_); }

  bool operator==(const PreferenceProfile&) const = default;

 private:
  PreferenceProfile(std::size_t m, Explicit e) : m_(m), form_(std::move(e)) {}
  PreferenceProfile(std::size_t m, BlockMixture b) : m_(m), form_(std::move(b)) {}

  std::size_t m_{0};
  std::variant<Explicit, BlockMixture> form_;
};

namespace detail {

inline void check_candidate(const PreferenceProfile& d, Candidate c) {
  if (c.index >= d.m()) {
    throw InvalidArgument("candidate " + std::to_string(c.index) +
                          " out of range for m=" + std::to_string(d.m()));
  }
}

}  // namespace detail

/// Distribution of pi∘sigma for sigma ~ D.
inline PreferenceProfile permute_profile(const PreferenceProfile& d,
                                         const CandidatePermutation& pi) {
  if (pi.m() != d.m()) throw DimensionMismatch(d.m(), pi.m());
  if (d.is_explicit()) {
    PreferenceProfile::Explicit out;
    for (const auto& [r, w] : d.explicit_weights()) out[apply(pi, r)] += w;
    return PreferenceProfile::explicit_form(d.m(), std::move(out));
  }
  PreferenceProfile::BlockMixture out;
  out.reserve(d.blocks().size());
  for (const auto& block : d.blocks()) {
    Block moved{block.weight, {}};
    for (const auto& [c, pos] : block.pins) moved.pins.emplace(pi(c), pos);
    out.push_back(std::move(moved));
  }
  return PreferenceProfile::block_mixture(d.m(), std::move(out));
}

/// D with candidates a and b exchanged in every ranking.
inline PreferenceProfile swap_profile(const PreferenceProfile& d, Candidate a, Candidate b) {
  detail::check_candidate(d, a);
  detail::check_candidate(d, b);
  if (a == b) throw InvalidArgument("swap_profile requires two distinct candidates");
  return permute_profile(d, CandidatePermutation::transposition(d.m(), a, b));
}

/// Entry i-1 is Pr[c sits at position i].
inline std::vector<Rational> position_marginal(const PreferenceProfile& d, Candidate c) {
  detail::check_candidate(d, c);
  const std::size_t m = d.m();
  std::vector<Rational> out(m, Rational(0));
  if (d.is_explicit()) {
    for (const auto& [r, w] : d.explicit_weights()) out[r.position_of(c) - 1] += w;
    return out;
  }
  for (const auto& block : d.blocks()) {
    if (auto it = block.pins.find(c); it != block.pins.end()) {
      out[it->second - 1] += block.weight;
      continue;
    }
    const auto free = detail::free_positions(block, m);
    const Rational share = block.weight / Rational(free.size());
    for (auto pos : free) out[pos - 1] += share;
  }
  return out;
}

/// Entry (i-1, j-1) is Pr[x at position i and y at position j].
inline SquareMatrix<Rational> joint_position(const PreferenceProfile& d, Candidate x,
                                             Candidate y) {
  detail::check_candidate(d, x);
  detail::check_candidate(d, y);
  if (x == y) throw InvalidArgument("joint_position requires two distinct candidates");
  const std::size_t m = d.m();
  SquareMatrix<Rational> out(m, Rational(0));
  if (d.is_explicit()) {
    for (const auto& [r, w] : d.explicit_weights()) {
      out(r.position_of(x) - 1, r.position_of(y) - 1) += w;
    }
    return out;
  }
  for (const auto& block : d.blocks()) {
    const auto px = block.pins.find(x);
    const auto py = block.pins.find(y);
    const bool x_pinned = px != block.pins.end();
    const bool y_pinned = py != block.pins.end();
    if (x_pinned && y_pinned) {
      out(px->second - 1, py->second - 1) += block.weight;
      continue;
    }
    const auto free = detail::free_positions(block, m);
    const Rational f(free.size());
    if (x_pinned) {
      const Rational share = block.weight / f;
      for (auto q : free) out(px->second - 1, q - 1) += share;
    } else if (y_pinned) {
      const Rational share = block.weight / f;
      for (auto q : free) out(q - 1, py->second - 1) += share;
    } else {
      const Rational share = block.weight / (f * (f - 1));
      for (auto q : free) {
        for (auto r : free) {
          if (q != r) out(q - 1, r - 1) += share;
        }
      }
    }
  }
  return out;
}

/// Pr[a is ranked above b].
inline Rational pairwise_pref(const PreferenceProfile& d, Candidate a, Candidate b) {
  if (a == b) throw InvalidArgument("pairwise_pref requires two distinct candidates");
  const auto joint = joint_position(d, a, b);
  Rational total = 0;
  for (std::size_t i = 0; i < d.m(); ++i) {
    for (std::size_t j = i + 1; j < d.m(); ++j) total += joint(i, j);
  }
  return total;
}

/// Merges blocks with identical pins and drops zero-weight blocks. The
/// distribution is unchanged.
inline PreferenceProfile merge_blocks(const PreferenceProfile& d) {
  if (!d.is_block_mixture()) return d;
  std::map<std::map<Candidate, std::size_t>, Rational> merged;
  for (const auto& block : d.blocks()) merged[block.pins] += block.weight;
  PreferenceProfile::BlockMixture out;
  for (auto& [pins, w] : merged) {
    if (w != 0) out.push_back(Block{w, pins});
  }
  return PreferenceProfile::block_mixture(d.m(), std::move(out));
}

// ---------------------------------------------------------------------------
// Sampled populations
// ---------------------------------------------------------------------------

struct SampledPopulation {
  std::vector<Ranking> voters;
  std::uint64_t seed{0};

  std::size_t m() const { return voters.empty() ? 0 : voters.front().m(); }
  std::size_t n() const { return voters.size(); }
};

using Rng = std::mt19937_64;

namespace detail {

inline void check_population_args(std::size_t m, std::size_t n) {
  if (m < 1) throw InvalidArgument("need at least one candidate");
  if (n < 1) throw InvalidArgument("need at least one voter");
}

inline Ranking draw_uniform_ranking(std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return Ranking::from_indices(idx);
}

/// Repeated insertion: the k-th item of the centre (k = 1..m) is inserted at
/// slot j in 1..k with probability proportional to phi^(k-j).
inline Ranking draw_mallows_ranking(const Ranking& centre, double phi, Rng& rng) {
  const std::size_t m = centre.m();
  std::vector<std::size_t> current;
  current.reserve(m);
  std::vector<double> weight(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 1; k <= m; ++k) {
    double total = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      weight[j - 1] = std::pow(phi, static_cast<double>(k - j));
      total += weight[j - 1];
    }
    double u = unit(rng) * total;
    std::size_t slot = k;
    for (std::size_t j = 1; j <= k; ++j) {
      u -= weight[j - 1];
      if (u < 0.0) {
        slot = j;
        break;
      }
    }
    current.insert(current.begin() + static_cast<std::ptrdiff_t>(slot - 1),
                   centre.at(k).index);
  }
  return Ranking::from_indices(current);
}

inline Ranking draw_plackett_luce_ranking(std::span<const double> utilities, Rng& rng) {
  const std::size_t m = utilities.size();
  std::vector<std::size_t> remaining(m);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> order;
  order.reserve(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!remaining.empty()) {
    double total = 0.0;
    for (auto c : remaining) total += utilities[c];
    double u = unit(rng) * total;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      u -= utilities[remaining[k]];
      if (u < 0.0) {
        chosen = k;
        break;
      }
    }
    order.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return Ranking::from_indices(order);
}

}  // namespace detail

/// Impartial culture: n i.i.d. uniform rankings.
inline SampledPopulation sample_ic(std::size_t m, std::size_t n, std::uint64_t seed) {
  detail::check_population_args(m, n);
  Rng rng(seed);
  SampledPopulation pop{{}, seed};
  pop.voters.reserve(n);
  for (std::size_t v = 0; v < n; ++v) pop.voters.push_back(detail::draw_uniform_ranking(m, rng));
  return pop;
}

/// n i.i.d. draws from the Mallows model centred at `centre` with dispersion phi.
inline SampledPopulation sample_mallows(std::size_t m, std::size_t n, const Ranking& centre,
                                        double phi, std::uint64_t seed) {
  detail::check_population_args(m, n);
  if (!(phi > 0.0 && phi <= 1.0)) throw InvalidArgument("Mallows phi must lie in (0,1]");
  if (centre.m() != m) throw DimensionMismatch(m, centre.m());
  Rng rng(seed);
  SampledPopulation pop{{}, seed};
  pop.voters.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    pop.voters.push_back(detail::draw_mallows_ranking(centre, phi, rng));
  }
  return pop;
}

/// n i.i.d. Plackett-Luce rankings with the given positive utilities.
inline SampledPopulation sample_plackett_luce(std::size_t m, std::size_t n,
                                              std::span<const double> utilities,
                                              std::uint64_t seed) {
  detail::check_population_args(m, n);
  if (utilities.size() != m) throw DimensionMismatch(m, utilities.size());
  for (double u : utilities) {
    if (!(u > 0.0)) throw InvalidArgument("Plackett-Luce utilities must be positive");
  }
  Rng rng(seed);
  SampledPopulation pop{{}, seed};
  pop.voters.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    pop.voters.push_back(detail::draw_plackett_luce_ranking(utilities, rng));
  }
  return pop;
}

/// Utilities drawn uniformly from the open interval (0,1).
inline std::vector<double> draw_pl_utilities(std::size_t m, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(m);
  for (auto& u : out) {
    do {
      u = unit(rng);
    } while (u == 0.0);
  }
  return out;
}

}  // namespace tfeedback
