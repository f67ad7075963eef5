#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tfeedback;

namespace {

using Entries = std::vector<std::pair<Ranking, Rational>>;

Ranking R(std::initializer_list<std::size_t> xs) { return Ranking::from_indices(std::vector<std::size_t>(xs)); }

PreferenceProfile single(const Ranking& r) { return PreferenceProfile::explicit_form(r.m(), Entries{{r, Rational(1)}}); }

}  // namespace

TEST(Ranking, PositionOf) {
  EXPECT_EQ(position_of(R({2, 0, 1}), Candidate(0)), 2u);
  EXPECT_EQ(position_of(R({0, 1, 2}), Candidate(2)), 3u);
  EXPECT_EQ(position_of(R({1, 0}), Candidate(1)), 1u);
  EXPECT_THROW(position_of(R({1, 0}), Candidate(2)), Error);
}

TEST(Ranking, RejectsNonPermutations) {
  EXPECT_THROW(R({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(R({0, 3, 1}), InvalidArgument);
}

TEST(Ranking, PositionRoundTrip) {
  const auto r = R({3, 1, 4, 0, 2});
  for (std::size_t pos = 1; pos <= r.m(); ++pos) EXPECT_EQ(r.position_of(r.at(pos)), pos);
}

TEST(Profile, WeightsMustSumToOne) {
  EXPECT_THROW(PreferenceProfile::explicit_form(3, Entries{{R({0, 1, 2}), Rational(1, 2)}}), InvalidArgument);
  EXPECT_THROW(PreferenceProfile::block_mixture(3, {Block{Rational(2, 3), {}}}), InvalidArgument);
  EXPECT_THROW(PreferenceProfile::block_mixture(3, {Block{Rational(1), {{Candidate(0), 1}, {Candidate(1), 1}}}}),
               InvalidArgument);
}

TEST(Profile, SwapExplicit) {
  const auto d = single(R({0, 1, 2}));
  EXPECT_EQ(swap_profile(d, Candidate(0), Candidate(1)), single(R({1, 0, 2})));
  EXPECT_EQ(swap_profile(swap_profile(d, Candidate(0), Candidate(2)), Candidate(0), Candidate(2)), d);
}

TEST(Profile, SwapBlock) {
  const auto d = PreferenceProfile::block_mixture(6, {Block{Rational(1), {{Candidate(0), 2}, {Candidate(1), 5}}}});
  const auto s = swap_profile(d, Candidate(0), Candidate(1));
  EXPECT_EQ(s.blocks().at(0).pins.at(Candidate(1)), 2u);
  EXPECT_EQ(s.blocks().at(0).pins.at(Candidate(0)), 5u);
  EXPECT_THROW(swap_profile(d, Candidate(0), Candidate(0)), InvalidArgument);
}

TEST(Profile, PermuteCyclic) {
  const CandidatePermutation pi({Candidate(1), Candidate(2), Candidate(0)});
  EXPECT_EQ(permute_profile(single(R({0, 1, 2})), pi), single(R({1, 2, 0})));
  EXPECT_EQ(permute_profile(single(R({0, 1, 2})), CandidatePermutation::identity(3)), single(R({0, 1, 2})));
  EXPECT_THROW(CandidatePermutation({Candidate(0), Candidate(0), Candidate(1)}), InvalidArgument);
}

TEST(Profile, PermuteInverse) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = trial % 2 ? oracle::random_explicit(5, rng) : oracle::random_blocks(5, rng);
    std::vector<Candidate> img;
    std::vector<std::size_t> idx(5);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) img.emplace_back(i);
    const CandidatePermutation pi(img);
    EXPECT_EQ(permute_profile(permute_profile(d, pi), pi.inverse()), d);
  }
}

TEST(Profile, BlockMarginal) {
  const auto d = PreferenceProfile::block_mixture(6, {Block{Rational(1), {{Candidate(0), 2}, {Candidate(1), 5}}}});
  const std::vector<Rational> free_one{Rational(1, 4), 0, Rational(1, 4), Rational(1, 4), 0, Rational(1, 4)};
  EXPECT_EQ(position_marginal(d, Candidate(3)), free_one);
  const std::vector<Rational> pinned{0, 1, 0, 0, 0, 0};
  EXPECT_EQ(position_marginal(d, Candidate(0)), pinned);
  EXPECT_EQ(pairwise_pref(d, Candidate(0), Candidate(1)), 1);
}

TEST(Profile, JointFreePair) {
  const auto d = PreferenceProfile::block_mixture(4, {Block{Rational(1), {{Candidate(0), 1}}}});
  const auto j = joint_position(d, Candidate(1), Candidate(2));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const bool free_pair = i >= 1 && k >= 1 && i != k;
      EXPECT_EQ(j(i, k), free_pair ? Rational(1, 6) : Rational(0));
    }
  }
  EXPECT_THROW(joint_position(d, Candidate(1), Candidate(1)), InvalidArgument);
}

TEST(Profile, PairwiseReadOff) {
  const auto d = PreferenceProfile::explicit_form(3, Entries{{R({0, 1, 2}), Rational(3, 5)}, {R({2, 1, 0}), Rational(2, 5)}});
  EXPECT_EQ(pairwise_pref(d, Candidate(0), Candidate(1)), Rational(3, 5));
}

// Block and explicit forms against full enumeration.
TEST(Profile, MatchesEnumeration) {
  std::mt19937_64 rng(11);
  for (std::size_t m = 3; m <= 7; ++m) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto d = trial % 2 ? oracle::random_explicit(m, rng) : oracle::random_blocks(m, rng);
      const auto support = oracle::expand(d);
      for (std::size_t x = 0; x < m; ++x) {
        std::vector<Rational> marg(m, Rational(0));
        for (const auto& [o, w] : support) {
          marg[std::find(o.begin(), o.end(), x) - o.begin()] += w;
        }
        EXPECT_EQ(position_marginal(d, Candidate(x)), marg);
        for (std::size_t y = 0; y < m; ++y) {
          if (x == y) continue;
          SquareMatrix<Rational> joint(m, Rational(0));
          for (const auto& [o, w] : support) {
            joint(std::find(o.begin(), o.end(), x) - o.begin(), std::find(o.begin(), o.end(), y) - o.begin()) += w;
          }
          EXPECT_EQ(joint_position(d, Candidate(x), Candidate(y)), joint);
          EXPECT_EQ(pairwise_pref(d, Candidate(x), Candidate(y)), oracle::above(support, x, y));
          EXPECT_EQ(pairwise_pref(d, Candidate(x), Candidate(y)) + pairwise_pref(d, Candidate(y), Candidate(x)), 1);
        }
      }
    }
  }
}

TEST(Profile, MergeBlocksKeepsDistribution) {
  const auto d = PreferenceProfile::block_mixture(
      5, {Block{Rational(1, 4), {{Candidate(0), 1}}}, Block{Rational(1, 4), {{Candidate(0), 1}}},
          Block{Rational(1, 2), {{Candidate(2), 3}}}, Block{Rational(0), {{Candidate(4), 5}}}});
  const auto merged = merge_blocks(d);
  EXPECT_EQ(merged.blocks().size(), 2u);
  EXPECT_EQ(oracle::expand(merged), oracle::expand(d));
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

namespace {

std::map<Ranking, std::size_t> tally(const SampledPopulation& pop) {
  std::map<Ranking, std::size_t> out;
  for (const auto& r : pop.voters) ++out[r];
  return out;
}

// Pearson statistic over all m! rankings against the given probabilities.
double chi_square(const SampledPopulation& pop, const std::map<Ranking, double>& expected) {
  const auto counts = tally(pop);
  double stat = 0.0;
  for (const auto& [r, p] : expected) {
    const double e = p * static_cast<double>(pop.n());
    const double o = counts.count(r) ? static_cast<double>(counts.at(r)) : 0.0;
    stat += (o - e) * (o - e) / e;
  }
  return stat;
}

std::map<Ranking, double> uniform_over(std::size_t m) {
  std::vector<std::size_t> o(m);
  std::iota(o.begin(), o.end(), std::size_t{0});
  std::map<Ranking, double> out;
  const double p = 1.0 / std::tgamma(static_cast<double>(m) + 1.0);
  do out[Ranking::from_indices(o)] = p;
  while (std::next_permutation(o.begin(), o.end()));
  return out;
}

// 0.999 quantile of chi-square with 5 degrees of freedom.
constexpr double kChi5 = 20.515;

bool within_3_sigma(std::size_t hits, std::size_t n, double p) {
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
  return std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) <= 3 * sd;
}

}  // namespace

TEST(Samplers, ImpartialCultureUniform) {
  const auto pop = sample_ic(3, 60000, 1);
  EXPECT_LT(chi_square(pop, uniform_over(3)), kChi5);
  for (const auto& [r, k] : tally(pop)) EXPECT_TRUE(within_3_sigma(k, pop.n(), 1.0 / 6.0));
}

TEST(Samplers, Deterministic) {
  EXPECT_EQ(sample_ic(5, 50, 9).voters, sample_ic(5, 50, 9).voters);
  const std::vector<double> u{0.2, 0.5, 0.9};
  EXPECT_EQ(sample_plackett_luce(3, 40, u, 4).voters, sample_plackett_luce(3, 40, u, 4).voters);
  EXPECT_EQ(sample_mallows(4, 40, Ranking::identity(4), 0.5, 4).voters,
            sample_mallows(4, 40, Ranking::identity(4), 0.5, 4).voters);
}

TEST(Samplers, SingleCandidate) {
  for (const auto& r : sample_ic(1, 10, 3).voters) EXPECT_EQ(r, Ranking::identity(1));
}

TEST(Samplers, MallowsPhiOneIsUniform) {
  const auto pop = sample_mallows(3, 100000, Ranking::identity(3), 1.0, 5);
  EXPECT_LT(chi_square(pop, uniform_over(3)), kChi5);
}

TEST(Samplers, MallowsMassRatio) {
  const auto centre = R({1, 2, 0});
  const auto pop = sample_mallows(3, 1000000, centre, 1.0 / 3.0, 6);
  const auto counts = tally(pop);
  const double ratio = static_cast<double>(counts.at(centre)) / static_cast<double>(counts.at(R({0, 2, 1})));
  EXPECT_NEAR(ratio, 27.0, 27.0 * 0.2);

  // Exact Mallows law over the six rankings via Kendall tau distance.
  std::map<Ranking, double> law;
  double z = 0.0;
  for (const auto& [r, unused] : uniform_over(3)) {
    int d = 0;
    for (std::size_t x = 0; x < 3; ++x) {
      for (std::size_t y = x + 1; y < 3; ++y) {
        if (r.prefers(Candidate(x), Candidate(y)) != centre.prefers(Candidate(x), Candidate(y))) ++d;
      }
    }
    law[r] = std::pow(1.0 / 3.0, d);
    z += law[r];
  }
  for (auto& [r, p] : law) p /= z;
  EXPECT_LT(chi_square(pop, law), kChi5);
}

TEST(Samplers, MallowsConcentrates) {
  const auto pop = sample_mallows(6, 5000, Ranking::identity(6), 1e-6, 8);
  EXPECT_GE(static_cast<double>(tally(pop)[Ranking::identity(6)]) / 5000.0, 0.999);
  EXPECT_THROW(sample_mallows(3, 5, Ranking::identity(3), 0.0, 1), InvalidArgument);
  EXPECT_THROW(sample_mallows(3, 5, Ranking::identity(3), 1.5, 1), InvalidArgument);
}

TEST(Samplers, PlackettLuceEqualUtilities) {
  const std::vector<double> u{1.0, 1.0, 1.0};
  EXPECT_LT(chi_square(sample_plackett_luce(3, 60000, u, 12), uniform_over(3)), kChi5);
}

TEST(Samplers, PlackettLuceTwo) {
  const std::vector<double> u{3.0, 1.0};
  const auto pop = sample_plackett_luce(2, 40000, u, 13);
  EXPECT_TRUE(within_3_sigma(tally(pop)[R({0, 1})], pop.n(), 0.75));
}

TEST(Samplers, PlackettLuceProduct) {
  const std::vector<double> u{2.0, 1.0, 1.0};
  const auto pop = sample_plackett_luce(3, 40000, u, 14);
  EXPECT_TRUE(within_3_sigma(tally(pop)[R({0, 1, 2})], pop.n(), 0.25));
  const std::vector<double> bad{1.0, 0.0, 1.0};
  EXPECT_THROW(sample_plackett_luce(3, 5, bad, 1), InvalidArgument);
}

TEST(Samplers, UtilitiesInOpenUnitInterval) {
  Rng rng(3);
  for (double u : draw_pl_utilities(1000, rng)) {
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}
