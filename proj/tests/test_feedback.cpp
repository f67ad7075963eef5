#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tfeedback;

namespace {

std::vector<Rational> Q(std::initializer_list<Rational> xs) { return std::vector<Rational>(xs); }

}  // namespace

TEST(Distributions, UniformEntries) {
  const auto fd = uniform_feedback(6, 2);
  EXPECT_EQ(fd.p(3, 1), Rational(1, 2));
  EXPECT_EQ(fd.p(3, 2), Rational(1, 2));
  EXPECT_EQ(fd.p(2, 1), 1);
  EXPECT_EQ(fd.p(1, 1), 1);
  EXPECT_EQ(fd.p(6, 3), 0);

  const auto full = uniform_feedback(4, 3);
  for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(full.p(4, j), Rational(1, 3));

  const auto one = uniform_feedback(7, 1);
  for (std::size_t i = 2; i <= 7; ++i) EXPECT_EQ(one.p(i, i - 1), 1);
}

TEST(Distributions, WindowRange) {
  EXPECT_THROW(uniform_feedback(5, 0), InvalidArgument);
  EXPECT_THROW(uniform_feedback(5, 5), InvalidArgument);
  EXPECT_THROW(linear_decay_feedback(5, 7), InvalidArgument);
}

TEST(Distributions, LinearDecay) {
  const auto fd = linear_decay_feedback(6, 3);
  EXPECT_EQ(fd.p(4, 3), Rational(1, 2));
  EXPECT_EQ(fd.p(4, 2), Rational(1, 3));
  EXPECT_EQ(fd.p(4, 1), Rational(1, 6));
  EXPECT_EQ(fd.p(2, 1), 1);
}

TEST(Distributions, ExponentialDecay) {
  const auto fd = exp_decay_feedback(6, 3, Rational(1, 2));
  EXPECT_EQ(fd.p(5, 4), Rational(4, 7));
  EXPECT_EQ(fd.p(5, 3), Rational(2, 7));
  EXPECT_EQ(fd.p(5, 2), Rational(1, 7));
  EXPECT_EQ(fd.p(2, 1), 1);
  EXPECT_THROW(exp_decay_feedback(6, 3, Rational(1)), InvalidArgument);
  EXPECT_THROW(exp_decay_feedback(6, 3, Rational(0)), InvalidArgument);

  // Close to lambda = 1 the rows approach the uniform ones.
  const auto near = exp_decay_feedback(6, 3, Rational(999999, 1000000));
  const auto uni = uniform_feedback(6, 3);
  for (std::size_t i = 2; i <= 6; ++i) {
    for (std::size_t j = 1; j < i; ++j) EXPECT_NEAR(near.p_approx(i, j), uni.p_approx(i, j), 1e-5);
  }
}

TEST(Distributions, RowsSumToOne) {
  for (std::size_t m = 2; m <= 8; ++m) {
    for (std::size_t t = 1; t < m; ++t) {
      for (const auto& fd : oracle::standard_laws(m, t)) {
        for (std::size_t i = 2; i <= m; ++i) {
          Rational row = 0;
          for (std::size_t j = 1; j <= m; ++j) {
            row += fd.p(i, j);
            if (j >= i || i - j > t) {
              EXPECT_EQ(fd.p(i, j), 0);
            }
          }
          EXPECT_EQ(row, 1);
        }
      }
    }
  }
}

TEST(Distributions, CustomValidation) {
  // Mass outside the window.
  EXPECT_THROW(custom_feedback(4, 1, {{2, {{1, Rational(1)}}}, {3, {{1, Rational(1)}}}, {4, {{3, Rational(1)}}}}),
               InvalidArgument);
  // Row not normalized.
  EXPECT_THROW(custom_feedback(3, 2, {{2, {{1, Rational(1)}}}, {3, {{1, Rational(1, 3)}, {2, Rational(1, 3)}}}}),
               InvalidArgument);
  EXPECT_NO_THROW(custom_feedback(3, 2, {{2, {{1, Rational(1)}}}, {3, {{1, Rational(1, 3)}, {2, Rational(2, 3)}}}}));
}

TEST(Reach, UniformSixTwo) {
  EXPECT_EQ(reach_vector(uniform_feedback(6, 2)).values(),
            Q({Rational(3, 2), 1, 1, 1, Rational(1, 2), 0}));
}

TEST(Reach, WindowOneIsVeto) {
  for (std::size_t m = 2; m <= 8; ++m) {
    const auto p = reach_vector(uniform_feedback(m, 1));
    for (std::size_t i = 1; i < m; ++i) EXPECT_EQ(p[i], 1);
    EXPECT_EQ(p[m], 0);
    EXPECT_EQ(s_star(uniform_feedback(m, 1)), veto_vector(m));
  }
}

TEST(Reach, HarmonicSecondEntry) {
  // P_2 under uniform t = 4: positions 3, 4, 5 see windows of width 2, 3, 4.
  const Rational h3 = Rational(1) + Rational(1, 2) + Rational(1, 3);
  EXPECT_EQ(reach_vector(uniform_feedback(10, 4))[2], h3 - 1 + make_rational(2, 4));
  EXPECT_EQ(reach_vector(uniform_feedback(10, 4))[2], Rational(4, 3));
}

TEST(Reach, Bounds) {
  for (std::size_t m = 2; m <= 8; ++m) {
    for (std::size_t t = 1; t < m; ++t) {
      for (const auto& fd : oracle::standard_laws(m, t)) {
        const auto p = reach_vector(fd);
        EXPECT_EQ(p[m], 0);
        for (std::size_t i = 1; i <= m; ++i) {
          EXPECT_GE(p[i], 0);
          EXPECT_LE(p[i], Rational(static_cast<long>(std::min(t, m - i))));
        }
        // Every position i > 1 returns exactly one candidate.
        EXPECT_EQ(p.total(), Rational(static_cast<long>(m - 1)));
      }
    }
  }
}

TEST(Reach, SStarRejectsIncrease) {
  // Rows 4 and 5 send everything to position 3, so P_3 = 2 > P_2.
  const auto fd = custom_feedback(5, 2, {{2, {{1, Rational(1)}}},
                                         {3, {{2, Rational(1)}}},
                                         {4, {{3, Rational(1)}}},
                                         {5, {{3, Rational(1)}}}});
  EXPECT_THROW(s_star(fd), NonMonotone);
  try {
    s_star(fd);
  } catch (const NonMonotone& e) {
    EXPECT_EQ(e.position(), 3u);
  }
  EXPECT_EQ(s_star(uniform_feedback(6, 2)).weights(), Q({Rational(3, 2), 1, 1, 1, Rational(1, 2), 0}));
}

TEST(Ratio, Condition) {
  EXPECT_FALSE(ratio_condition(uniform_feedback(6, 2)));
  for (std::size_t m = 4; m <= 8; ++m) EXPECT_FALSE(ratio_condition(uniform_feedback(m, 1)));
  for (std::size_t m = 4; m <= 8; ++m) {
    EXPECT_TRUE(ratio_condition(oracle::proportional_reach_feedback(m, make_rational(1, static_cast<long>(m - 1)))));
  }
}

// Full-window uniform law: P_i = sum_{j>i} 1/(j-1). Ratios tested by
// cross-multiplication.
TEST(Ratio, FullWindowUniform) {
  for (std::size_t m = 4; m <= 9; ++m) {
    const auto fd = uniform_feedback(m, m - 1);
    std::vector<Rational> p(m + 1, Rational(0));
    for (std::size_t i = 1; i <= m; ++i) {
      for (std::size_t j = i + 1; j <= m; ++j) p[i] += make_rational(1, static_cast<long>(j - 1));
    }
    bool holds = true;
    for (std::size_t i = 2; i + 2 <= m; ++i) {
      if (p[i] * static_cast<long>(m - i - 1) != p[i + 1] * static_cast<long>(m - i)) holds = false;
    }
    EXPECT_EQ(ratio_condition(fd), holds) << "m=" << m;
  }
}

TEST(Matrix, SingleRanking) {
  const auto d = PreferenceProfile::explicit_form(
      3, std::vector<std::pair<Ranking, Rational>>{{Ranking::identity(3), Rational(1)}});
  const auto q = feedback_matrix(d, uniform_feedback(3, 2));
  const Candidate a(0), b(1), c(2);
  EXPECT_EQ(q(c, a), Rational(1, 2));
  EXPECT_EQ(q(c, b), Rational(1, 2));
  EXPECT_EQ(q(b, a), 1);
  EXPECT_EQ(q(a, a), 1);
  EXPECT_EQ(q(b, b), 0);
}

TEST(Matrix, DimensionMismatch) {
  const auto d = PreferenceProfile::block_mixture(5, {Block{Rational(1), {}}});
  EXPECT_THROW(feedback_matrix(d, uniform_feedback(6, 2)), DimensionMismatch);
}

TEST(Matrix, MatchesExpansion) {
  std::mt19937_64 rng(21);
  for (std::size_t m = 3; m <= 7; ++m) {
    for (std::size_t t = 1; t < m; ++t) {
      for (const auto& fd : oracle::standard_laws(m, t)) {
        const auto d = (m + t) % 2 ? oracle::random_blocks(m, rng) : oracle::random_explicit(m, rng);
        const auto q = feedback_matrix(d, fd);
        EXPECT_EQ(q.matrix(), oracle::feedback(oracle::expand(d), fd));
        for (std::size_t b = 0; b < m; ++b) EXPECT_EQ(q.row_sum(Candidate(b)), 1);
        EXPECT_EQ(q.trace(), 1);
      }
    }
  }
}

TEST(Matrix, ColumnSumIdentity) {
  std::mt19937_64 rng(22);
  for (std::size_t m = 3; m <= 7; ++m) {
    for (std::size_t t = 1; t < m; ++t) {
      const auto fd = linear_decay_feedback(m, t);
      const auto reach = reach_vector(fd);
      const auto d = oracle::random_blocks(m, rng, 4);
      const auto q = feedback_matrix(d, fd);
      for (std::size_t a = 0; a < m; ++a) {
        Rational col = 0;
        for (std::size_t b = 0; b < m; ++b) {
          if (b != a) col += q(Candidate(b), Candidate(a));
        }
        Rational expected = 0;
        const auto marg = position_marginal(d, Candidate(a));
        for (std::size_t i = 1; i <= m; ++i) expected += reach[i] * marg[i - 1];
        EXPECT_EQ(col, expected);
      }
    }
  }
}

TEST(Sampling, TopAlwaysReturnsItself) {
  Rng rng(1);
  const auto fd = uniform_feedback(6, 3);
  const auto r = Ranking::from_indices(std::vector<std::size_t>{4, 0, 1, 2, 3, 5});
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_feedback(r, fd, Candidate(4), rng), Candidate(4));
}

TEST(Sampling, WindowOneStepsUp) {
  Rng rng(2);
  const auto fd = uniform_feedback(6, 1);
  const auto r = Ranking::from_indices(std::vector<std::size_t>{4, 0, 1, 2, 3, 5});
  for (std::size_t pos = 2; pos <= 6; ++pos) {
    for (int k = 0; k < 20; ++k) EXPECT_EQ(sample_feedback(r, fd, r.at(pos), rng), r.at(pos - 1));
  }
}

TEST(Sampling, EmpiricalLaw) {
  const std::size_t draws = 100000;
  const auto r = Ranking::identity(7);
  for (const auto& fd : oracle::standard_laws(7, 4)) {
    Rng rng(3);
    for (std::size_t i = 2; i <= 7; ++i) {
      std::vector<std::size_t> hits(8, 0);
      for (std::size_t k = 0; k < draws; ++k) ++hits[r.position_of(sample_feedback(r, fd, r.at(i), rng))];
      for (std::size_t j = 1; j <= 7; ++j) {
        const double p = fd.p_approx(i, j);
        const double sd = std::sqrt(p * (1 - p) / static_cast<double>(draws));
        EXPECT_NEAR(static_cast<double>(hits[j]) / static_cast<double>(draws), p, 3 * sd + 1e-12)
            << "i=" << i << " j=" << j;
      }
    }
  }
}
