#pragma once

// Enumerates every valid parameter tuple of a construction over a range of
// (m, t, feedback law) and checks it exactly.

#include "constructions.hpp"
#include "io.hpp"

#include <array>
#include <functional>

namespace tfeedback {

enum class Suite { DIjl, DHat, ThreeBlock, Condorcet, Family, TopPair, All };

inline Suite suite_from_string(const std::string& s) {
  if (s == "d_ijl" || s == "lemma1") return Suite::DIjl;
  if (s == "d_hat" || s == "dhat") return Suite::DHat;
  if (s == "three_block") return Suite::ThreeBlock;
  if (s == "condorcet") return Suite::Condorcet;
  if (s == "family") return Suite::Family;
  if (s == "top_pair" || s == "appendixC") return Suite::TopPair;
  if (s == "all") return Suite::All;
  throw FormatError("unknown suite '" + s + "'");
}

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::DIjl: return "d_ijl";
    case Suite::DHat: return "d_hat";
    case Suite::ThreeBlock: return "three_block";
    case Suite::Condorcet: return "condorcet";
    case Suite::Family: return "family";
    case Suite::TopPair: return "top_pair";
    case Suite::All: return "all";
  }
  return "all";
}

/// Separating criterion for score gaps and family winners.
enum class GapRule { Borda, Condorcet };

struct VerifyOptions {
  Suite suite{Suite::All};
  std::vector<std::size_t> ms{6, 7, 8};
  std::vector<std::size_t> ts{1, 2, 3, 4, 5, 6, 7};
  std::vector<FeedbackKind> dists{FeedbackKind::Uniform};
  Rational lambda{1, 2};
  GapRule rule{GapRule::Borda};
};

enum class Outcome { Pass, Fail, Skipped };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Skipped: return "skipped";
  }
  return "fail";
}

struct CheckRecord {
  std::string construction;
  Json params;
  std::optional<Rational> p;
  bool indistinguishable{false};
  std::optional<Rational> score_gap;
  Outcome outcome{Outcome::Fail};
  std::string note;
};

inline Json to_json(const CheckRecord& r) {
  Json j{{"construction", r.construction}, {"params", r.params}, {"outcome", to_string(r.outcome)}};
  j["p"] = r.p ? Json(to_string(*r.p)) : Json(nullptr);
  if (r.outcome != Outcome::Skipped) j["indistinguishable"] = r.indistinguishable;
  j["score_gap"] = r.score_gap ? Json(to_string(*r.score_gap)) : Json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

struct VerifyReport {
  std::vector<CheckRecord> checks;
  std::size_t pair_checks{0};

  std::size_t count(Outcome o) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [o](const CheckRecord& r) { return r.outcome == o; }));
  }
  bool ok() const { return count(Outcome::Fail) == 0; }
};

inline FeedbackDistribution make_law(FeedbackKind kind, std::size_t m, std::size_t t, const Rational& lambda) {
  switch (kind) {
    case FeedbackKind::Uniform: return uniform_feedback(m, t);
    case FeedbackKind::Linear: return linear_decay_feedback(m, t);
    case FeedbackKind::Exponential: return exp_decay_feedback(m, t, lambda);
    case FeedbackKind::Custom: break;
  }
  throw InvalidArgument("custom laws cannot be enumerated");
}

inline Rational gap_under(GapRule rule, const PreferenceProfile& d, Candidate a, Candidate b) {
  return rule == GapRule::Borda ? score_gap(borda_vector(d.m()), d, a, b) : condorcet_gap(d, a, b);
}

namespace detail {

inline const Candidate kA{0};
inline const Candidate kB{1};

inline Json base_params(std::size_t m, const FeedbackDistribution& fd) {
  Json j{{"m", m}, {"t", fd.t()}, {"dist", to_string(fd.kind())}};
  if (fd.lambda()) j["lambda"] = to_string(*fd.lambda());
  return j;
}

/// Builds, checks against the swap, and records. Construction errors are
/// recorded as skipped tuples.
inline void check_swap(VerifyReport& report, const std::string& name, Json params,
                       const std::function<std::pair<PreferenceProfile, Rational>()>& build,
                       const FeedbackDistribution& fd, GapRule rule) {
  CheckRecord rec{name, std::move(params), std::nullopt, false, std::nullopt, Outcome::Fail, {}};
  try {
    const auto [d, p] = build();
    rec.p = p;
    rec.indistinguishable = check_indistinguishable(d, swap_profile(d, kA, kB), fd).equal;
    rec.score_gap = gap_under(rule, d, kA, kB);
    rec.outcome = rec.indistinguishable ? Outcome::Pass : Outcome::Fail;
  } catch (const ConstructionError& e) {
    rec.outcome = Outcome::Skipped;
    rec.note = to_string(e.kind()) + ": " + e.what();
  }
  report.checks.push_back(std::move(rec));
}

inline void suite_d_ijl(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd, GapRule rule) {
  const std::size_t t = fd.t();
  const auto reach = reach_vector(fd);
  for (std::size_t i = 2; i <= m; ++i) {
    for (std::size_t j = i + t + 1; j <= m; ++j) {
      for (std::size_t l = 2; l + t < m; ++l) {
        auto params = base_params(m, fd);
        params["i"] = i;
        params["j"] = j;
        params["l"] = l;
        check_swap(report, "D_ijl", params, [&] {
          return std::pair{build_D_ijl(m, kA, kB, i, j, l, fd), d_ijl_weight(reach, i, j, l)};
        }, fd, rule);
      }
    }
  }
}

inline void suite_d_hat(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd, GapRule rule) {
  if (fd.kind() != FeedbackKind::Uniform) return;
  const std::size_t t = fd.t();
  for (std::size_t i = std::max<std::size_t>(2, m - t); i + 2 <= m; ++i) {
    auto params = base_params(m, fd);
    params["i"] = i;
    const long k = static_cast<long>(std::min(i, t));
    check_swap(report, "D_hat", params, [&] {
      return std::pair{build_D_hat(m, kA, kB, i, fd), make_rational(k, static_cast<long>(t) + k)};
    }, fd, rule);
  }
}

inline void suite_three_block(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd,
                              GapRule rule) {
  if (fd.t() + 3 > m) return;
  check_swap(report, "three_block", base_params(m, fd), [&] {
    const auto d = build_three_block(m, kA, kB, fd);
    return std::pair{d, d.blocks().front().weight};
  }, fd, rule);
}

inline void suite_condorcet(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd) {
  if (fd.kind() != FeedbackKind::Uniform || fd.t() > 2 || m < 6) return;
  check_swap(report, "condorcet_small_t", base_params(m, fd), [&] {
    return std::pair{build_condorcet_small_t(m, kA, kB, fd.t()), condorcet_small_t_weight(reach_vector(fd))};
  }, fd, GapRule::Condorcet);
}

inline void suite_top_pair(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd, GapRule rule) {
  if (m < 6 || fd.t() + 4 > m) return;
  check_swap(report, "top_pair", base_params(m, fd), [&] {
    return std::pair{build_top_pair_mixture(m, kA, kB, fd), d_ijl_weight(reach_vector(fd), 2, m, 3)};
  }, fd, rule);
}

/// Seed for a family: D_{2,m,3} when it separates a from b under the rule,
/// else the first separating D_ijl tuple in ascending (i, j, l). Oriented so
/// that a leads.
inline std::optional<std::pair<PreferenceProfile, std::string>> family_seed(std::size_t m,
                                                                            const FeedbackDistribution& fd,
                                                                            GapRule rule) {
  const std::size_t t = fd.t();
  std::vector<std::array<std::size_t, 3>> tuples{{2, m, 3}};
  for (std::size_t i = 2; i <= m; ++i) {
    for (std::size_t j = i + t + 1; j <= m; ++j) {
      for (std::size_t l = 2; l + t < m; ++l) tuples.push_back({i, j, l});
    }
  }
  for (const auto& [i, j, l] : tuples) {
    try {
      const auto d = build_D_ijl(m, kA, kB, i, j, l, fd);
      const Rational gap = gap_under(rule, d, kA, kB);
      if (gap == 0) continue;
      const std::string name =
          "D_ijl(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(l) + ")";
      return std::pair{gap > 0 ? d : swap_profile(d, kA, kB), gap > 0 ? name : "swap " + name};
    } catch (const ConstructionError&) {
    }
  }
  return std::nullopt;
}

inline void suite_family(VerifyReport& report, std::size_t m, const FeedbackDistribution& fd, GapRule rule) {
  const auto seed = family_seed(m, fd, rule);
  auto params = base_params(m, fd);
  params["rule"] = rule == GapRule::Borda ? "borda" : "condorcet";
  if (!seed) {
    report.checks.push_back({"family", params, std::nullopt, false, std::nullopt, Outcome::Skipped,
                             "no separating D_ijl seed"});
    return;
  }
  params["seed"] = seed->second;
  const auto family = build_family(seed->first, kA, kB, fd, params["rule"].get<std::string>());
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t e = c + 1; e < m; ++e) {
      auto pp = params;
      pp["members"] = {c, e};
      const auto rep = check_indistinguishable(family.members[c], family.members[e], fd);
      report.checks.push_back({"family_pair", pp, std::nullopt, rep.equal, std::nullopt,
                               rep.equal ? Outcome::Pass : Outcome::Fail, {}});
      ++report.pair_checks;
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    auto pp = params;
    pp["member"] = c;
    bool wins = false;
    if (rule == GapRule::Borda) {
      const auto scores = positional_scores(borda_vector(m), family.members[c]);
      wins = argmax(scores) == Candidate(c) && unique_max(scores);
    } else {
      wins = condorcet_winner(family.members[c]) == Candidate(c);
    }
    report.checks.push_back({"family_winner", pp, std::nullopt, true, std::nullopt,
                             wins ? Outcome::Pass : Outcome::Fail, wins ? "" : "designated winner lost"});
  }
}

}  // namespace detail

inline VerifyReport run_verify(const VerifyOptions& opt) {
  VerifyReport report;
  const bool all = opt.suite == Suite::All;
  for (const std::size_t m : opt.ms) {
    for (const std::size_t t : opt.ts) {
      if (t >= m) continue;
      for (const auto kind : opt.dists) {
        const auto fd = make_law(kind, m, t, opt.lambda);
        if (all || opt.suite == Suite::DIjl) detail::suite_d_ijl(report, m, fd, opt.rule);
        if (all || opt.suite == Suite::DHat) detail::suite_d_hat(report, m, fd, opt.rule);
        if (all || opt.suite == Suite::ThreeBlock) detail::suite_three_block(report, m, fd, opt.rule);
        if (all || opt.suite == Suite::Condorcet) detail::suite_condorcet(report, m, fd);
        if (all || opt.suite == Suite::TopPair) detail::suite_top_pair(report, m, fd, opt.rule);
        if (all || opt.suite == Suite::Family) detail::suite_family(report, m, fd, opt.rule);
      }
    }
  }
  return report;
}

inline Json to_json(const VerifyReport& report, const VerifyOptions& opt) {
  Json checks = Json::array();
  for (const auto& r : report.checks) checks.push_back(to_json(r));
  return Json{{"suite", to_string(opt.suite)},
              {"checks", checks},
              {"summary",
               {{"checked", report.checks.size() - report.count(Outcome::Skipped)},
                {"passed", report.count(Outcome::Pass)},
                {"failed", report.count(Outcome::Fail)},
                {"skipped", report.count(Outcome::Skipped)},
                {"pair_checks", report.pair_checks}}},
              {"ok", report.ok()}};
}

}  // namespace tfeedback
