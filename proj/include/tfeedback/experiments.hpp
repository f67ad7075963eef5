#pragma once

/**
 * @file experiments.hpp
 * @brief Simulation of one-query-per-voter elicitation: sample a population,
 *        collect improvement or pairwise feedback, estimate the Borda and
 *        Copeland winners from the observed counts and score them against the
 *        true winners of the sampled population.
 */

#include "tfeedback/rules.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace tfeedback {

enum class Model { IC, Mallows, PL };
enum class Rule { Borda, Copeland };
enum class QueryMode { Improvement, Pairwise };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::IC: return "IC";
    case Model::Mallows: return "Mallows";
    case Model::PL: return "PL";
  }
  return "IC";
}

inline std::string to_string(Rule r) { return r == Rule::Borda ? "borda" : "copeland"; }

inline std::string to_string(QueryMode q) {
  return q == QueryMode::Improvement ? "improvement" : "pairwise";
}

struct ExperimentConfig {
  std::size_t m{20};
  std::size_t t{5};
  FeedbackKind feedback_kind{FeedbackKind::Uniform};
  Rational lambda{1, 2};  // exponential decay only
  Model model{Model::IC};
  double phi{1.0 / 3.0};  // Mallows dispersion; the centre is the identity ranking
  std::vector<std::size_t> n_values = default_n_values();
  std::size_t iterations{500};
  std::uint64_t master_seed{20240101};
  std::vector<Rule> rules{Rule::Borda, Rule::Copeland};
  std::vector<QueryMode> modes{QueryMode::Improvement, QueryMode::Pairwise};

  static std::vector<std::size_t> default_n_values() {
    std::vector<std::size_t> out;
    for (std::size_t n = 50; n <= 1000; n += 50) out.push_back(n);
    return out;
  }

  void validate() const {
    check_window_or_throw();
    if (n_values.empty()) throw InvalidArgument("n_values is empty");
    for (auto n : n_values) {
      if (n < 1) throw InvalidArgument("every n must be at least 1");
    }
    if (iterations < 1) throw InvalidArgument("iterations must be at least 1");
    if (rules.empty()) throw InvalidArgument("no rules selected");
    if (modes.empty()) throw InvalidArgument("no feedback modes selected");
    if (model == Model::Mallows && !(phi > 0.0 && phi <= 1.0)) {
      throw InvalidArgument("Mallows phi must lie in (0,1]");
    }
    if (feedback_kind == FeedbackKind::Custom) {
      throw InvalidArgument("experiments support uniform, linear and exponential feedback");
    }
  }

 private:
  void check_window_or_throw() const {
    if (m < 2) throw InvalidArgument("m must be at least 2");
    if (t < 1 || t > m - 1) throw InvalidArgument("t must lie in 1..m-1");
  }
};

inline FeedbackDistribution make_feedback(const ExperimentConfig& cfg) {
  switch (cfg.feedback_kind) {
    case FeedbackKind::Uniform: return uniform_feedback(cfg.m, cfg.t);
    case FeedbackKind::Linear: return linear_decay_feedback(cfg.m, cfg.t);
    case FeedbackKind::Exponential: return exp_decay_feedback(cfg.m, cfg.t, cfg.lambda);
    case FeedbackKind::Custom: break;
  }
  throw InvalidArgument("experiments support uniform, linear and exponential feedback");
}

struct TrialResult {
  Model model{Model::IC};
  Rule rule{Rule::Borda};
  QueryMode mode{QueryMode::Improvement};
  std::size_t n{0};
  std::size_t trial{0};
  double ratio{0.0};

  bool operator==(const TrialResult&) const = default;
};

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Stream 0 drives the population, streams 1 and 2 the improvement and
/// pairwise queries. Both modes of a trial therefore see the same voters.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t n, std::size_t trial,
                                std::uint64_t stream) {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(trial));
  return detail::splitmix64(h ^ stream);
}

inline std::uint64_t query_stream(QueryMode mode) { return mode == QueryMode::Improvement ? 1 : 2; }

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

inline SampledPopulation sample_population(const ExperimentConfig& cfg, std::size_t n,
                                           std::size_t trial) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, n, trial, 0);
  switch (cfg.model) {
    case Model::IC: return sample_ic(cfg.m, n, seed);
    case Model::Mallows: return sample_mallows(cfg.m, n, Ranking::identity(cfg.m), cfg.phi, seed);
    case Model::PL: {
      // Utilities are fresh per trial, drawn ahead of the voters.
      Rng rng(seed);
      const auto utilities = draw_pl_utilities(cfg.m, rng);
      return sample_plackett_luce(cfg.m, n, utilities, detail::splitmix64(seed));
    }
  }
  throw InvalidArgument("unknown model");
}

/// Observed win counts from one improvement query per voter.
inline CountMajority improvement_counts(const SampledPopulation& pop, const FeedbackDistribution& fd,
                                        std::uint64_t seed) {
  const std::size_t m = fd.m();
  CountMajority counts(m);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (const auto& voter : pop.voters) {
    const Candidate a(pick(rng));
    const Candidate reply = sample_feedback(voter, fd, a, rng);
    if (reply == a) {
      for (std::size_t c = 0; c < m; ++c) {
        if (c != a.index) ++counts.at(a, Candidate(c));
      }
    } else {
      ++counts.at(reply, a);
    }
  }
  return counts;
}

/// Observed win counts from one uniformly random pairwise comparison per voter.
inline CountMajority pairwise_counts(const SampledPopulation& pop, std::size_t m, std::uint64_t seed) {
  CountMajority counts(m);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> first(0, m - 1);
  std::uniform_int_distribution<std::size_t> second(0, m - 2);
  for (const auto& voter : pop.voters) {
    const std::size_t x = first(rng);
    std::size_t y = second(rng);
    if (y >= x) ++y;
    const Candidate a(x);
    const Candidate b(y);
    if (voter.prefers(a, b)) {
      ++counts.at(a, b);
    } else {
      ++counts.at(b, a);
    }
  }
  return counts;
}

inline Candidate estimated_winner(const CountMajority& counts, Rule rule) {
  const std::size_t m = counts.m();
  if (rule == Rule::Copeland) return argmax(copeland_scores(counts));
  std::vector<std::uint64_t> rows(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) rows[a] += counts(Candidate(a), Candidate(b));
  }
  return argmax(rows);
}

/// Full pairwise tallies of the sampled population.
inline CountMajority population_majority(const SampledPopulation& pop, std::size_t m) {
  CountMajority w(m);
  for (const auto& voter : pop.voters) {
    const auto& order = voter.order();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) ++w.at(order[i], order[j]);
    }
  }
  return w;
}

/// True scores on the population: Borda points, or Copeland strict wins.
inline std::vector<std::uint64_t> true_scores(const CountMajority& w, Rule rule) {
  const std::size_t m = w.m();
  std::vector<std::uint64_t> out(m, 0);
  if (rule == Rule::Copeland) {
    const auto wins = copeland_scores(w);
    std::copy(wins.begin(), wins.end(), out.begin());
    return out;
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) out[a] += w(Candidate(a), Candidate(b));
  }
  return out;
}

/// Achieved over optimal. An all-zero optimum (every pair tied under
/// Copeland) makes every candidate optimal, so the ratio is 1.
inline double approximation_ratio(const std::vector<std::uint64_t>& scores, Candidate winner) {
  const auto best = *std::max_element(scores.begin(), scores.end());
  if (best == 0) return 1.0;
  return static_cast<double>(scores.at(winner.index)) / static_cast<double>(best);
}

/// All (mode, rule) results for one population size and trial index, ordered
/// by cfg.modes then cfg.rules.
inline std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const FeedbackDistribution& fd,
                                          std::size_t n, std::size_t trial) {
  const auto pop = sample_population(cfg, n, trial);
  const auto truth = population_majority(pop, cfg.m);
  std::vector<TrialResult> out;
  out.reserve(cfg.modes.size() * cfg.rules.size());
  for (const QueryMode mode : cfg.modes) {
    const std::uint64_t seed = trial_seed(cfg.master_seed, n, trial, query_stream(mode));
    const auto counts = mode == QueryMode::Improvement ? improvement_counts(pop, fd, seed)
                                                       : pairwise_counts(pop, cfg.m, seed);
    for (const Rule rule : cfg.rules) {
      const auto scores = true_scores(truth, rule);
      out.push_back({cfg.model, rule, mode, n, trial,
                     approximation_ratio(scores, estimated_winner(counts, rule))});
    }
  }
  return out;
}

inline std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial) {
  cfg.validate();
  return run_trial(cfg, make_feedback(cfg), n, trial);
}

/// Default worker count: TFEEDBACK_THREADS if set, else the hardware count.
inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("TFEEDBACK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Every (n, trial) job in cfg. The output order is fixed (n_values order,
/// then trial, then mode, then rule) whatever the thread count.
inline std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg, std::size_t threads = 0) {
  cfg.validate();
  const auto fd = make_feedback(cfg);
  const std::size_t jobs = cfg.n_values.size() * cfg.iterations;
  std::vector<std::vector<TrialResult>> slots(jobs);
  auto work = [&](std::size_t job) {
    slots[job] = run_trial(cfg, fd, cfg.n_values[job / cfg.iterations], job % cfg.iterations);
  };

  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) work(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t job = next++; job < jobs && !failed; job = next++) {
          try {
            work(job);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<TrialResult> out;
  out.reserve(jobs * cfg.modes.size() * cfg.rules.size());
  for (auto& slot : slots) out.insert(out.end(), slot.begin(), slot.end());
  return out;
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

struct SummaryRow {
  Model model{Model::IC};
  Rule rule{Rule::Borda};
  QueryMode mode{QueryMode::Improvement};
  std::size_t n{0};
  double mean{0.0};
  double std{0.0};  // population standard deviation
  std::size_t count{0};
};

/// Mean and population std per (model, rule, mode, n), ordered by that key.
inline std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results) {
  if (results.empty()) throw InvalidArgument("cannot summarize an empty result set");
  using Key = std::tuple<Model, Rule, QueryMode, std::size_t>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : results) groups[{r.model, r.rule, r.mode, r.n}].push_back(r.ratio);

  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [key, ratios] : groups) {
    const double k = static_cast<double>(ratios.size());
    double mean = 0.0;
    for (double x : ratios) mean += x;
    mean /= k;
    double var = 0.0;
    for (double x : ratios) var += (x - mean) * (x - mean);
    var /= k;
    const auto& [model, rule, mode, n] = key;
    out.push_back({model, rule, mode, n, mean, std::sqrt(var), ratios.size()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kResultsHeader = "model,rule,feedback,n,trial,ratio";
inline constexpr const char* kSummaryHeader = "model,rule,feedback,n,mean,std";

/// Shortest decimal that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void write_results_csv(std::ostream& os, const std::vector<TrialResult>& results) {
  os << kResultsHeader << '\n';
  for (const auto& r : results) {
    os << to_string(r.model) << ',' << to_string(r.rule) << ',' << to_string(r.mode) << ','
       << r.n << ',' << r.trial << ',' << format_double(r.ratio) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.model) << ',' << to_string(r.rule) << ',' << to_string(r.mode) << ','
       << r.n << ',' << format_double(r.mean) << ',' << format_double(r.std) << '\n';
  }
}

}  // namespace tfeedback
