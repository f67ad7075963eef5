// tfeedback: verification suites, feedback scoring, single constructions and
// the simulation sweep. JSON and CSV go to stdout or files; tables to stderr.

#include "tfeedback/tfeedback.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>

using namespace tfeedback;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
#ifndef TFEEDBACK_VERSION
#define TFEEDBACK_VERSION "0.1.0"
#endif
constexpr const char* kVersion = TFEEDBACK_VERSION;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// "6", "6..8" or "6,7,8".
std::vector<std::size_t> parse_range(const std::string& text, const std::string& flag, std::size_t min_value) {
  std::vector<std::size_t> out;
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (s.empty() || s[0] == '-' || pos != s.size()) throw UsageError(flag + ": '" + s + "' is not a count");
    if (v < min_value) throw UsageError(flag + ": values must be at least " + std::to_string(min_value));
    return static_cast<std::size_t>(v);
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (hi < lo) throw UsageError(flag + ": empty range " + text);
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
  if (out.empty()) throw UsageError(flag + ": empty");
  return out;
}

std::vector<FeedbackKind> parse_dists(const std::string& text) {
  if (text == "all") return {FeedbackKind::Uniform, FeedbackKind::Linear, FeedbackKind::Exponential};
  std::vector<FeedbackKind> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    const auto kind = feedback_kind_from_string(part);
    if (kind == FeedbackKind::Custom) throw UsageError("--dist: custom laws need a file");
    out.push_back(kind);
  }
  return out;
}

Rational parse_rational_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const InvalidArgument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

Json scores_json(const std::vector<Rational>& v) {
  Json j = Json::array();
  for (const auto& x : v) j.push_back(to_string(x));
  return j;
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::string m = "6..8";
  std::string t = "1..7";
  std::string dist = "uniform";
  std::string lambda = "1/2";
  std::string rule = "borda";
};

int cmd_verify(const VerifyArgs& args) {
  VerifyOptions opt;
  opt.suite = suite_from_string(args.suite);
  opt.ms = parse_range(args.m, "--m", 2);
  opt.ts = parse_range(args.t, "--t", 1);
  opt.dists = parse_dists(args.dist);
  opt.lambda = parse_rational_flag(args.lambda, "--lambda");
  if (args.rule == "borda") {
    opt.rule = GapRule::Borda;
  } else if (args.rule == "condorcet" || args.rule == "copeland") {
    opt.rule = GapRule::Condorcet;
  } else {
    throw UsageError("--rule: expected borda or condorcet");
  }
  if (opt.lambda <= 0 || opt.lambda >= 1) throw UsageError("--lambda must lie in (0,1)");

  const auto report = run_verify(opt);
  print_json(to_json(report, opt));

  std::cerr << std::left << std::setw(18) << "construction" << std::setw(44) << "params" << std::setw(10) << "p"
            << "outcome\n";
  for (const auto& r : report.checks) {
    std::cerr << std::setw(18) << r.construction << std::setw(44) << r.params.dump() << std::setw(10)
              << (r.p ? to_string(*r.p) : "-") << to_string(r.outcome) << '\n';
  }
  std::cerr << report.count(Outcome::Pass) << " passed, " << report.count(Outcome::Fail) << " failed, "
            << report.count(Outcome::Skipped) << " skipped";
  if (report.pair_checks) std::cerr << ", " << report.pair_checks << " pair checks";
  std::cerr << '\n';
  return report.ok() ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string profile;
  std::string feedback;
  std::string rule;
  std::string scoring;
  std::string lambda1;
  std::string lambda2;
};

std::vector<Rational> combine(const Rational& l1, const std::vector<Rational>& x, const Rational& l2,
                              const std::vector<Rational>& y) {
  std::vector<Rational> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = l1 * x[i] + l2 * y[i];
  return out;
}

int cmd_score(const ScoreArgs& args) {
  const auto d = profile_from_json(read_json_file(args.profile));
  const auto fd = feedback_from_json(read_json_file(args.feedback));
  if (d.m() != fd.m()) throw UsageError("profile has m=" + std::to_string(d.m()) + ", feedback has m=" +
                                        std::to_string(fd.m()));
  const int chosen = !args.rule.empty() + !args.scoring.empty() + (!args.lambda1.empty() || !args.lambda2.empty());
  if (chosen != 1) throw UsageError("give exactly one of --rule, --scoring or --lambda1/--lambda2");

  const auto q = feedback_matrix(d, fd);
  Json out{{"m", d.m()}, {"feedback", feedback_to_json(fd)}};
  std::vector<Rational> direct;
  std::optional<std::vector<Rational>> recovered;
  bool valid = false;

  if (!args.rule.empty() || !args.scoring.empty()) {
    const auto s = args.rule.empty() ? scoring_from_json(read_json_file(args.scoring)) : scoring_preset(args.rule, fd);
    if (s.m() != d.m()) throw UsageError("scoring vector has the wrong length");
    out["rule"] = args.rule.empty() ? "custom" : args.rule;
    out["s"] = scores_json(s.weights());
    direct = positional_scores(s, d);
    if (args.rule == "borda") {
      auto b = borda_from_feedback(q, fd);
      recovered = std::move(b.scores);
      valid = b.valid;
    } else if (const auto span = learnable_span_coefficients(s, fd)) {
      // Scores are shifted by s_m, which leaves every difference intact.
      recovered = scores_from_feedback(q, span->lambda1, span->lambda2);
      for (auto& x : *recovered) x += s[d.m()];
      valid = true;
      out["lambda1"] = to_string(span->lambda1);
      out["lambda2"] = to_string(span->lambda2);
    }
  } else {
    const Rational l1 = args.lambda1.empty() ? Rational(0) : parse_rational_flag(args.lambda1, "--lambda1");
    const Rational l2 = args.lambda2.empty() ? Rational(0) : parse_rational_flag(args.lambda2, "--lambda2");
    out["lambda1"] = to_string(l1);
    out["lambda2"] = to_string(l2);
    direct = combine(l1, positional_scores(plurality_vector(d.m()), d), l2, positional_scores(s_star(fd), d));
    recovered = scores_from_feedback(q, l1, l2);
    valid = true;
  }

  out["direct"] = scores_json(direct);
  out["winner_direct"] = argmax(direct).index;
  out["valid"] = valid;
  if (recovered) {
    std::vector<Rational> diff(direct.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = (*recovered)[i] - direct[i];
    out["feedback_scores"] = scores_json(*recovered);
    out["difference"] = scores_json(diff);
    out["winner_feedback"] = argmax(*recovered).index;
  } else {
    out["feedback_scores"] = nullptr;
    out["difference"] = nullptr;
    out["winner_feedback"] = nullptr;
  }
  print_json(out);

  std::cerr << std::left << std::setw(10) << "candidate" << std::setw(16) << "direct" << std::setw(16)
            << "feedback" << "difference\n";
  for (std::size_t c = 0; c < direct.size(); ++c) {
    std::cerr << std::setw(10) << c << std::setw(16) << to_string(direct[c]) << std::setw(16)
              << (recovered ? to_string((*recovered)[c]) : "-")
              << (recovered ? to_string((*recovered)[c] - direct[c]) : "-") << '\n';
  }
  std::cerr << "valid: " << (valid ? "true" : "false") << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

struct ConstructArgs {
  std::string kind = "d_ijl";
  std::size_t m = 6;
  std::size_t t = 2;
  std::string dist = "uniform";
  std::string lambda = "1/2";
  std::size_t a = 0;
  std::size_t b = 1;
  std::size_t i = 2;
  std::size_t j = 0;
  std::size_t l = 3;
  std::string rule = "borda";
  std::string profile_out;
};

int cmd_construct(const ConstructArgs& args) {
  if (args.t < 1) throw UsageError("--t must be at least 1");
  const auto dists = parse_dists(args.dist);
  if (dists.size() != 1) throw UsageError("--dist: give a single law");
  const Rational lambda = parse_rational_flag(args.lambda, "--lambda");
  const auto fd = make_law(dists.front(), args.m, args.t, lambda);
  const Candidate a(args.a);
  const Candidate b(args.b);
  const auto reach = reach_vector(fd);
  const GapRule rule = args.rule == "borda" ? GapRule::Borda : GapRule::Condorcet;
  if (args.rule != "borda" && args.rule != "condorcet") throw UsageError("--rule: expected borda or condorcet");

  Json params{{"m", args.m}, {"t", args.t}, {"dist", to_string(fd.kind())}, {"a", args.a}, {"b", args.b}};
  std::optional<PreferenceProfile> d;
  Rational p;
  std::string name;
  if (args.kind == "d_ijl") {
    const std::size_t j = args.j ? args.j : args.m;
    params["i"] = args.i;
    params["j"] = j;
    params["l"] = args.l;
    d = build_D_ijl(args.m, a, b, args.i, j, args.l, fd);
    p = d_ijl_weight(reach, args.i, j, args.l);
    name = "D_ijl";
  } else if (args.kind == "d_hat") {
    params["i"] = args.i;
    d = build_D_hat(args.m, a, b, args.i, fd);
    p = d->blocks().front().weight;
    name = "D_hat";
  } else if (args.kind == "three_block") {
    d = build_three_block(args.m, a, b, fd);
    p = d->blocks().front().weight;
    name = "three_block";
  } else if (args.kind == "condorcet") {
    if (fd.kind() != FeedbackKind::Uniform) throw UsageError("condorcet profile is defined for uniform feedback");
    d = build_condorcet_small_t(args.m, a, b, args.t);
    p = condorcet_small_t_weight(reach);
    name = "condorcet_small_t";
  } else if (args.kind == "top_pair") {
    d = build_top_pair_mixture(args.m, a, b, fd);
    p = d_ijl_weight(reach, 2, args.m, 3);
    name = "top_pair";
  } else {
    throw UsageError("--kind: expected d_ijl, d_hat, three_block, condorcet or top_pair");
  }

  const auto report = check_indistinguishable(*d, swap_profile(*d, a, b), fd);
  const Rational gap = gap_under(name == "condorcet_small_t" ? GapRule::Condorcet : rule, *d, a, b);
  Json out{{"construction", name},
           {"params", params},
           {"p", to_string(p)},
           {"indistinguishable", report.equal},
           {"score_gap", to_string(gap)},
           {"profile", profile_to_json(*d)}};
  if (report.witness) {
    out["witness"] = {{"queried", report.witness->queried.index},
                      {"returned", report.witness->returned.index},
                      {"first", to_string(report.witness->first)},
                      {"second", to_string(report.witness->second)}};
  }
  if (!args.profile_out.empty()) write_file_atomic(args.profile_out, profile_to_json(*d).dump(2) + "\n");
  print_json(out);
  std::cerr << name << " p=" << to_string(p) << " indistinguishable=" << (report.equal ? "true" : "false")
            << " gap=" << to_string(gap) << '\n';
  return report.equal ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// experiment / summarize
// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string out = "results";
  std::size_t threads = 0;
};

int cmd_experiment(const ExperimentArgs& args) {
  ExperimentConfig cfg;
  if (!args.config.empty()) {
    if (!std::filesystem::exists(args.config)) throw UsageError(args.config + ": no such config file");
    cfg = config_from_json(read_json_file(args.config));
  }
  cfg.validate();
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);

  const auto rows = run_sweep(cfg, args.threads);
  const auto summary = summarize(rows);
  write_file_atomic(dir / "results.csv", results_csv(rows));
  write_file_atomic(dir / "summary.csv", summary_csv(summary));
  const Json meta{{"master_seed", cfg.master_seed}, {"config", config_to_json(cfg)}, {"version", kVersion}};
  write_file_atomic(dir / "metadata.json", meta.dump(2) + "\n");

  std::cerr << std::left << std::setw(9) << "model" << std::setw(10) << "rule" << std::setw(13) << "feedback"
            << std::setw(7) << "n" << std::setw(10) << "mean" << "std\n";
  for (const auto& s : summary) {
    std::cerr << std::setw(9) << to_string(s.model) << std::setw(10) << to_string(s.rule) << std::setw(13)
              << to_string(s.mode) << std::setw(7) << s.n << std::setw(10) << std::setprecision(4) << s.mean
              << s.std << '\n';
  }
  std::cerr << rows.size() << " trials written to " << dir.string() << '\n';
  return kOk;
}

struct SummarizeArgs {
  std::string input;
  std::string out;
};

int cmd_summarize(const SummarizeArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw UsageError(args.input + ": cannot open file");
  const auto text = summary_csv(summarize(read_results_csv(in, args.input)));
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(args.out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks and simulations for t-improvement feedback"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check every valid construction tuple over a parameter range");
  verify->add_option("--suite", va.suite, "d_ijl, d_hat, three_block, condorcet, family, top_pair or all")
      ->capture_default_str();
  verify->add_option("--m", va.m, "Candidate counts: 6, 6..8 or 6,7")->capture_default_str();
  verify->add_option("--t", va.t, "Window sizes (values >= m are skipped)")->capture_default_str();
  verify->add_option("--dist", va.dist, "uniform, linear, exponential, a comma list, or all")->capture_default_str();
  verify->add_option("--lambda", va.lambda, "Exponential decay rate")->capture_default_str();
  verify->add_option("--rule", va.rule, "borda or condorcet")->capture_default_str();

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Compare direct scores with scores recovered from feedback");
  score->add_option("profile", sa.profile, "Profile JSON")->required();
  score->add_option("feedback", sa.feedback, "Feedback distribution JSON")->required();
  score->add_option("--rule", sa.rule, "plurality, veto, borda or s_star");
  score->add_option("--scoring", sa.scoring, "Scoring vector JSON {\"s\": [...]}");
  score->add_option("--lambda1", sa.lambda1, "Plurality coefficient");
  score->add_option("--lambda2", sa.lambda2, "s* coefficient");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Build one construction and check it against its swap");
  construct->add_option("--kind", ca.kind, "d_ijl, d_hat, three_block, condorcet or top_pair")->capture_default_str();
  construct->add_option("--m", ca.m)->capture_default_str();
  construct->add_option("--t", ca.t)->capture_default_str();
  construct->add_option("--dist", ca.dist)->capture_default_str();
  construct->add_option("--lambda", ca.lambda)->capture_default_str();
  construct->add_option("--a", ca.a)->capture_default_str();
  construct->add_option("--b", ca.b)->capture_default_str();
  construct->add_option("--i", ca.i)->capture_default_str();
  construct->add_option("--j", ca.j, "Defaults to m");
  construct->add_option("--l", ca.l)->capture_default_str();
  construct->add_option("--rule", ca.rule, "Gap reported: borda or condorcet")->capture_default_str();
  construct->add_option("--profile-out", ca.profile_out, "Also write the profile JSON here");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Run the simulation sweep");
  experiment->add_option("--config", ea.config, "Config JSON (defaults when omitted)");
  experiment->add_option("--out", ea.out, "Output directory")->capture_default_str();
  experiment->add_option("--threads", ea.threads, "Worker threads (0: TFEEDBACK_THREADS or hardware)");

  SummarizeArgs ua;
  auto* summarize_cmd = app.add_subcommand("summarize", "Reduce a results CSV to a summary CSV");
  summarize_cmd->add_option("results", ua.input, "results.csv")->required();
  summarize_cmd->add_option("--out", ua.out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(va);
    if (*score) return cmd_score(sa);
    if (*construct) return cmd_construct(ca);
    if (*experiment) return cmd_experiment(ea);
    if (*summarize_cmd) return cmd_summarize(ua);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kUsage;
  } catch (const NonMonotone& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
