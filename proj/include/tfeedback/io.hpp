#pragma once

/**
 * @file io.hpp
 * @brief JSON and CSV formats: profiles, feedback distributions, scoring
 *        vectors, experiment configs and result tables.
 *
 * Rationals travel as strings ("3/5", "0.25") or JSON integers.
 */

#include "tfeedback/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace tfeedback {

using Json = nlohmann::json;

/// Malformed or schema-violating input. `where` names the file or field.
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& what) {
  if (!j.is_object()) throw FormatError(what + ": expected a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw FormatError(what + ": unknown field '" + k + "'");
  }
}

inline const Json& require(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw FormatError(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::size_t to_index(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw FormatError(what + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

inline std::size_t key_index(const std::string& key, const std::string& what) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(key, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != key.size()) throw FormatError(what + ": '" + key + "' is not an index");
  return v;
}

}  // namespace detail

inline Rational rational_from_json(const Json& j, const std::string& what = "value") {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw FormatError(what + ": " + e.what());
    }
  }
  throw FormatError(what + ": expected a rational string such as \"1/3\" or an integer");
}

inline Json rational_to_json(const Rational& r) { return to_string(r); }

/// Parses text, reporting the byte offset of syntax errors.
inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

/// Writes through a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw FormatError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError(path.string() + ": rename failed");
  }
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

inline PreferenceProfile profile_from_json(const Json& j) {
  const std::string what = "profile";
  detail::allow_keys(j, {"m", "blocks", "explicit"}, what);
  const std::size_t m = detail::to_index(detail::require(j, "m", what), what + ".m");
  if (j.contains("blocks") == j.contains("explicit")) {
    throw FormatError(what + ": give exactly one of 'blocks' or 'explicit'");
  }
  try {
    if (j.contains("blocks")) {
      PreferenceProfile::BlockMixture blocks;
      for (const auto& b : j.at("blocks")) {
        detail::allow_keys(b, {"weight", "pins"}, what + ".blocks[]");
        Block block{rational_from_json(detail::require(b, "weight", what), what + ".weight"), {}};
        if (b.contains("pins")) {
          for (const auto& [key, pos] : b.at("pins").items()) {
            block.pins.emplace(Candidate(detail::key_index(key, what + ".pins")),
                               detail::to_index(pos, what + ".pins"));
          }
        }
        blocks.push_back(std::move(block));
      }
      return PreferenceProfile::block_mixture(m, std::move(blocks));
    }
    std::vector<std::pair<Ranking, Rational>> entries;
    for (const auto& e : j.at("explicit")) {
      detail::allow_keys(e, {"ranking", "weight"}, what + ".explicit[]");
      std::vector<std::size_t> order;
      for (const auto& c : detail::require(e, "ranking", what)) {
        order.push_back(detail::to_index(c, what + ".ranking"));
      }
      entries.emplace_back(Ranking::from_indices(order),
                           rational_from_json(detail::require(e, "weight", what), what + ".weight"));
    }
    return PreferenceProfile::explicit_form(m, entries);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline Json profile_to_json(const PreferenceProfile& d) {
  Json j{{"m", d.m()}};
  if (d.is_block_mixture()) {
    Json blocks = Json::array();
    for (const auto& b : d.blocks()) {
      Json pins = Json::object();
      for (const auto& [c, pos] : b.pins) pins[std::to_string(c.index)] = pos;
      blocks.push_back({{"weight", rational_to_json(b.weight)}, {"pins", pins}});
    }
    j["blocks"] = blocks;
  } else {
    Json entries = Json::array();
    for (const auto& [r, w] : d.explicit_weights()) {
      Json order = Json::array();
      for (auto c : r.order()) order.push_back(c.index);
      entries.push_back({{"ranking", order}, {"weight", rational_to_json(w)}});
    }
    j["explicit"] = entries;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Feedback distributions
// ---------------------------------------------------------------------------

inline FeedbackKind feedback_kind_from_string(const std::string& s) {
  if (s == "uniform") return FeedbackKind::Uniform;
  if (s == "linear") return FeedbackKind::Linear;
  if (s == "exponential" || s == "exp") return FeedbackKind::Exponential;
  if (s == "custom") return FeedbackKind::Custom;
  throw FormatError("unknown feedback kind '" + s + "'");
}

inline FeedbackDistribution feedback_from_json(const Json& j) {
  const std::string what = "feedback";
  detail::allow_keys(j, {"m", "t", "kind", "lambda", "rows"}, what);
  const std::size_t m = detail::to_index(detail::require(j, "m", what), what + ".m");
  const std::size_t t = detail::to_index(detail::require(j, "t", what), what + ".t");
  const auto kind = feedback_kind_from_string(detail::require(j, "kind", what).get<std::string>());
  try {
    switch (kind) {
      case FeedbackKind::Uniform: return uniform_feedback(m, t);
      case FeedbackKind::Linear: return linear_decay_feedback(m, t);
      case FeedbackKind::Exponential:
        return exp_decay_feedback(
            m, t, j.contains("lambda") ? rational_from_json(j.at("lambda"), what + ".lambda") : Rational(1, 2));
      case FeedbackKind::Custom: {
        std::map<std::size_t, std::map<std::size_t, Rational>> rows;
        for (const auto& [ik, row] : detail::require(j, "rows", what).items()) {
          const std::size_t i = detail::key_index(ik, what + ".rows");
          for (const auto& [jk, v] : row.items()) {
            rows[i][detail::key_index(jk, what + ".rows")] = rational_from_json(v, what + ".rows");
          }
        }
        return custom_feedback(m, t, rows);
      }
    }
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(what + ": " + e.what());
  }
  throw FormatError(what + ": unknown kind");
}

inline Json feedback_to_json(const FeedbackDistribution& fd) {
  Json j{{"m", fd.m()}, {"t", fd.t()}, {"kind", to_string(fd.kind())}};
  if (fd.lambda()) j["lambda"] = rational_to_json(*fd.lambda());
  if (fd.kind() == FeedbackKind::Custom) {
    Json rows = Json::object();
    for (std::size_t i = 2; i <= fd.m(); ++i) {
      Json row = Json::object();
      for (std::size_t k = 1; k < i; ++k) {
        if (fd.p(i, k) != 0) row[std::to_string(k)] = rational_to_json(fd.p(i, k));
      }
      rows[std::to_string(i)] = row;
    }
    j["rows"] = rows;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Scoring vectors
// ---------------------------------------------------------------------------

/// Presets: plurality, veto, borda, s_star (needs fd).
inline ScoringVector scoring_preset(const std::string& name, const FeedbackDistribution& fd) {
  const std::size_t m = fd.m();
  if (name == "plurality") return plurality_vector(m);
  if (name == "veto") return veto_vector(m);
  if (name == "borda") return borda_vector(m);
  if (name == "s_star") return s_star(fd);
  throw FormatError("unknown scoring preset '" + name + "'");
}

inline ScoringVector scoring_from_json(const Json& j) {
  detail::allow_keys(j, {"s"}, "scoring");
  std::vector<Rational> s;
  for (const auto& v : detail::require(j, "s", "scoring")) s.push_back(rational_from_json(v, "scoring.s"));
  try {
    return ScoringVector(std::move(s));
  } catch (const Error& e) {
    throw FormatError(std::string("scoring: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Experiment configs
// ---------------------------------------------------------------------------

inline Model model_from_string(const std::string& s) {
  if (s == "IC" || s == "ic") return Model::IC;
  if (s == "Mallows" || s == "mallows") return Model::Mallows;
  if (s == "PL" || s == "pl") return Model::PL;
  throw FormatError("unknown model '" + s + "'");
}

inline Rule rule_from_string(const std::string& s) {
  if (s == "borda") return Rule::Borda;
  if (s == "copeland") return Rule::Copeland;
  throw FormatError("unknown rule '" + s + "'");
}

inline QueryMode mode_from_string(const std::string& s) {
  if (s == "improvement") return QueryMode::Improvement;
  if (s == "pairwise") return QueryMode::Pairwise;
  throw FormatError("unknown feedback mode '" + s + "'");
}

/// Missing fields keep their defaults. n_values is a list or
/// {"start", "stop", "step"} (inclusive stop).
inline ExperimentConfig config_from_json(const Json& j) {
  const std::string what = "config";
  detail::allow_keys(j, {"m", "t", "feedback", "lambda", "model", "phi", "n_values", "iterations",
                         "master_seed", "rules", "modes"},
                     what);
  ExperimentConfig cfg;
  try {
    if (j.contains("m")) cfg.m = detail::to_index(j.at("m"), what + ".m");
    if (j.contains("t")) cfg.t = detail::to_index(j.at("t"), what + ".t");
    if (j.contains("feedback")) cfg.feedback_kind = feedback_kind_from_string(j.at("feedback").get<std::string>());
    if (j.contains("lambda")) cfg.lambda = rational_from_json(j.at("lambda"), what + ".lambda");
    if (j.contains("model")) cfg.model = model_from_string(j.at("model").get<std::string>());
    if (j.contains("phi")) {
      if (!j.at("phi").is_number()) throw FormatError(what + ".phi: expected a number");
      cfg.phi = j.at("phi").get<double>();
    }
    if (j.contains("n_values")) {
      const auto& nv = j.at("n_values");
      cfg.n_values.clear();
      if (nv.is_array()) {
        for (const auto& n : nv) cfg.n_values.push_back(detail::to_index(n, what + ".n_values"));
      } else {
        detail::allow_keys(nv, {"start", "stop", "step"}, what + ".n_values");
        const auto start = detail::to_index(detail::require(nv, "start", what), what + ".n_values.start");
        const auto stop = detail::to_index(detail::require(nv, "stop", what), what + ".n_values.stop");
        const auto step = detail::to_index(detail::require(nv, "step", what), what + ".n_values.step");
        if (step == 0) throw FormatError(what + ".n_values.step must be positive");
        for (auto n = start; n <= stop; n += step) cfg.n_values.push_back(n);
      }
    }
    if (j.contains("iterations")) cfg.iterations = detail::to_index(j.at("iterations"), what + ".iterations");
    if (j.contains("master_seed")) {
      if (!j.at("master_seed").is_number_unsigned()) throw FormatError(what + ".master_seed: expected an unsigned integer");
      cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("rules")) {
      cfg.rules.clear();
      for (const auto& r : j.at("rules")) cfg.rules.push_back(rule_from_string(r.get<std::string>()));
    }
    if (j.contains("modes")) {
      cfg.modes.clear();
      for (const auto& q : j.at("modes")) cfg.modes.push_back(mode_from_string(q.get<std::string>()));
    }
    cfg.validate();
  } catch (const Json::type_error& e) {
    throw FormatError(what + ": " + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(what + ": " + e.what());
  }
  return cfg;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json rules = Json::array();
  for (auto r : cfg.rules) rules.push_back(to_string(r));
  Json modes = Json::array();
  for (auto q : cfg.modes) modes.push_back(to_string(q));
  Json j{{"m", cfg.m},
         {"t", cfg.t},
         {"feedback", to_string(cfg.feedback_kind)},
         {"model", to_string(cfg.model)},
         {"n_values", cfg.n_values},
         {"iterations", cfg.iterations},
         {"master_seed", cfg.master_seed},
         {"rules", rules},
         {"modes", modes}};
  if (cfg.feedback_kind == FeedbackKind::Exponential) j["lambda"] = rational_to_json(cfg.lambda);
  if (cfg.model == Model::Mallows) {
    j["phi"] = cfg.phi;
    j["mallows_centre"] = "identity";
  }
  return j;
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

inline std::vector<TrialResult> read_results_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw FormatError(source + ": header must be '" + std::string(kResultsHeader) + "'");
  }
  std::vector<TrialResult> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const std::string where = source + ":" + std::to_string(lineno);
    if (cells.size() != 6) throw FormatError(where + ": expected 6 columns");
    TrialResult r;
    try {
      r.model = model_from_string(cells[0]);
      r.rule = rule_from_string(cells[1]);
      r.mode = mode_from_string(cells[2]);
      r.n = detail::key_index(cells[3], "n");
      r.trial = detail::key_index(cells[4], "trial");
      std::size_t pos = 0;
      r.ratio = std::stod(cells[5], &pos);
      if (pos != cells[5].size()) throw FormatError("bad ratio");
    } catch (const std::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    out.push_back(r);
  }
  return out;
}

inline std::string results_csv(const std::vector<TrialResult>& results) {
  std::ostringstream os;
  write_results_csv(os, results);
  return os.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  write_summary_csv(os, rows);
  return os.str();
}

}  // namespace tfeedback
