#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spoiler/cultures.hpp"
#include "spoiler/metrics.hpp"
#include "spoiler/power.hpp"
#include "spoiler/rules.hpp"

namespace spoiler {

struct ExperimentPlan {
  std::vector<CultureSpec> cultures;  // p, c, n, k and seed are filled per cell
  std::vector<RuleSpec> rules;
  std::vector<int> p_range = {3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> k_set = {1, 5, 15};
  int c = 100;
  int n = 100;
  long long samples = 600;
  std::vector<Outcome> outcomes = {Outcome::Seats};
  ImpactScale scale = ImpactScale::Half;
  std::uint64_t master_seed = 1;

  void validate() const {
    if (cultures.empty()) throw ConfigError("plan field 'cultures' must not be empty");
    if (rules.empty()) throw ConfigError("plan field 'rules' must not be empty");
    if (p_range.empty()) throw ConfigError("plan field 'p' must not be empty");
    if (k_set.empty()) throw ConfigError("plan field 'k' must not be empty");
    if (outcomes.empty()) throw ConfigError("plan field 'outcome' must not be empty");
    for (int p : p_range) {
      if (p < 2) throw ConfigError("plan field 'p': every entry must be >= 2");
    }
    for (int k : k_set) {
      if (k < 1) throw ConfigError("plan field 'k': every entry must be >= 1");
    }
    if (c < 1) throw ConfigError("plan field 'c' must be >= 1");
    if (n < 1) throw ConfigError("plan field 'n' must be >= 1");
    if (samples < 1) throw ConfigError("plan field 'samples' must be >= 1");
    for (const auto& r : rules) {
      if (!r.valid()) throw ConfigError("plan field 'rules': solver '" + std::string(solver_name(r.solver)) + "' is not available for " + r.name());
    }
    for (const auto& cu : cultures) cu.validate();
  }
};

// The seven rules with the grid solvers; JDH uses the Pot & Ladle formula.
inline std::vector<RuleSpec> default_rules() {
  std::vector<RuleSpec> out;
  for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::HB, Rule::KPav, Rule::Stv, Rule::JdhPotLadle}) {
    out.push_back(RuleSpec::defaults(r));
  }
  return out;
}

// The eleven replication models.
inline std::vector<CultureSpec> default_cultures() {
  std::vector<CultureSpec> out;
  for (int d : {1, 2}) {
    for (double s : {0.05, 0.2}) {
      auto c = culture_from_name(d == 1 ? "spatial1d" : "spatial2d");
      c.sigma = s;
      out.push_back(c);
    }
  }
  for (const char* name : {"walsh", "conitzer"}) {
    for (double s : {0.05, 0.2}) {
      auto c = culture_from_name(name);
      c.sigma = s;
      out.push_back(c);
    }
  }
  for (double phi2 : {0.25, 0.75}) {
    auto c = culture_from_name("mallows");
    c.norm_phi_district = 0.75;
    c.norm_phi_voter = phi2;
    out.push_back(c);
  }
  out.push_back(culture_from_name("ic"));
  return out;
}

namespace detail {
using nlohmann::json;

inline const char* const kPlanFields =
    "cultures, rules, p, k, c, n, samples, outcome, scale, seed";

[[noreturn]] inline void field_error(const std::string& path, const std::string& msg) {
  throw ConfigError("plan field '" + path + "': " + msg);
}

template <class T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    field_error(path, "has the wrong type (" + std::string(j.type_name()) + ")");
  }
}

inline long long get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "must be an integer");
  return j.get<long long>();
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "must be a number");
  return j.get<double>();
}

inline std::vector<int> get_int_list(const json& j, const std::string& path) {
  std::vector<int> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(static_cast<int>(get_int(j[i], path + "/" + std::to_string(i))));
  } else if (j.is_object()) {
    for (const auto& [key, _] : j.items()) {
      if (key != "from" && key != "to") field_error(path + "/" + key, "unknown field (expected from, to)");
    }
    if (!j.contains("from") || !j.contains("to")) field_error(path, "range needs 'from' and 'to'");
    const auto lo = get_int(j["from"], path + "/from"), hi = get_int(j["to"], path + "/to");
    if (hi < lo) field_error(path, "'to' is smaller than 'from'");
    for (long long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
  } else if (j.is_number_integer()) {
    out.push_back(static_cast<int>(get_int(j, path)));
  } else {
    field_error(path, "must be an integer, a list of integers or {\"from\": a, \"to\": b}");
  }
  return out;
}

inline CultureSpec parse_culture(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return culture_from_name(j.get<std::string>());
    } catch (const ConfigError& e) {
      field_error(path, e.what());
    }
  }
  if (!j.is_object()) field_error(path, "must be a culture name or an object with a 'kind'");
  if (!j.contains("kind")) field_error(path + "/kind", "is required");
  CultureSpec c;
  try {
    c = culture_from_name(get_as<std::string>(j["kind"], path + "/kind"));
  } catch (const ConfigError& e) {
    field_error(path + "/kind", e.what());
  }
  for (const auto& [key, value] : j.items()) {
    const std::string at = path + "/" + key;
    if (key == "kind") continue;
    if (key == "sigma") c.sigma = get_number(value, at);
    else if (key == "sigma_is_stddev") c.sigma_is_stddev = get_as<bool>(value, at);
    else if (key == "dimension") c.dimension = static_cast<int>(get_int(value, at));
    else if (key == "phi_district") c.norm_phi_district = get_number(value, at);
    else if (key == "phi_voter") c.norm_phi_voter = get_number(value, at);
    else field_error(at, "unknown field (expected kind, sigma, sigma_is_stddev, dimension, phi_district, phi_voter)");
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    field_error(path, e.what());
  }
  return c;
}

inline RuleSpec parse_rule_spec(const json& j, const std::string& path) {
  RuleSpec r;
  try {
    if (j.is_string()) return RuleSpec::defaults(parse_rule(j.get<std::string>()));
    if (!j.is_object() || !j.contains("rule")) field_error(path, "must be a rule name or an object with a 'rule'");
    r = RuleSpec::defaults(parse_rule(get_as<std::string>(j["rule"], path + "/rule")));
    for (const auto& [key, value] : j.items()) {
      const std::string at = path + "/" + key;
      if (key == "rule") continue;
      if (key == "solver") r.solver = parse_solver(get_as<std::string>(value, at));
      else if (key == "enumeration_cap") r.enumeration_cap = get_number(value, at);
      else field_error(at, "unknown field (expected rule, solver, enumeration_cap)");
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("plan field", 0) == 0) throw;
    field_error(path, what);
  }
  if (!r.valid()) field_error(path, "solver '" + std::string(solver_name(r.solver)) + "' is not available for " + r.name());
  return r;
}
}  // namespace detail

// Parses a JSON plan. Every field is optional; missing fields take the replication defaults.
inline ExperimentPlan parse_plan(const std::string& text) {
  using detail::json;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError(std::string("plan is empty; expected a JSON object with fields: ") + detail::kPlanFields);
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto ? upto - 1 : 0), '\n');
    throw ConfigError("plan is not valid JSON (line " + std::to_string(line) + "): " + e.what());
  }
  if (!j.is_object()) throw ConfigError(std::string("plan must be a JSON object with fields: ") + detail::kPlanFields);

  ExperimentPlan plan;
  plan.cultures = default_cultures();
  plan.rules = default_rules();
  for (const auto& [key, value] : j.items()) {
    const std::string at = "/" + key;
    if (key == "cultures") {
      if (!value.is_array()) detail::field_error(at, "must be a list");
      plan.cultures.clear();
      for (std::size_t i = 0; i < value.size(); ++i) plan.cultures.push_back(detail::parse_culture(value[i], at + "/" + std::to_string(i)));
    } else if (key == "rules") {
      if (!value.is_array()) detail::field_error(at, "must be a list");
      plan.rules.clear();
      for (std::size_t i = 0; i < value.size(); ++i) plan.rules.push_back(detail::parse_rule_spec(value[i], at + "/" + std::to_string(i)));
    } else if (key == "p") {
      plan.p_range = detail::get_int_list(value, at);
    } else if (key == "k") {
      plan.k_set = detail::get_int_list(value, at);
    } else if (key == "c") {
      plan.c = static_cast<int>(detail::get_int(value, at));
    } else if (key == "n") {
      plan.n = static_cast<int>(detail::get_int(value, at));
    } else if (key == "samples") {
      plan.samples = detail::get_int(value, at);
    } else if (key == "seed") {
      plan.master_seed = static_cast<std::uint64_t>(detail::get_int(value, at));
    } else if (key == "outcome") {
      plan.outcomes.clear();
      try {
        if (value.is_string()) {
          plan.outcomes.push_back(parse_outcome(value.get<std::string>()));
        } else if (value.is_array()) {
          for (const auto& o : value) plan.outcomes.push_back(parse_outcome(detail::get_as<std::string>(o, at)));
        } else {
          detail::field_error(at, "must be an outcome name or a list of them");
        }
      } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind("plan field", 0) == 0) throw;
        detail::field_error(at, what);
      }
    } else if (key == "scale") {
      try {
        plan.scale = parse_scale(detail::get_as<std::string>(value, at));
      } catch (const ConfigError& e) {
        detail::field_error(at, e.what());
      }
    } else {
      detail::field_error(at, std::string("unknown field (expected one of ") + detail::kPlanFields + ")");
    }
  }
  plan.validate();
  return plan;
}

inline ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_plan(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

struct ResultRow {
  std::string culture;
  std::string rule;
  int p = 0;
  int k = 0;
  int c = 0;
  int n = 0;
  long long samples = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::string label;
  Outcome outcome = Outcome::Seats;
  ImpactScale scale = ImpactScale::Half;
  CultureSpec params;
  std::string error;  // empty when the cell succeeded

  bool ok() const { return error.empty(); }
};

inline const char* const kResultHeader =
    "culture,rule,p,k,c,n,samples,mean,std_error,seed,label,outcome,scale,dimension,sigma,phi_district,phi_voter,error";

inline std::string culture_key(const CultureSpec& c) { return c.name() + ":" + c.params(); }

// Child seed of one grid cell.
inline std::uint64_t cell_seed(std::uint64_t master, const CultureSpec& culture, const RuleSpec& rule, int p, int k) {
  std::uint64_t s = derive_seed(master, hash_name(culture_key(culture)));
  s = derive_seed(s, hash_name(rule.name() + "/" + std::string(solver_name(rule.solver))));
  s = derive_seed(s, static_cast<std::uint64_t>(p));
  return derive_seed(s, static_cast<std::uint64_t>(k));
}

inline std::string row_label(const RuleSpec& rule, int k) {
  if (k == 1 && (rule.rule == Rule::Sntv || rule.rule == Rule::KPav)) return "fptp";
  return rule.name();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

inline void write_result_row(std::ostream& out, const ResultRow& r) {
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::string(buf);
  };
  const auto kind = r.params.kind;
  const bool has_sigma = kind == CultureKind::Spatial || kind == CultureKind::Walsh || kind == CultureKind::Conitzer;
  out << r.culture << ',' << r.rule << ',' << r.p << ',' << r.k << ',' << r.c << ',' << r.n << ',' << r.samples << ','
      << (r.ok() ? num(r.mean) : "") << ',' << (r.ok() ? num(r.std_error) : "") << ',' << r.seed << ',' << r.label << ','
      << outcome_name(r.outcome) << ',' << scale_name(r.scale) << ','
      << (kind == CultureKind::Spatial ? std::to_string(r.params.dimension) : "") << ','
      << (has_sigma ? num(r.params.sigma) : "") << ','
      << (kind == CultureKind::Mallows ? num(r.params.norm_phi_district) : "") << ','
      << (kind == CultureKind::Mallows ? num(r.params.norm_phi_voter) : "") << ',' << csv_field(r.error) << '\n';
}

// Per-sample maximum excess impact for several outcome notions, all measured on the same elections.
// Sample s draws its election from derive_seed(seed, s).
inline std::vector<std::vector<double>> cell_samples(const CultureSpec& culture, const RuleSpec& rule,
                                                     const std::vector<Outcome>& outcomes, long long samples,
                                                     std::uint64_t seed, int threads, ImpactScale scale) {
  if (samples < 1) throw DomainError("susceptibility needs at least one sample");
  for (Outcome o : outcomes) {
    if (o != Outcome::Seats && culture.p > kPowerEnumerationCap) {
      throw EnumerationInfeasible("power indices need p <= " + std::to_string(kPowerEnumerationCap));
    }
  }
  const double factor = scale_factor(scale);
  std::vector<std::vector<double>> values(outcomes.size(), std::vector<double>(static_cast<std::size_t>(samples)));
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    CultureSpec c = culture;
    c.seed = derive_seed(seed, s);
    MultiDistrictElection e;
    try {
      e = generate(c);
    } catch (const std::exception& ex) {
      throw Error("culture generation failed at sample " + std::to_string(s) + ": " + ex.what());
    }
    const long long seats = std::accumulate(e.seats().begin(), e.seats().end(), 0LL);
    const Allocation full = rule_allocation(e, rule);
    std::vector<Allocation> restricted;
    for (int i = 0; i < e.num_parties(); ++i) restricted.push_back(rule_allocation(remove_party(e, i), rule));
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      const Allocation f = power_of(full, outcomes[o], seats);
      double best = 0.0;
      for (int i = 0; i < e.num_parties(); ++i) {
        const Allocation r = power_of(restricted[static_cast<std::size_t>(i)], outcomes[o], seats).embed_zero(i);
        best = std::max(best, excess_impact(f, r, i));
      }
      values[o][s] = factor * best;
    }
  });
  return values;
}

using RowSink = std::function<void(const ResultRow&)>;

// Runs every (culture, rule, p, k) cell in canonical order and hands each row to `sink` as soon as the
// cell finishes. A failing cell produces rows with the error column set; the grid continues.
inline std::vector<ResultRow> run_plan(const ExperimentPlan& plan, int threads = 1, const RowSink& sink = {}) {
  plan.validate();
  std::vector<ResultRow> rows;
  for (const auto& culture : plan.cultures) {
    for (const auto& rule : plan.rules) {
      for (int p : plan.p_range) {
        for (int k : plan.k_set) {
          CultureSpec c = culture;
          c.p = p;
          c.k = k;
          c.c = plan.c;
          c.n = plan.n;
          const std::uint64_t seed = cell_seed(plan.master_seed, culture, rule, p, k);
          std::vector<ResultRow> cell;
          for (Outcome o : plan.outcomes) {
            ResultRow r;
            r.culture = culture.name();
            r.rule = rule.name();
            r.p = p;
            r.k = k;
            r.c = plan.c;
            r.n = plan.n;
            r.samples = plan.samples;
            r.seed = seed;
            r.label = row_label(rule, k);
            r.outcome = o;
            r.scale = plan.scale;
            r.params = culture;
            cell.push_back(std::move(r));
          }
          try {
            const auto values = cell_samples(c, rule, plan.outcomes, plan.samples, seed, threads, plan.scale);
            for (std::size_t o = 0; o < cell.size(); ++o) {
              const auto est = summarize(values[o]);
              cell[o].mean = est.mean;
              cell[o].std_error = est.std_error;
            }
          } catch (const std::exception& ex) {
            for (auto& r : cell) r.error = ex.what();
          }
          for (auto& r : cell) {
            if (sink) sink(r);
            rows.push_back(std::move(r));
          }
        }
      }
    }
  }
  return rows;
}

// Reads rows written by write_result_row (header required).
inline std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("result table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultHeader) throw ParseError("line 1: result header does not match the expected columns");
  std::vector<ResultRow> out;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cell += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        f.push_back(cell);
        cell.clear();
      } else if (ch != '\r') {
        cell += ch;
      }
    }
    f.push_back(cell);
    if (f.size() != 18) throw ParseError("line " + std::to_string(n) + ": expected 18 fields, got " + std::to_string(f.size()));
    try {
      ResultRow r;
      r.culture = f[0];
      r.rule = f[1];
      r.p = std::stoi(f[2]);
      r.k = std::stoi(f[3]);
      r.c = std::stoi(f[4]);
      r.n = std::stoi(f[5]);
      r.samples = std::stoll(f[6]);
      r.error = f[17];
      if (r.ok()) {
        r.mean = std::stod(f[7]);
        r.std_error = std::stod(f[8]);
      }
      r.seed = std::stoull(f[9]);
      r.label = f[10];
      r.outcome = parse_outcome(f[11]);
      r.scale = parse_scale(f[12]);
      r.params = culture_from_name(r.culture);
      if (!f[13].empty()) r.params.dimension = std::stoi(f[13]);
      if (!f[14].empty()) r.params.sigma = std::stod(f[14]);
      if (!f[15].empty()) r.params.norm_phi_district = std::stod(f[15]);
      if (!f[16].empty()) r.params.norm_phi_voter = std::stod(f[16]);
      out.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace spoiler
