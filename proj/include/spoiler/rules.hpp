#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/jdh.hpp"
#include "spoiler/owa.hpp"
#include "spoiler/scoring.hpp"
#include "spoiler/stv.hpp"

namespace spoiler {

enum class Rule { Sntv, KBorda, CC, HB, KPav, Stv, Jdh, JdhPotLadle };
enum class Solver { Exact, Greedy, Formula };

inline constexpr std::array<Rule, 8> kAllRules = {Rule::Sntv, Rule::KBorda, Rule::CC,  Rule::HB,
                                                  Rule::KPav, Rule::Stv,    Rule::Jdh, Rule::JdhPotLadle};

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Sntv: return "sntv";
    case Rule::KBorda: return "kborda";
    case Rule::CC: return "cc";
    case Rule::HB: return "hb";
    case Rule::KPav: return "kpav";
    case Rule::Stv: return "stv";
    case Rule::Jdh: return "jdh";
    case Rule::JdhPotLadle: return "jdh-potladle";
  }
  return "?";
}

inline std::string_view solver_name(Solver s) {
  switch (s) {
    case Solver::Exact: return "exact";
    case Solver::Greedy: return "greedy";
    case Solver::Formula: return "formula";
  }
  return "?";
}

inline Rule parse_rule(std::string_view s) {
  for (Rule r : kAllRules) {
    if (rule_name(r) == s) return r;
  }
  throw ConfigError("unknown rule '" + std::string(s) + "'");
}

inline Solver parse_solver(std::string_view s) {
  for (Solver v : {Solver::Exact, Solver::Greedy, Solver::Formula}) {
    if (solver_name(v) == s) return v;
  }
  throw ConfigError("unknown solver '" + std::string(s) + "'");
}

inline bool is_owa_rule(Rule r) {
  return r == Rule::Sntv || r == Rule::KBorda || r == Rule::CC || r == Rule::HB || r == Rule::KPav;
}

struct RuleSpec {
  Rule rule = Rule::Sntv;
  Solver solver = Solver::Exact;
  double enumeration_cap = kDefaultEnumerationCap;

  // Solver used in the experiment grid: greedy for CC/HB/kPAV, formula for Pot & Ladle.
  static RuleSpec defaults(Rule r) {
    RuleSpec s{r, Solver::Exact};
    if (r == Rule::CC || r == Rule::HB || r == Rule::KPav) s.solver = Solver::Greedy;
    if (r == Rule::JdhPotLadle) s.solver = Solver::Formula;
    return s;
  }

  bool valid() const {
    if (solver == Solver::Greedy) return rule == Rule::CC || rule == Rule::HB || rule == Rule::KPav;
    if (solver == Solver::Formula) return rule == Rule::JdhPotLadle;
    return rule != Rule::JdhPotLadle;
  }

  std::string name() const { return std::string(rule_name(rule)); }
};

// (scoring vector, OWA vector) of an OWA-based rule for m candidates and k seats.
inline std::pair<ScoringVector, OwaVector> owa_vectors(Rule r, int m, int k) {
  switch (r) {
    case Rule::Sntv: return {{approval_vector(1, m)}, {approval_vector(1, k)}};
    case Rule::KBorda: return {{borda_vector(m)}, {approval_vector(k, k)}};
    case Rule::CC: return {{borda_vector(m)}, {approval_vector(1, k)}};
    case Rule::HB: return {{borda_vector(m)}, {harmonic_vector(k)}};
    case Rule::KPav: return {{approval_vector(k, m)}, {harmonic_vector(k)}};
    default: throw DomainError(std::string(rule_name(r)) + " is not an OWA-based rule");
  }
}

// Allocation of one district with k seats.
inline Allocation district_allocation(const DistrictElection& e, int k, const RuleSpec& spec) {
  if (!spec.valid()) {
    throw ConfigError("solver '" + std::string(solver_name(spec.solver)) + "' is not available for " +
                      spec.name());
  }
  if (spec.rule == Rule::Jdh) return jdh_exact(first_preference_shares(e), k).allocation;
  if (spec.rule == Rule::JdhPotLadle) return jdh_pot_ladle(first_preference_shares(e), k);
  // Seats cannot exceed the candidate supply; a restricted district may hold fewer than k candidates.
  const int seats = std::min(k, e.num_candidates());
  if (spec.rule == Rule::Stv) return stv(e, seats).allocation(e);
  if (spec.solver == Solver::Exact && spec.rule == Rule::Sntv) {
    return solve_separable_topk(e, seats, SeparableScoring::Plurality);
  }
  if (spec.solver == Solver::Exact && spec.rule == Rule::KBorda) {
    return solve_separable_topk(e, seats, SeparableScoring::Borda);
  }
  const auto [w, z] = owa_vectors(spec.rule, e.num_candidates(), seats);
  if (spec.solver == Solver::Greedy) {
    const Committee c = solve_owa_greedy(e, seats, w, z);
    return allocation_from_committees(std::span<const Committee>(&c, 1), e.affiliation(), e.num_parties());
  }
  const auto winners = solve_owa_exact(e, seats, w, z, spec.enumeration_cap);
  return allocation_from_committees(winners, e.affiliation(), e.num_parties());
}

inline Allocation rule_allocation(const MultiDistrictElection& e, const RuleSpec& spec) {
  std::vector<Allocation> per;
  per.reserve(static_cast<std::size_t>(e.num_districts()));
  for (int d = 0; d < e.num_districts(); ++d) {
    per.push_back(district_allocation(e.district(d), e.seats()[static_cast<std::size_t>(d)], spec));
  }
  return aggregate(per, e.seats());
}

}  // namespace spoiler
