#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spoiler/case_study.hpp"
#include "spoiler/election_io.hpp"
#include "spoiler/experiment.hpp"
#include "spoiler/toy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  void open(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw spoiler::ConfigError("cannot open output file '" + path + "'");
    stream = &file;
  }
};

struct SimulateArgs {
  std::string plan;
  std::string out;
  int threads = spoiler::default_threads();
  std::optional<unsigned long long> seed;
  std::optional<std::string> outcome;
  std::optional<std::string> scale;
};

int run_simulate(const SimulateArgs& a) {
  auto plan = spoiler::load_plan(a.plan);
  if (a.seed) plan.master_seed = *a.seed;
  if (a.outcome) plan.outcomes = {spoiler::parse_outcome(*a.outcome)};
  if (a.scale) plan.scale = spoiler::parse_scale(*a.scale);
  Output out;
  out.open(a.out);
  *out.stream << spoiler::kResultHeader << '\n' << std::flush;
  std::mutex mu;
  int failed = 0;
  spoiler::run_plan(plan, a.threads, [&](const spoiler::ResultRow& r) {
    std::lock_guard<std::mutex> lock(mu);
    spoiler::write_result_row(*out.stream, r);
    out.stream->flush();
    if (!r.ok()) {
      ++failed;
      std::cerr << "cell " << r.culture << '/' << r.rule << " p=" << r.p << " k=" << r.k << " failed: " << r.error << '\n';
    }
  });
  return failed ? kExitPartial : kExitOk;
}

struct ToyArgs {
  int config = 1;
  int k = 2;
  std::string rule = "kpav";
  long long samples = 200000;
  unsigned long long seed = 1;
  int threads = spoiler::default_threads();
  std::string scale = "half";
};

int run_toy(const ToyArgs& a) {
  const auto rule = spoiler::parse_rule(a.rule);
  if (!spoiler::toy::is_toy_rule(rule)) throw spoiler::ConfigError("toy model supports sntv, kborda, cc, hb, kpav");
  if (a.config < 1 || a.config > 6) throw spoiler::ConfigError("--config must be 1..6");
  if (a.k < 1) throw spoiler::ConfigError("--k must be >= 1");
  if (a.samples < 1) throw spoiler::ConfigError("--samples must be >= 1");
  const auto scale = spoiler::parse_scale(a.scale);
  const auto est = spoiler::toy::toy_susceptibility({a.k, a.config}, rule, a.samples, a.seed, a.threads, scale);
  std::printf("config,k,rule,samples,mean,std_error,seed,scale\n%d,%d,%s,%lld,%.6f,%.6f,%llu,%s\n", a.config, a.k,
              a.rule.c_str(), est.samples, est.mean, est.std_error, a.seed, a.scale.c_str());
  return kExitOk;
}

struct CaseStudyArgs {
  std::string parties;
  std::string districts;
  std::string out;
  double party_threshold = 0.05;
  double coalition_threshold = 0.08;
  bool inclusive = false;
  bool no_reapply = false;
  std::string scale = "half";
  int threads = 1;
};

int run_case_study(const CaseStudyArgs& a) {
  std::ifstream pin(a.parties);
  if (!pin) throw spoiler::ConfigError("cannot open party metadata '" + a.parties + "'");
  std::ifstream din(a.districts);
  if (!din) throw spoiler::ConfigError("cannot open district file '" + a.districts + "'");
  spoiler::ShareElection e;
  e.parties = spoiler::read_party_metadata(pin);
  e.districts = spoiler::read_district_votes(din, e.num_parties());
  e.party_threshold = a.party_threshold;
  e.coalition_threshold = a.coalition_threshold;
  e.strict_threshold = !a.inclusive;
  spoiler::CaseStudyOptions opt;
  opt.reapply_thresholds = !a.no_reapply;
  opt.scale = spoiler::parse_scale(a.scale);
  opt.threads = a.threads;
  const auto report = spoiler::case_study_lambda(e, opt);
  Output out;
  out.open(a.out);
  spoiler::write_case_study_report(*out.stream, report);
  if (report.tie) std::cerr << "note: an electoral tie was resolved by interpolation (fractional seats)\n";
  return kExitOk;
}

struct EvalArgs {
  std::string election;
  std::string rule = "sntv";
  std::optional<std::string> solver;
  std::string outcome = "seats";
  std::string scale = "half";
};

int run_eval(const EvalArgs& a) {
  std::ifstream in(a.election);
  if (!in) throw spoiler::ConfigError("cannot open election file '" + a.election + "'");
  const auto e = spoiler::read_election(in);
  auto spec = spoiler::RuleSpec::defaults(spoiler::parse_rule(a.rule));
  if (a.solver) spec.solver = spoiler::parse_solver(*a.solver);
  if (!spec.valid()) throw spoiler::ConfigError("solver is not available for " + spec.name());
  const auto outcome = spoiler::parse_outcome(a.outcome);
  const double factor = spoiler::scale_factor(spoiler::parse_scale(a.scale));
  const long long seats = std::accumulate(e.seats().begin(), e.seats().end(), 0LL);
  const auto report = spoiler::impact_report(e, [&](const spoiler::MultiDistrictElection& x) {
    return spoiler::power_of(spoiler::rule_allocation(x, spec), outcome, seats);
  });
  std::printf("party,share,lambda,spoilees\n");
  for (int i = 0; i < e.num_parties(); ++i) {
    std::string gainers;
    for (int j : report.spoilees[static_cast<std::size_t>(i)]) gainers += (gainers.empty() ? "" : ";") + e.roster().name(j);
    std::printf("%s,%.6f,%.6f,%s\n", e.roster().name(i).c_str(), report.full[i],
                factor * report.per_party_lambda[static_cast<std::size_t>(i)], gainers.c_str());
  }
  std::printf("# max lambda %.6f (party %s)\n", factor * report.max_lambda, e.roster().name(report.argmax_party).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spoiler susceptibility of multi-district party elections"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment grid from a JSON plan");
  simulate->add_option("--plan", sim.plan, "Plan file (JSON)")->required();
  simulate->add_option("--out", sim.out, "Result table (default: stdout)");
  simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Override the plan's master seed");
  simulate->add_option("--outcome", sim.outcome, "seats | banzhaf | shapley (overrides the plan)");
  simulate->add_option("--scale", sim.scale, "Impact scale: half | l1 (overrides the plan)");

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("toy", "Three-party single-peaked toy model");
  toy_cmd->add_option("--config", toy.config, "Configuration 1..6");
  toy_cmd->add_option("--k", toy.k, "Seats");
  toy_cmd->add_option("--rule", toy.rule, "sntv | kborda | cc | hb | kpav");
  toy_cmd->add_option("--samples", toy.samples, "Number of Q samples");
  toy_cmd->add_option("--seed", toy.seed, "Seed");
  toy_cmd->add_option("--threads", toy.threads, "Worker threads")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--scale", toy.scale, "Impact scale: half | l1");

  CaseStudyArgs cs;
  auto* case_cmd = app.add_subcommand("case-study", "Threshold JDH election with counterfactual party removal");
  case_cmd->add_option("--parties", cs.parties, "Party metadata CSV (name,kind,x,y)")->required();
  case_cmd->add_option("--districts", cs.districts, "District votes CSV (district_id,k,votes...)")->required();
  case_cmd->add_option("--out", cs.out, "Report file (default: stdout)");
  case_cmd->add_option("--party-threshold", cs.party_threshold, "National threshold for parties");
  case_cmd->add_option("--coalition-threshold", cs.coalition_threshold, "National threshold for coalitions");
  case_cmd->add_flag("--inclusive-threshold", cs.inclusive, "Eligible at exactly the threshold");
  case_cmd->add_flag("--no-reapply-thresholds", cs.no_reapply, "Keep the original eligible set after removal");
  case_cmd->add_option("--scale", cs.scale, "Impact scale: half | l1");
  case_cmd->add_option("--threads", cs.threads, "Worker threads")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* rules_cmd = app.add_subcommand("rules", "Single-election tools");
  rules_cmd->require_subcommand(1);
  auto* eval = rules_cmd->add_subcommand("eval", "Allocation and excess impact for one election file");
  eval->add_option("--election", ev.election, "Election text file")->required();
  eval->add_option("--rule", ev.rule, "sntv | kborda | cc | hb | kpav | stv | jdh | jdh-potladle");
  eval->add_option("--solver", ev.solver, "exact | greedy | formula");
  eval->add_option("--outcome", ev.outcome, "seats | banzhaf | shapley");
  eval->add_option("--scale", ev.scale, "Impact scale: half | l1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*toy_cmd) return run_toy(toy);
    if (*case_cmd) return run_case_study(cs);
    if (*eval) return run_eval(ev);
  } catch (const spoiler::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const spoiler::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
