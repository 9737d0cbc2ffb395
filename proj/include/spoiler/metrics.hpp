#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "spoiler/cultures.hpp"
#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/parallel.hpp"
#include "spoiler/random.hpp"
#include "spoiler/rules.hpp"

namespace spoiler {

// Excess electoral impact of party i: || s - s' ||_1 - 2 s_i, where s' is the outcome without
// party i embedded with a zero at coordinate i. Equals 2 (G_i - s_i) with G_i the total gain of
// the parties whose share grows, and is never negative.
inline double excess_impact(const Allocation& full, const Allocation& restricted, int i) {
  if (full.size() != restricted.size()) throw DimensionError("allocations differ in length");
  if (i < 0 || i >= full.size()) throw DimensionError("party index out of range");
  if (restricted[i] > kShareTolerance) {
    throw DimensionError("restricted allocation must be zero at the removed party");
  }
  double l1 = 0.0;
  for (int j = 0; j < full.size(); ++j) l1 += std::abs(full[j] - restricted[j]);
  const double lambda = l1 - 2.0 * full[i];
  if (lambda < -kShareTolerance) throw DomainError("negative excess impact; inputs are not allocations");
  return std::max(0.0, lambda);
}

// Total gain of parties j != i whose share increases.
inline double spoilee_gain(const Allocation& full, const Allocation& restricted, int i) {
  double g = 0.0;
  for (int j = 0; j < full.size(); ++j) {
    if (j != i && restricted[j] > full[j]) g += restricted[j] - full[j];
  }
  return g;
}

// L1 distance from s' to the redistribution region R_i = conv{ s + s_i (e_j - e_i) : j != i },
// computed directly: x = s + s_i (alpha - e_i) with alpha on the simplex over j != i. The
// objective sum_j |s_i alpha_j - (s'_j - s_j)| is separable with slopes -s_i / +s_i, so mass is
// poured into coordinates with positive deficit first.
inline double distance_to_redistribution_region(const Allocation& full, const Allocation& restricted, int i) {
  if (full.size() != restricted.size()) throw DimensionError("allocations differ in length");
  const int p = full.size();
  const double si = full[i];
  std::vector<double> alpha(static_cast<std::size_t>(p), 0.0);
  double budget = 1.0;
  if (si > 0.0) {
    for (int j = 0; j < p && budget > 0.0; ++j) {
      if (j == i) continue;
      const double deficit = restricted[j] - full[j];
      if (deficit > 0.0) {
        const double a = std::min(budget, deficit / si);
        alpha[static_cast<std::size_t>(j)] = a;
        budget -= a;
      }
    }
    if (budget > 0.0) {
      const int sink = i == 0 ? (p > 1 ? 1 : 0) : 0;
      alpha[static_cast<std::size_t>(sink)] += budget;
    }
  }
  double dist = restricted[i];
  for (int j = 0; j < p; ++j) {
    if (j == i) continue;
    const double x = full[j] + si * alpha[static_cast<std::size_t>(j)];
    dist += std::abs(x - restricted[j]);
  }
  return dist;
}

// Reporting scale for excess impact. L1 is the definition above; Half reports G_i - s_i, which is
// the scale of the published replication figures.
enum class ImpactScale { L1, Half };

inline std::string_view scale_name(ImpactScale s) { return s == ImpactScale::L1 ? "l1" : "half"; }

inline ImpactScale parse_scale(std::string_view s) {
  if (s == "l1") return ImpactScale::L1;
  if (s == "half") return ImpactScale::Half;
  throw ConfigError("unknown impact scale '" + std::string(s) + "'");
}

inline double scale_factor(ImpactScale s) { return s == ImpactScale::L1 ? 1.0 : 0.5; }

struct ImpactReport {
  std::vector<double> per_party_lambda;
  std::vector<std::vector<int>> spoilees;  // L_i: parties gaining share when i is removed
  std::vector<Allocation> restricted;      // s(E_{-i}) embedded in the p-simplex
  Allocation full;
  double max_lambda = 0.0;
  int argmax_party = 0;
};

using AllocationFn = std::function<Allocation(const MultiDistrictElection&)>;

inline ImpactReport impact_report(const MultiDistrictElection& e, const AllocationFn& allocate) {
  const int p = e.num_parties();
  if (p < 2) throw DomainError("impact report needs at least two parties");
  ImpactReport r;
  r.full = allocate(e);
  for (int i = 0; i < p; ++i) {
    const Allocation s = allocate(remove_party(e, i)).embed_zero(i);
    const double lambda = excess_impact(r.full, s, i);
    std::vector<int> gainers;
    for (int j = 0; j < p; ++j) {
      if (j != i && s[j] > r.full[j]) gainers.push_back(j);
    }
    r.per_party_lambda.push_back(lambda);
    r.spoilees.push_back(std::move(gainers));
    r.restricted.push_back(s);
    if (i == 0 || lambda > r.max_lambda) {
      r.max_lambda = lambda;
      r.argmax_party = i;
    }
  }
  return r;
}

inline ImpactReport impact_report(const MultiDistrictElection& e, const RuleSpec& spec) {
  return impact_report(e, [&](const MultiDistrictElection& x) { return rule_allocation(x, spec); });
}

struct SusceptibilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

inline SusceptibilityEstimate summarize(const std::vector<double>& values) {
  SusceptibilityEstimate est;
  est.samples = static_cast<long long>(values.size());
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / double(values.size());
  if (values.size() > 1) {
    // Deviations from the first value, so a constant sample has exactly zero spread.
    const double n = double(values.size());
    double d = 0.0, dd = 0.0;
    for (double v : values) {
      d += v - values[0];
      dd += (v - values[0]) * (v - values[0]);
    }
    est.std_error = std::sqrt(std::max(0.0, (dd - d * d / n) / (n - 1.0)) / n);
  }
  return est;
}

using ElectionSource = std::function<MultiDistrictElection(std::uint64_t seed)>;

// Per-sample maximum excess impact; sample s uses election seed derive_seed(seed, s), so results
// do not depend on the worker count.
inline std::vector<double> susceptibility_samples(const ElectionSource& source, const AllocationFn& allocate,
                                                  long long samples, std::uint64_t seed, int threads = 1,
                                                  ImpactScale scale = ImpactScale::L1) {
  if (samples < 1) throw DomainError("susceptibility needs at least one sample");
  const double factor = scale_factor(scale);
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    MultiDistrictElection e;
    try {
      e = source(derive_seed(seed, s));
    } catch (const std::exception& ex) {
      throw Error("culture generation failed at sample " + std::to_string(s) + ": " + ex.what());
    }
    values[s] = factor * impact_report(e, allocate).max_lambda;
  });
  return values;
}

inline SusceptibilityEstimate susceptibility(const CultureSpec& culture, const AllocationFn& allocate,
                                             long long samples, std::uint64_t seed, int threads = 1,
                                             ImpactScale scale = ImpactScale::L1) {
  const ElectionSource source = [culture](std::uint64_t s) {
    CultureSpec c = culture;
    c.seed = s;
    return generate(c);
  };
  return summarize(susceptibility_samples(source, allocate, samples, seed, threads, scale));
}

inline SusceptibilityEstimate susceptibility(const CultureSpec& culture, const RuleSpec& spec,
                                             long long samples, std::uint64_t seed, int threads = 1,
                                             ImpactScale scale = ImpactScale::L1) {
  return susceptibility(
      culture, [spec](const MultiDistrictElection& e) { return rule_allocation(e, spec); }, samples, seed,
      threads, scale);
}

}  // namespace spoiler
