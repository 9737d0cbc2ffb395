#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/rules.hpp"

namespace spoiler {

inline constexpr int kPowerEnumerationCap = 24;
inline constexpr double kPowerGuard = 1e-12;

// Coalition K wins iff weight(K) >= quota, or > quota for a strict game. With integer weights the
// comparison is exact against the rational quota num/den of the total weight.
class WeightedVotingGame {
 public:
  WeightedVotingGame(std::vector<double> weights, double quota, bool strict = false)
      : weights_(std::move(weights)), quota_(quota), strict_(strict) {
    check_weights();
    if (!(quota_ >= 0.5 && quota_ <= 1.0) || (quota_ == 0.5 && !strict_)) {
      throw DomainError("quota must lie in (1/2, 1]");
    }
  }

  static WeightedVotingGame from_integer(std::vector<long long> seats, long long quota_num,
                                         long long quota_den, bool strict) {
    long long total = 0;
    for (long long s : seats) {
      if (s < 0) throw DomainError("seat counts must be nonnegative");
      total += s;
    }
    if (total <= 0) throw DegenerateInput("seat counts are all zero");
    std::vector<double> w;
    for (long long s : seats) w.push_back(double(s) / double(total));
    WeightedVotingGame g(std::move(w), double(quota_num) / double(quota_den), strict);
    g.integer_ = std::move(seats);
    g.total_ = total;
    g.quota_num_ = quota_num;
    g.quota_den_ = quota_den;
    return g;
  }

  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  double quota() const { return quota_; }
  bool strict() const { return strict_; }
  bool exact() const { return !integer_.empty(); }

  bool wins(std::uint64_t mask) const {
    if (exact()) {
      long long s = 0;
      for (int i = 0; i < size(); ++i) {
        if (mask >> i & 1U) s += integer_[static_cast<std::size_t>(i)];
      }
      const __int128 lhs = static_cast<__int128>(s) * quota_den_;
      const __int128 rhs = static_cast<__int128>(quota_num_) * total_;
      return strict_ ? lhs > rhs : lhs >= rhs;
    }
    double s = 0.0;
    for (int i = 0; i < size(); ++i) {
      if (mask >> i & 1U) s += weights_[static_cast<std::size_t>(i)];
    }
    return strict_ ? s > quota_ + kPowerGuard : s >= quota_ - kPowerGuard;
  }

 private:
  void check_weights() const {
    if (weights_.empty()) throw DimensionError("game needs at least one player");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw DomainError("weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > kShareTolerance) throw DomainError("weights must sum to 1");
  }

  std::vector<double> weights_;
  double quota_;
  bool strict_;
  std::vector<long long> integer_;
  long long total_ = 0;
  long long quota_num_ = 0;
  long long quota_den_ = 1;
};

// Right limit q -> 1/2+: a coalition wins iff its weight strictly exceeds one half.
inline WeightedVotingGame majority_limit(std::vector<double> weights) {
  return WeightedVotingGame(std::move(weights), 0.5, true);
}

inline WeightedVotingGame majority_limit(std::vector<long long> seats) {
  return WeightedVotingGame::from_integer(std::move(seats), 1, 2, true);
}

struct BanzhafIndex {
  std::vector<long long> swings;  // coalitions K containing i with K winning and K \ {i} losing
  std::vector<double> absolute;   // psi_i: probability of being pivotal for a uniform coalition
  Allocation normalized;          // beta
};

namespace detail {
inline void check_enumerable(int p) {
  if (p > kPowerEnumerationCap) {
    throw EnumerationInfeasible("power index enumeration capped at " + std::to_string(kPowerEnumerationCap) +
                                " players");
  }
}
}  // namespace detail

inline BanzhafIndex banzhaf(const WeightedVotingGame& g) {
  const int p = g.size();
  detail::check_enumerable(p);
  BanzhafIndex r;
  r.swings.assign(static_cast<std::size_t>(p), 0);
  const std::uint64_t full = std::uint64_t{1} << p;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    if (!g.wins(mask)) continue;
    for (int i = 0; i < p; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((mask & bit) && !g.wins(mask ^ bit)) ++r.swings[static_cast<std::size_t>(i)];
    }
  }
  const long long total = std::accumulate(r.swings.begin(), r.swings.end(), 0LL);
  // With weights summing to 1 and quota <= 1 the grand coalition wins, so someone swings.
  if (total == 0) throw DegenerateInput("no pivotal player in the game");
  std::vector<double> beta(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    // Pivotal both as a joiner (K without i) and a leaver (K with i): 2 swings / 2^p.
    r.absolute.push_back(double(r.swings[static_cast<std::size_t>(i)]) / double(full >> 1));
    beta[static_cast<std::size_t>(i)] = double(r.swings[static_cast<std::size_t>(i)]) / double(total);
  }
  r.normalized = Allocation(std::move(beta));
  return r;
}

// Shapley-Shubik index by the subset formula: sum over losing K not containing i with K + i winning
// of |K|! (p - |K| - 1)! / p!.
inline Allocation shapley_shubik(const WeightedVotingGame& g) {
  const int p = g.size();
  detail::check_enumerable(p);
  std::vector<double> coef(static_cast<std::size_t>(p));
  for (int s = 0; s < p; ++s) {
    // s! (p-s-1)! / p! = 1 / (p * C(p-1, s))
    double c = 1.0;
    for (int j = 1; j <= s; ++j) c = c * double(p - 1 - s + j) / double(j);
    coef[static_cast<std::size_t>(s)] = 1.0 / (double(p) * c);
  }
  std::vector<double> phi(static_cast<std::size_t>(p), 0.0);
  const std::uint64_t full = std::uint64_t{1} << p;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    if (g.wins(mask)) continue;
    const int size = std::popcount(mask);
    for (int i = 0; i < p; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (!(mask & bit) && g.wins(mask | bit)) phi[static_cast<std::size_t>(i)] += coef[static_cast<std::size_t>(size)];
    }
  }
  return Allocation(std::move(phi));
}

enum class Outcome { Seats, Banzhaf, Shapley };

inline std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Seats: return "seats";
    case Outcome::Banzhaf: return "banzhaf";
    case Outcome::Shapley: return "shapley";
  }
  return "?";
}

inline Outcome parse_outcome(std::string_view s) {
  for (Outcome o : {Outcome::Seats, Outcome::Banzhaf, Outcome::Shapley}) {
    if (outcome_name(o) == s) return o;
  }
  throw ConfigError("unknown outcome '" + std::string(s) + "'");
}

// Majority-limit game on seat shares. When shares * total_seats are integral (no fractional tie
// seats) the game uses exact integer arithmetic.
inline WeightedVotingGame seat_game(const Allocation& shares, long long total_seats) {
  if (total_seats > 0) {
    std::vector<long long> seats;
    bool integral = true;
    for (double s : shares.shares()) {
      const double x = s * double(total_seats);
      const double r = std::round(x);
      if (std::abs(x - r) > 1e-9) {
        integral = false;
        break;
      }
      seats.push_back(static_cast<long long>(r));
    }
    if (integral) return majority_limit(std::move(seats));
  }
  return majority_limit(shares.shares());
}

inline Allocation power_of(const Allocation& shares, Outcome index, long long total_seats = 0) {
  if (index == Outcome::Seats) return shares;
  const auto game = seat_game(shares, total_seats);
  return index == Outcome::Banzhaf ? banzhaf(game).normalized : shapley_shubik(game);
}

inline Allocation power_allocation(const MultiDistrictElection& e, const RuleSpec& spec, Outcome index) {
  const long long seats = std::accumulate(e.seats().begin(), e.seats().end(), 0LL);
  return power_of(rule_allocation(e, spec), index, seats);
}

}  // namespace spoiler
