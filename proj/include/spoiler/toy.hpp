#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/metrics.hpp"
#include "spoiler/owa.hpp"
#include "spoiler/parallel.hpp"
#include "spoiler/random.hpp"
#include "spoiler/rules.hpp"
#include "spoiler/scoring.hpp"

namespace spoiler::toy {

// Three parties X, Y, Z with k candidates each on the axis X1 << ... << Xk << Y1 << ... << Zk.
// Candidate index: party * k + position within the party (0-based).
enum Party : int { X = 0, Y = 1, Z = 2 };

// The four single-peaked party orders, in the coordinate order of Q:
// Z>Y>X, X>Y>Z, Y>Z>X, Y>X>Z (best first).
inline constexpr std::array<std::array<int, 3>, 4> kPartyOrders = {{
    {Z, Y, X},
    {X, Y, Z},
    {Y, Z, X},
    {Y, X, Z},
}};

// Descending order of Q's coordinates for each of the six configurations; coordinate 0
// (Z ranked first, then Y, then X) is always the largest.
inline constexpr std::array<std::array<int, 4>, 6> kConfigurations = {{
    {0, 1, 3, 2},
    {0, 2, 3, 1},
    {0, 1, 2, 3},
    {0, 2, 1, 3},
    {0, 3, 1, 2},
    {0, 3, 2, 1},
}};

struct ToyConfig {
  int k = 2;
  int configuration = 1;  // 1..6
};

struct VoteType {
  int party_order = 0;      // index into kPartyOrders
  int peak_perm_index = 1;  // 1..2^{k-1}
  std::vector<int> order;   // all 3k candidates, best first
};

// Single-peaked orders of 0..k-1 on the axis 0 < 1 < ... < k-1. Order i (0-based) is built from
// the bottom: bit j of i says whether the (j+1)-th worst candidate is the leftmost remaining one
// (set) or the rightmost (clear). Order 0 is 0, 1, ..., k-1.
inline std::vector<std::vector<int>> single_peaked_orders(int k) {
  const int count = 1 << (k - 1);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<int> order(static_cast<std::size_t>(k));
    int lo = 0, hi = k - 1;
    for (int j = 0; j < k - 1; ++j) order[static_cast<std::size_t>(k - 1 - j)] = (i >> j & 1) ? lo++ : hi--;
    order[0] = lo;
    out.push_back(std::move(order));
  }
  return out;
}

// Expands every (party order, peak-party order) pair into a full vote. The peak party's candidates
// follow the chosen single-peaked order; every later party lists its candidates nearest to the
// already ranked block first, which keeps the whole vote single-peaked.
inline std::vector<VoteType> enumerate_vote_types(int k) {
  const auto peak_orders = single_peaked_orders(k);
  std::vector<VoteType> types;
  for (int po = 0; po < 4; ++po) {
    const auto& parties = kPartyOrders[static_cast<std::size_t>(po)];
    for (std::size_t pi = 0; pi < peak_orders.size(); ++pi) {
      VoteType t;
      t.party_order = po;
      t.peak_perm_index = static_cast<int>(pi) + 1;
      for (int c : peak_orders[pi]) t.order.push_back(parties[0] * k + c);
      int lo = parties[0];  // leftmost ranked party
      for (int j = 1; j < 3; ++j) {
        const int party = parties[static_cast<std::size_t>(j)];
        if (party < lo) {
          for (int c = k - 1; c >= 0; --c) t.order.push_back(party * k + c);
          lo = party;
        } else {
          for (int c = 0; c < k; ++c) t.order.push_back(party * k + c);
        }
      }
      types.push_back(std::move(t));
    }
  }
  return types;
}

// u^k_i = 2^{-(k-1)} sum_{j=i}^{2^{k-1}} 1/j.
inline std::vector<double> peak_order_probs(int k) {
  const int len = 1 << (k - 1);
  std::vector<double> u(static_cast<std::size_t>(len));
  double tail = 0.0;
  for (int i = len; i >= 1; --i) {
    tail += 1.0 / i;
    u[static_cast<std::size_t>(i - 1)] = tail / len;
  }
  return u;
}

// Uniform draw from the part of the simplex Delta_4 whose coordinates are ordered as the
// configuration prescribes: a uniform Dirichlet(1,1,1,1) point with its sorted coordinates placed
// according to the configuration.
inline std::array<double, 4> sample_Q(int configuration, Rng& rng) {
  std::array<double, 4> e{};
  double total = 0.0;
  for (double& x : e) {
    x = rng.exponential();
    total += x;
  }
  for (double& x : e) x /= total;
  std::sort(e.begin(), e.end(), std::greater<>());
  const auto& cfg = kConfigurations.at(static_cast<std::size_t>(configuration - 1));
  std::array<double, 4> q{};
  for (int r = 0; r < 4; ++r) q[static_cast<std::size_t>(cfg[static_cast<std::size_t>(r)])] = e[static_cast<std::size_t>(r)];
  return q;
}

// Probability of every vote type: party-order probability times the u^k entry.
inline std::vector<double> vote_type_probs(const std::array<double, 4>& q, int k) {
  const auto u = peak_order_probs(k);
  std::vector<double> probs;
  for (int po = 0; po < 4; ++po) {
    for (double ui : u) probs.push_back(q[static_cast<std::size_t>(po)] * ui);
  }
  return probs;
}

// Committee score table for one candidate subset (all three parties, or a two-party restriction)
// under one OWA rule. Expected scores are a matrix-vector product with the vote-type probabilities.
class ScoreTable {
 public:
  ScoreTable(const std::vector<VoteType>& types, int k, std::vector<int> parties, Rule rule)
      : k_(k), parties_(std::move(parties)) {
    std::vector<int> keep;  // global candidates in this election, ascending
    for (int c = 0; c < 3 * k; ++c) {
      if (std::find(parties_.begin(), parties_.end(), c / k) != parties_.end()) keep.push_back(c);
    }
    const int m = static_cast<int>(keep.size());
    std::vector<int> local(static_cast<std::size_t>(3 * k), -1);
    for (int i = 0; i < m; ++i) local[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])] = i;
    for (int c : keep) party_of_.push_back(c / k);
    const auto [w, z] = owa_vectors(rule, m, k);

    std::vector<std::vector<int>> positions;
    for (const auto& t : types) {
      std::vector<int> pos(static_cast<std::size_t>(m));
      int r = 0;
      for (int c : t.order) {
        const int l = local[static_cast<std::size_t>(c)];
        if (l >= 0) pos[static_cast<std::size_t>(l)] = r++;
      }
      positions.push_back(std::move(pos));
    }
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    do {
      committees_.push_back(idx);
      for (const auto& pos : positions) scores_.push_back(owa_score(idx, pos, w, z));
    } while (next_combination(idx, m));
    num_types_ = static_cast<int>(types.size());
  }

  const std::vector<Committee>& committees() const { return committees_; }

  std::vector<double> expected_scores(std::span<const double> probs) const {
    std::vector<double> out(committees_.size(), 0.0);
    for (std::size_t s = 0; s < committees_.size(); ++s) {
      const double* row = scores_.data() + s * static_cast<std::size_t>(num_types_);
      double acc = 0.0;
      for (int t = 0; t < num_types_; ++t) acc += row[t] * probs[static_cast<std::size_t>(t)];
      out[s] = acc;
    }
    return out;
  }

  // Allocation over all three parties (zero for parties outside this election).
  std::array<double, 3> allocation(std::span<const double> probs) const {
    const auto scores = expected_scores(probs);
    const double best = *std::max_element(scores.begin(), scores.end());
    std::array<double, 3> shares{};
    int winners = 0;
    for (std::size_t s = 0; s < scores.size(); ++s) {
      if (scores[s] < best - kScoreTieTolerance) continue;
      ++winners;
      for (int c : committees_[s]) shares[static_cast<std::size_t>(party_of_[static_cast<std::size_t>(c)])] += 1.0;
    }
    for (double& x : shares) x /= double(winners) * k_;
    return shares;
  }

 private:
  int k_;
  int num_types_ = 0;
  std::vector<int> parties_;
  std::vector<int> party_of_;
  std::vector<Committee> committees_;
  std::vector<double> scores_;
};

inline bool is_toy_rule(Rule r) { return is_owa_rule(r); }

// Precomputed model for one (k, rule): tables for the full election and the three restrictions.
class ToyModel {
 public:
  ToyModel(int k, Rule rule) : ToyModel(k, rule, enumerate_vote_types(k)) {}

  ToyModel(int k, Rule rule, std::vector<VoteType> types) : k_(k), types_(std::move(types)) {
    if (!is_toy_rule(rule)) throw DomainError("toy model supports SNTV, k-Borda, CC, HB and k-PAV only");
    tables_.emplace_back(types_, k, std::vector<int>{X, Y, Z}, rule);
    tables_.emplace_back(types_, k, std::vector<int>{Y, Z}, rule);  // without X
    tables_.emplace_back(types_, k, std::vector<int>{X, Z}, rule);  // without Y
    tables_.emplace_back(types_, k, std::vector<int>{X, Y}, rule);  // without Z
  }

  const std::vector<VoteType>& vote_types() const { return types_; }

  std::array<double, 3> expected_allocation(const std::array<double, 4>& q) const {
    const auto probs = vote_type_probs(q, k_);
    return tables_[0].allocation(probs);
  }

  // Maximum excess impact over X, Y, Z for one Q.
  double max_excess_impact(const std::array<double, 4>& q) const {
    const auto probs = vote_type_probs(q, k_);
    const auto full = tables_[0].allocation(probs);
    const Allocation s(std::vector<double>(full.begin(), full.end()));
    double best = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto r = tables_[static_cast<std::size_t>(i + 1)].allocation(probs);
      const Allocation sr(std::vector<double>(r.begin(), r.end()));
      best = std::max(best, excess_impact(s, sr, i));
    }
    return best;
  }

 private:
  int k_;
  std::vector<VoteType> types_;
  std::vector<ScoreTable> tables_;
};

// Mean over Q samples of the maximum excess impact; sample s draws Q from derive_seed(seed, s).
inline SusceptibilityEstimate toy_susceptibility(const ToyConfig& config, Rule rule, long long samples,
                                                 std::uint64_t seed, int threads = 1,
                                                 ImpactScale scale = ImpactScale::L1) {
  if (samples < 1) throw DomainError("toy susceptibility needs at least one sample");
  if (config.k < 1) throw DomainError("toy model needs k >= 1");
  if (config.configuration < 1 || config.configuration > 6) throw DomainError("configuration must be 1..6");
  const ToyModel model(config.k, rule);
  const double factor = scale_factor(scale);
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    values[s] = factor * model.max_excess_impact(sample_Q(config.configuration, rng));
  });
  return summarize(values);
}

}  // namespace spoiler::toy
