#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/scoring.hpp"

namespace spoiler {

inline constexpr double kScoreTieTolerance = 1e-9;
inline constexpr double kDefaultEnumerationCap = 2e6;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return std::round(r);
}

// Advances `idx` (strictly increasing, values < n) to the next k-subset in lexicographic order.
inline bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

// Total OWA score of a committee over all votes of a district.
inline double total_owa_score(const DistrictElection& e, std::span<const int> committee,
                              const ScoringVector& w, const OwaVector& z) {
  const std::size_t k = committee.size();
  std::vector<int> pos(k);
  double total = 0.0;
  for (int v = 0; v < e.num_voters(); ++v) {
    const auto positions = e.positions(v);
    for (std::size_t i = 0; i < k; ++i) pos[i] = positions[static_cast<std::size_t>(committee[i])];
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 0; i < k; ++i) total += z.z[i] * w[pos[i]];
  }
  return total;
}

// All k-committees attaining the maximum total score, in lexicographic order.
inline std::vector<Committee> solve_owa_exact(const DistrictElection& e, int k, const ScoringVector& w,
                                              const OwaVector& z,
                                              double enumeration_cap = kDefaultEnumerationCap) {
  const int m = e.num_candidates();
  if (k < 1 || k > m) throw DomainError("committee size must be in [1, m]");
  if (z.size() != k) throw DimensionError("OWA vector length must equal k");
  if (w.size() != m) throw DimensionError("scoring vector length must equal m");
  const double count = binomial(m, k);
  if (count > enumeration_cap) {
    throw EnumerationInfeasible("C(" + std::to_string(m) + "," + std::to_string(k) +
                                ") committees exceed the enumeration cap; use the greedy or "
                                "separable solver");
  }
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Committee> best;
  double best_score = -1.0;
  do {
    const double s = total_owa_score(e, idx, w, z);
    if (best.empty() || s > best_score + kScoreTieTolerance) {
      best.clear();
      best.push_back(idx);
      best_score = s;
    } else if (std::abs(s - best_score) <= kScoreTieTolerance) {
      best.push_back(idx);
    }
  } while (next_combination(idx, m));
  return best;
}

enum class SeparableScoring { Plurality, Borda };

// Per-candidate totals for a separable scoring rule.
inline std::vector<double> separable_scores(const DistrictElection& e, SeparableScoring scoring) {
  const int m = e.num_candidates();
  std::vector<double> score(static_cast<std::size_t>(m), 0.0);
  if (scoring == SeparableScoring::Plurality) {
    for (int v = 0; v < e.num_voters(); ++v) score[static_cast<std::size_t>(e.vote(v)[0])] += 1.0;
  } else {
    const auto b = borda_vector(m);
    for (int v = 0; v < e.num_voters(); ++v) {
      const auto order = e.vote(v);
      for (int r = 0; r < m; ++r) score[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] += b[static_cast<std::size_t>(r)];
    }
  }
  return score;
}

// SNTV / k-Borda allocation without enumerating committees: t candidates tied at the boundary for
// r remaining seats each contribute r/(t*k) to their party.
inline Allocation solve_separable_topk(const DistrictElection& e, int k, SeparableScoring scoring) {
  const int m = e.num_candidates();
  if (k < 1 || k > m) throw DomainError("committee size must be in [1, m]");
  const auto score = separable_scores(e, scoring);
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
  });
  const double cutoff = score[static_cast<std::size_t>(order[static_cast<std::size_t>(k - 1)])];
  std::vector<double> shares(static_cast<std::size_t>(e.num_parties()), 0.0);
  int safe = 0;
  std::vector<int> tied;
  for (int c = 0; c < m; ++c) {
    const double s = score[static_cast<std::size_t>(c)];
    if (s > cutoff + kScoreTieTolerance) {
      shares[static_cast<std::size_t>(e.party_of(c))] += 1.0 / k;
      ++safe;
    } else if (std::abs(s - cutoff) <= kScoreTieTolerance) {
      tied.push_back(c);
    }
  }
  const double remaining = k - safe;
  for (int c : tied) {
    shares[static_cast<std::size_t>(e.party_of(c))] += remaining / (double(tied.size()) * k);
  }
  return Allocation(std::move(shares));
}

// Greedy maximisation of the total OWA score: repeatedly add the candidate with the largest
// marginal gain, lowest index on ties. Requires a nonincreasing OWA vector.
inline Committee solve_owa_greedy(const DistrictElection& e, int k, const ScoringVector& w,
                                  const OwaVector& z) {
  const int m = e.num_candidates();
  const int n = e.num_voters();
  if (k < 1 || k > m) throw DomainError("committee size must be in [1, m]");
  if (z.size() != k) throw DimensionError("OWA vector length must equal k");
  if (w.size() != m) throw DimensionError("scoring vector length must equal m");
  if (!z.nonincreasing()) throw DomainError("greedy solver requires a nonincreasing OWA vector");

  std::vector<char> member(static_cast<std::size_t>(m), 0);
  // Per voter: positions of committee members, ascending.
  std::vector<std::vector<int>> member_pos(static_cast<std::size_t>(n));
  std::vector<double> gain(static_cast<std::size_t>(m));
  std::vector<double> tail;
  Committee committee;
  committee.reserve(static_cast<std::size_t>(k));

  for (int step = 0; step < k; ++step) {
    std::fill(gain.begin(), gain.end(), 0.0);
    for (int v = 0; v < n; ++v) {
      const auto& mp = member_pos[static_cast<std::size_t>(v)];
      const std::size_t s = mp.size();
      // tail[t] = sum_{u >= t} (z[u+1] - z[u]) * w[mp[u]]: change when members from index t shift down.
      tail.assign(s + 1, 0.0);
      for (std::size_t u = s; u-- > 0;) {
        tail[u] = tail[u + 1] + (z.z[u + 1] - z.z[u]) * w[mp[u]];
      }
      const auto order = e.vote(v);
      std::size_t above = 0;
      for (int r = 0; r < m; ++r) {
        if (above < s && mp[above] == r) {
          ++above;
          continue;
        }
        const int c = order[static_cast<std::size_t>(r)];
        gain[static_cast<std::size_t>(c)] += z.z[above] * w[r] + tail[above];
      }
    }
    int best = -1;
    for (int c = 0; c < m; ++c) {
      if (member[static_cast<std::size_t>(c)]) continue;
      if (best < 0 || gain[static_cast<std::size_t>(c)] > gain[static_cast<std::size_t>(best)] + kScoreTieTolerance) best = c;
    }
    member[static_cast<std::size_t>(best)] = 1;
    committee.push_back(best);
    for (int v = 0; v < n; ++v) {
      auto& mp = member_pos[static_cast<std::size_t>(v)];
      const int pos = e.positions(v)[static_cast<std::size_t>(best)];
      mp.insert(std::upper_bound(mp.begin(), mp.end(), pos), pos);
    }
  }
  std::sort(committee.begin(), committee.end());
  return committee;
}

}  // namespace spoiler
