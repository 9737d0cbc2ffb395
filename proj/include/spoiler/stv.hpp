#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/owa.hpp"

namespace spoiler {

struct StvResult {
  int k = 0;
  std::vector<int> elected;       // S, ascending candidate index; |S| >= k
  bool elimination_tie_break = false;
  bool filled_by_remaining = false;
  std::vector<double> round_weight;  // total ballot weight at the start of each round

  // All k-subsets of S.
  std::vector<Committee> committees() const {
    std::vector<Committee> out;
    const int s = static_cast<int>(elected.size());
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    do {
      Committee c;
      for (int i : idx) c.push_back(elected[static_cast<std::size_t>(i)]);
      out.push_back(std::move(c));
    } while (next_combination(idx, s));
    return out;
  }

  // Uniform average over all k-subsets of S: every member of S is seated with probability k/|S|.
  Allocation allocation(const DistrictElection& e) const {
    std::vector<double> shares(static_cast<std::size_t>(e.num_parties()), 0.0);
    for (int c : elected) shares[static_cast<std::size_t>(e.party_of(c))] += 1.0 / double(elected.size());
    return Allocation(std::move(shares));
  }
};

// STV with the fractional Droop quota q = n/(k+1). Every quota-reaching candidate of a round is
// elected at once and the votes currently counting for candidate c are multiplied by q/t_c.
// Without a quota-reacher the lowest tally is eliminated (lowest index on ties).
inline StvResult stv(const DistrictElection& e, int k) {
  const int m = e.num_candidates();
  const int n = e.num_voters();
  if (k < 1 || k > m) throw DomainError("committee size must be in [1, m]");
  enum : char { Active, Elected, Eliminated };
  std::vector<char> status(static_cast<std::size_t>(m), Active);
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  std::vector<int> top(static_cast<std::size_t>(n), 0);  // rank of current highest active candidate
  std::vector<double> tally(static_cast<std::size_t>(m));
  const double quota = double(n) / double(k + 1);

  StvResult result;
  result.k = k;
  int active = m;

  auto advance = [&](int v) {
    const auto order = e.vote(v);
    int& r = top[static_cast<std::size_t>(v)];
    while (r < m && status[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] != Active) ++r;
  };

  while (static_cast<int>(result.elected.size()) < k) {
    std::fill(tally.begin(), tally.end(), 0.0);
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
      advance(v);
      const int r = top[static_cast<std::size_t>(v)];
      if (r < m) {
        tally[static_cast<std::size_t>(e.vote(v)[static_cast<std::size_t>(r)])] += weight[static_cast<std::size_t>(v)];
        total += weight[static_cast<std::size_t>(v)];
      }
    }
    result.round_weight.push_back(total);

    std::vector<int> reached;
    for (int c = 0; c < m; ++c) {
      if (status[static_cast<std::size_t>(c)] == Active && tally[static_cast<std::size_t>(c)] >= quota - kScoreTieTolerance) reached.push_back(c);
    }
    if (!reached.empty()) {
      for (int v = 0; v < n; ++v) {
        const int r = top[static_cast<std::size_t>(v)];
        if (r >= m) continue;
        const int c = e.vote(v)[static_cast<std::size_t>(r)];
        if (tally[static_cast<std::size_t>(c)] >= quota - kScoreTieTolerance && status[static_cast<std::size_t>(c)] == Active) {
          weight[static_cast<std::size_t>(v)] *= std::min(1.0, quota / tally[static_cast<std::size_t>(c)]);
        }
      }
      for (int c : reached) {
        status[static_cast<std::size_t>(c)] = Elected;
        result.elected.push_back(c);
      }
      active -= static_cast<int>(reached.size());
      continue;
    }
    if (static_cast<int>(result.elected.size()) + active <= k) {
      // No quota-reacher and no candidate to spare: the remaining candidates fill the committee.
      for (int c = 0; c < m; ++c) {
        if (status[static_cast<std::size_t>(c)] == Active) {
          status[static_cast<std::size_t>(c)] = Elected;
          result.elected.push_back(c);
        }
      }
      result.filled_by_remaining = true;
      break;
    }
    int lowest = -1;
    int ties = 0;
    for (int c = 0; c < m; ++c) {
      if (status[static_cast<std::size_t>(c)] != Active) continue;
      if (lowest < 0 || tally[static_cast<std::size_t>(c)] < tally[static_cast<std::size_t>(lowest)] - kScoreTieTolerance) {
        lowest = c;
        ties = 1;
      } else if (std::abs(tally[static_cast<std::size_t>(c)] - tally[static_cast<std::size_t>(lowest)]) <= kScoreTieTolerance) {
        ++ties;
      }
    }
    if (ties > 1) result.elimination_tie_break = true;
    status[static_cast<std::size_t>(lowest)] = Eliminated;
    --active;
  }
  std::sort(result.elected.begin(), result.elected.end());
  return result;
}

}  // namespace spoiler
