#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spoiler/error.hpp"

namespace spoiler {

inline constexpr double kShareTolerance = 1e-9;

using Committee = std::vector<int>;

class PartyRoster {
 public:
  PartyRoster() = default;

  explicit PartyRoster(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw DomainError("party roster must contain at least one party");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw DomainError("duplicate party identifier: " + n);
    }
  }

  // Roster "P1".."Pp".
  static PartyRoster numbered(int p) {
    std::vector<std::string> names;
    for (int i = 1; i <= p; ++i) names.push_back("P" + std::to_string(i));
    return PartyRoster(std::move(names));
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const PartyRoster&) const = default;

 private:
  std::vector<std::string> names_;
};

// A point of the party simplex: nonnegative shares summing to one.
class Allocation {
 public:
  Allocation() = default;

  explicit Allocation(std::vector<double> shares) : shares_(std::move(shares)) {
    if (shares_.empty()) throw DimensionError("allocation must have at least one coordinate");
    double total = 0.0;
    for (double& s : shares_) {
      if (!std::isfinite(s) || s < -kShareTolerance || s > 1.0 + kShareTolerance) {
        throw DomainError("allocation share outside [0,1]");
      }
      s = std::clamp(s, 0.0, 1.0);
      total += s;
    }
    if (std::abs(total - 1.0) > kShareTolerance) {
      throw DomainError("allocation shares sum to " + std::to_string(total) + ", expected 1");
    }
  }

  static Allocation unit(int p, int i) {
    std::vector<double> s(static_cast<std::size_t>(p), 0.0);
    s.at(static_cast<std::size_t>(i)) = 1.0;
    return Allocation(std::move(s));
  }

  int size() const { return static_cast<int>(shares_.size()); }
  double operator[](int i) const { return shares_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& shares() const { return shares_; }

  // Inserts a zero coordinate at `at`: maps an allocation over P \ {at} into the p-simplex.
  Allocation embed_zero(int at) const {
    if (at < 0 || at > size()) throw DimensionError("embedding coordinate out of range");
    std::vector<double> s = shares_;
    s.insert(s.begin() + at, 0.0);
    return Allocation(std::move(s));
  }

 private:
  std::vector<double> shares_;
};

// Induced order on `keep`, relative ranks preserved.
template <class T, class Keep>
std::vector<T> restrict_vote(std::span<const T> vote, const Keep& keep) {
  if (keep.empty()) throw InvalidRestriction("restriction to an empty candidate set");
  std::vector<T> out;
  out.reserve(keep.size());
  for (const T& c : vote) {
    if (std::find(keep.begin(), keep.end(), c) != keep.end()) out.push_back(c);
  }
  if (out.size() != static_cast<std::size_t>(std::distance(keep.begin(), keep.end()))) {
    throw InvalidRestriction("restriction set is not a subset of the vote's candidates");
  }
  return out;
}

// One district: m candidates (local indices 0..m-1), their party affiliation and n strict orders.
// Votes are stored flat, together with the inverse permutation for O(1) position lookup.
class DistrictElection {
 public:
  DistrictElection() = default;

  DistrictElection(std::vector<int> affiliation, int num_parties, int num_voters,
                   std::vector<int> flat_orders, std::vector<int> labels = {})
      : affiliation_(std::move(affiliation)),
        labels_(std::move(labels)),
        orders_(std::move(flat_orders)),
        num_parties_(num_parties),
        num_voters_(num_voters) {
    const int m = num_candidates();
    if (m < 1) throw DomainError("district needs at least one candidate");
    if (num_voters_ < 1) throw DomainError("district needs at least one voter");
    for (int a : affiliation_) {
      if (a < 0 || a >= num_parties_) throw DomainError("candidate affiliated with unknown party");
    }
    if (labels_.empty()) {
      labels_.resize(static_cast<std::size_t>(m));
      std::iota(labels_.begin(), labels_.end(), 0);
    } else if (static_cast<int>(labels_.size()) != m) {
      throw DimensionError("candidate label count differs from affiliation count");
    }
    if (orders_.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(num_voters_)) {
      throw DimensionError("vote data does not match n*m");
    }
    positions_.assign(orders_.size(), -1);
    for (int v = 0; v < num_voters_; ++v) {
      const std::size_t base = static_cast<std::size_t>(v) * static_cast<std::size_t>(m);
      for (int r = 0; r < m; ++r) {
        const int c = orders_[base + static_cast<std::size_t>(r)];
        if (c < 0 || c >= m || positions_[base + static_cast<std::size_t>(c)] != -1) {
          throw DomainError("vote " + std::to_string(v) + " is not a permutation of the candidates");
        }
        positions_[base + static_cast<std::size_t>(c)] = r;
      }
    }
  }

  DistrictElection(std::vector<int> affiliation, int num_parties,
                   const std::vector<std::vector<int>>& votes, std::vector<int> labels = {})
      : DistrictElection(std::move(affiliation), num_parties, static_cast<int>(votes.size()),
                         flatten(votes), std::move(labels)) {}

  int num_candidates() const { return static_cast<int>(affiliation_.size()); }
  int num_voters() const { return num_voters_; }
  int num_parties() const { return num_parties_; }

  int party_of(int candidate) const { return affiliation_[static_cast<std::size_t>(candidate)]; }
  int label(int candidate) const { return labels_[static_cast<std::size_t>(candidate)]; }
  const std::vector<int>& affiliation() const { return affiliation_; }
  const std::vector<int>& labels() const { return labels_; }

  // Candidates of vote v, best first.
  std::span<const int> vote(int v) const {
    const auto m = static_cast<std::size_t>(num_candidates());
    return {orders_.data() + static_cast<std::size_t>(v) * m, m};
  }
  // positions(v)[c] = 0-based rank of candidate c in vote v.
  std::span<const int> positions(int v) const {
    const auto m = static_cast<std::size_t>(num_candidates());
    return {positions_.data() + static_cast<std::size_t>(v) * m, m};
  }

  std::vector<int> party_candidate_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(num_parties_), 0);
    for (int a : affiliation_) ++counts[static_cast<std::size_t>(a)];
    return counts;
  }

  // Keeps candidates whose party p has party_map[p] >= 0 and relabels their party to party_map[p].
  DistrictElection restricted(std::span<const int> party_map, int new_num_parties) const {
    const int m = num_candidates();
    std::vector<int> local(static_cast<std::size_t>(m), -1);
    std::vector<int> aff;
    std::vector<int> lab;
    for (int c = 0; c < m; ++c) {
      const int np = party_map[static_cast<std::size_t>(party_of(c))];
      if (np >= 0) {
        local[static_cast<std::size_t>(c)] = static_cast<int>(aff.size());
        aff.push_back(np);
        lab.push_back(label(c));
      }
    }
    if (aff.empty()) throw InvalidRestriction("restriction removes every candidate of a district");
    std::vector<int> flat;
    flat.reserve(aff.size() * static_cast<std::size_t>(num_voters_));
    for (int v = 0; v < num_voters_; ++v) {
      for (int c : vote(v)) {
        const int l = local[static_cast<std::size_t>(c)];
        if (l >= 0) flat.push_back(l);
      }
    }
    return DistrictElection(std::move(aff), new_num_parties, num_voters_, std::move(flat),
                            std::move(lab));
  }

  bool operator==(const DistrictElection& o) const {
    return affiliation_ == o.affiliation_ && labels_ == o.labels_ && orders_ == o.orders_ &&
           num_parties_ == o.num_parties_ && num_voters_ == o.num_voters_;
  }

 private:
  static std::vector<int> flatten(const std::vector<std::vector<int>>& votes) {
    std::vector<int> flat;
    for (const auto& v : votes) flat.insert(flat.end(), v.begin(), v.end());
    if (!votes.empty()) {
      for (const auto& v : votes) {
        if (v.size() != votes.front().size()) throw DimensionError("votes of unequal length");
      }
    }
    return flat;
  }

  std::vector<int> affiliation_;
  std::vector<int> labels_;
  std::vector<int> orders_;
  std::vector<int> positions_;
  int num_parties_ = 0;
  int num_voters_ = 0;
};

class MultiDistrictElection {
 public:
  MultiDistrictElection() = default;

  MultiDistrictElection(PartyRoster roster, std::vector<DistrictElection> districts,
                        std::vector<int> seats)
      : roster_(std::move(roster)), districts_(std::move(districts)), seats_(std::move(seats)) {
    if (districts_.empty()) throw DomainError("election needs at least one district");
    if (seats_.size() != districts_.size()) throw DimensionError("one seat count per district");
    for (std::size_t d = 0; d < districts_.size(); ++d) {
      if (districts_[d].num_parties() != roster_.size()) {
        throw DomainError("district " + std::to_string(d) + " does not reference the roster");
      }
      if (seats_[d] < 1) throw DomainError("district seat counts must be positive");
    }
  }

  const PartyRoster& roster() const { return roster_; }
  int num_parties() const { return roster_.size(); }
  int num_districts() const { return static_cast<int>(districts_.size()); }
  const DistrictElection& district(int i) const { return districts_[static_cast<std::size_t>(i)]; }
  const std::vector<DistrictElection>& districts() const { return districts_; }
  const std::vector<int>& seats() const { return seats_; }

  bool operator==(const MultiDistrictElection&) const = default;

 private:
  PartyRoster roster_;
  std::vector<DistrictElection> districts_;
  std::vector<int> seats_;
};

// Restriction to the parties in keep_parties (roster indices). The new roster lists them in roster
// order; seats are unchanged.
inline MultiDistrictElection restrict_election(const MultiDistrictElection& e,
                                               std::span<const int> keep_parties) {
  const int p = e.num_parties();
  std::vector<int> map(static_cast<std::size_t>(p), -1);
  for (int i : keep_parties) {
    if (i < 0 || i >= p) throw InvalidRestriction("unknown party index in restriction");
    map[static_cast<std::size_t>(i)] = 0;
  }
  std::vector<std::string> names;
  for (int i = 0; i < p; ++i) {
    if (map[static_cast<std::size_t>(i)] == 0) {
      map[static_cast<std::size_t>(i)] = static_cast<int>(names.size());
      names.push_back(e.roster().name(i));
    }
  }
  if (names.empty()) throw InvalidRestriction("restriction excludes every party");
  const int np = static_cast<int>(names.size());
  std::vector<DistrictElection> districts;
  districts.reserve(static_cast<std::size_t>(e.num_districts()));
  for (const auto& d : e.districts()) districts.push_back(d.restricted(map, np));
  return MultiDistrictElection(PartyRoster(std::move(names)), std::move(districts), e.seats());
}

// E_{-i}.
inline MultiDistrictElection remove_party(const MultiDistrictElection& e, int party) {
  std::vector<int> keep;
  for (int i = 0; i < e.num_parties(); ++i) {
    if (i != party) keep.push_back(i);
  }
  return restrict_election(e, keep);
}

// Seat-weighted mean of district allocations.
inline Allocation aggregate(std::span<const Allocation> per_district, std::span<const int> seats) {
  if (per_district.size() != seats.size() || per_district.empty()) {
    throw DimensionError("aggregate needs one seat count per district allocation");
  }
  const int p = per_district.front().size();
  std::vector<double> acc(static_cast<std::size_t>(p), 0.0);
  double total = 0.0;
  for (std::size_t d = 0; d < seats.size(); ++d) {
    if (per_district[d].size() != p) throw DimensionError("district allocations differ in length");
    if (seats[d] < 1) throw DomainError("district seat counts must be positive");
    for (int i = 0; i < p; ++i) acc[static_cast<std::size_t>(i)] += seats[d] * per_district[d][i];
    total += seats[d];
  }
  for (double& a : acc) a /= total;
  return Allocation(std::move(acc));
}

// Party shares under uniform random choice among tied committees.
inline Allocation allocation_from_committees(std::span<const Committee> winning,
                                             std::span<const int> affiliation, int num_parties) {
  if (winning.empty()) throw TieResolutionError("no winning committee to resolve");
  const std::size_t k = winning.front().size();
  if (k == 0) throw DomainError("committees must be nonempty");
  std::vector<double> counts(static_cast<std::size_t>(num_parties), 0.0);
  for (const auto& s : winning) {
    if (s.size() != k) throw DimensionError("committees of different sizes");
    for (int c : s) counts[static_cast<std::size_t>(affiliation[static_cast<std::size_t>(c)])] += 1.0;
  }
  const double denom = static_cast<double>(k) * static_cast<double>(winning.size());
  for (double& x : counts) x /= denom;
  return Allocation(std::move(counts));
}

}  // namespace spoiler
