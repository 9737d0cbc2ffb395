#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"

namespace spoiler {

struct JdhResult {
  std::vector<double> seats;  // fractional only when an electoral tie was interpolated
  Allocation allocation;
  bool tie = false;
  int k_minus = 0;  // set when tie
  int k_plus = 0;
};

namespace detail {

inline std::vector<double> normalized_weights(std::span<const double> votes) {
  double total = 0.0;
  for (double v : votes) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("vote shares must be finite and nonnegative");
    total += v;
  }
  if (total <= 0.0) throw DegenerateInput("all vote shares are zero");
  std::vector<double> w(votes.begin(), votes.end());
  for (double& x : w) x /= total;
  return w;
}

}  // namespace detail

// Jefferson-D'Hondt via the divisor construction: start at M = k (where sum floor(M w_i) <= k) and
// raise M through the jump points (seats_i + 1)/w_i until the house size reaches k. When the next
// jump overshoots k no divisor yields exactly k seats; the allocation is then interpolated between
// the nearest attainable sizes k- < k < k+. Accepts raw counts or shares.
inline JdhResult jdh_exact(std::span<const double> votes, int k) {
  if (k < 1) throw DomainError("JDH needs k >= 1");
  const auto w = detail::normalized_weights(votes);
  const int p = static_cast<int>(w.size());
  std::vector<double> seats(static_cast<std::size_t>(p), 0.0);
  int total = 0;
  for (int i = 0; i < p; ++i) {
    seats[static_cast<std::size_t>(i)] = std::floor(double(k) * w[static_cast<std::size_t>(i)]);
    total += static_cast<int>(seats[static_cast<std::size_t>(i)]);
  }
  JdhResult r;
  while (total < k) {
    double next = INFINITY;
    for (int i = 0; i < p; ++i) {
      if (w[static_cast<std::size_t>(i)] > 0.0) next = std::min(next, (seats[static_cast<std::size_t>(i)] + 1.0) / w[static_cast<std::size_t>(i)]);
    }
    std::vector<int> jumping;
    for (int i = 0; i < p; ++i) {
      if (w[static_cast<std::size_t>(i)] <= 0.0) continue;
      const double b = (seats[static_cast<std::size_t>(i)] + 1.0) / w[static_cast<std::size_t>(i)];
      if (std::abs(b - next) <= 1e-12 * next) jumping.push_back(i);
    }
    if (total + static_cast<int>(jumping.size()) <= k) {
      for (int i : jumping) seats[static_cast<std::size_t>(i)] += 1.0;
      total += static_cast<int>(jumping.size());
      continue;
    }
    // Electoral tie.
    r.tie = true;
    r.k_minus = total;
    r.k_plus = total + static_cast<int>(jumping.size());
    std::vector<double> plus = seats;
    for (int i : jumping) plus[static_cast<std::size_t>(i)] += 1.0;
    std::vector<double> shares(static_cast<std::size_t>(p));
    const double kp = r.k_plus, km = r.k_minus;
    for (int i = 0; i < p; ++i) {
      const double s_plus = plus[static_cast<std::size_t>(i)] / kp;
      if (r.k_minus == 0) {
        shares[static_cast<std::size_t>(i)] = s_plus;
      } else {
        const double s_minus = seats[static_cast<std::size_t>(i)] / km;
        shares[static_cast<std::size_t>(i)] = (k - km) / (kp - km) * s_plus + (kp - k) / (kp - km) * s_minus;
      }
    }
    for (int i = 0; i < p; ++i) seats[static_cast<std::size_t>(i)] = shares[static_cast<std::size_t>(i)] * k;
    r.seats = std::move(seats);
    r.allocation = Allocation(std::move(shares));
    return r;
  }
  std::vector<double> shares(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) shares[static_cast<std::size_t>(i)] = seats[static_cast<std::size_t>(i)] / k;
  r.seats = std::move(seats);
  r.allocation = Allocation(std::move(shares));
  return r;
}

// Pot & Ladle closed-form approximation of JDH seat shares. Returned in input party order.
inline Allocation jdh_pot_ladle(std::span<const double> votes, int k) {
  if (k < 1) throw DomainError("JDH needs k >= 1");
  const auto w = detail::normalized_weights(votes);
  const int p = static_cast<int>(w.size());
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return w[static_cast<std::size_t>(a)] > w[static_cast<std::size_t>(b)];
  });
  int r = 0;
  double prefix = 0.0;
  double prefix_at_r = 0.0;
  for (int l = 1; l <= p; ++l) {
    const double wl = w[static_cast<std::size_t>(order[static_cast<std::size_t>(l - 1)])];
    prefix += wl;
    if (wl / prefix > 1.0 / (2.0 * k + l)) {
      r = l;
      prefix_at_r = prefix;
    }
  }
  assert(r >= 1);
  std::vector<double> shares(static_cast<std::size_t>(p), 0.0);
  for (int l = 0; l < r; ++l) {
    const int i = order[static_cast<std::size_t>(l)];
    const double hat = w[static_cast<std::size_t>(i)] / prefix_at_r;
    shares[static_cast<std::size_t>(i)] = hat * (1.0 + double(r) / (2.0 * k)) - 1.0 / (2.0 * k);
  }
  return Allocation(std::move(shares));
}

// First-preference party shares of a district.
inline std::vector<double> first_preference_shares(const DistrictElection& e) {
  std::vector<double> w(static_cast<std::size_t>(e.num_parties()), 0.0);
  for (int v = 0; v < e.num_voters(); ++v) w[static_cast<std::size_t>(e.party_of(e.vote(v)[0]))] += 1.0;
  for (double& x : w) x /= e.num_voters();
  return w;
}

}  // namespace spoiler
