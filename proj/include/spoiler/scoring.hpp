#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "spoiler/error.hpp"

namespace spoiler {

// Positional score per rank (index 0 = first place).
struct ScoringVector {
  std::vector<double> w;
  int size() const { return static_cast<int>(w.size()); }
  double operator[](int pos) const { return w[static_cast<std::size_t>(pos)]; }
};

// Weight applied to the i-th best ranked committee member.
struct OwaVector {
  std::vector<double> z;
  int size() const { return static_cast<int>(z.size()); }
  double operator[](int i) const { return z[static_cast<std::size_t>(i)]; }
  bool nonincreasing() const { return std::is_sorted(z.rbegin(), z.rend()); }
};

// k ones followed by l-k zeros.
inline std::vector<double> approval_vector(int k, int l) {
  if (k < 0 || k > l) throw DomainError("approval vector needs 0 <= k <= l");
  std::vector<double> v(static_cast<std::size_t>(l), 0.0);
  std::fill_n(v.begin(), k, 1.0);
  return v;
}

// (m-1, m-2, ..., 0) / (m-1); a single candidate scores 1.
inline std::vector<double> borda_vector(int m) {
  if (m < 1) throw DomainError("Borda vector needs m >= 1");
  if (m == 1) return {1.0};
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = double(m - 1 - i) / double(m - 1);
  return v;
}

// (1, 1/2, ..., 1/k).
inline std::vector<double> harmonic_vector(int k) {
  std::vector<double> v(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = 1.0 / double(i + 1);
  return v;
}

// Score of committee S for one vote: sum_i z_i * w[pos(v,S)_i], members ordered best first.
// `positions[c]` is the 0-based rank of candidate c in the vote.
inline double owa_score(std::span<const int> committee, std::span<const int> positions,
                        const ScoringVector& w, const OwaVector& z) {
  if (static_cast<int>(committee.size()) != z.size()) {
    throw DimensionError("committee size differs from OWA vector length");
  }
  if (static_cast<int>(positions.size()) != w.size()) {
    throw DimensionError("scoring vector length differs from number of candidates");
  }
  std::vector<int> pos;
  pos.reserve(committee.size());
  for (int c : committee) {
    if (c < 0 || c >= static_cast<int>(positions.size())) {
      throw DomainError("committee member is not a candidate of the vote");
    }
    pos.push_back(positions[static_cast<std::size_t>(c)]);
  }
  std::sort(pos.begin(), pos.end());
  double s = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) s += z.z[i] * w[pos[i]];
  return s;
}

}  // namespace spoiler
