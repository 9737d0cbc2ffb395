#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "spoiler/jdh.hpp"
#include "test_support.hpp"

using namespace spoiler;
using spoiler::testing::random_simplex;

namespace {

// Sequential highest-quotient allocation: k rounds, each seat to the largest w_i/(s_i+1).
// Returns nullopt when the last seat is contested by a tie.
std::optional<std::vector<int>> largest_ratio(const std::vector<double>& w, int k) {
  std::vector<int> s(w.size(), 0);
  for (int seat = 0; seat < k; ++seat) {
    std::size_t best = 0;
    int ties = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double a = w[i] / (s[i] + 1), b = w[best] / (s[best] + 1);
      if (i == 0 || a > b * (1 + 1e-12)) {
        best = i;
        ties = 1;
      } else if (std::abs(a - b) <= 1e-12 * b) {
        ++ties;
      }
    }
    if (ties > 1 && seat + ties > k) return std::nullopt;
    ++s[best];
  }
  return s;
}

}  // namespace

TEST(JdhExact, Examples) {
  const std::vector<double> w = {0.5, 0.26, 0.24};
  const auto r = jdh_exact(w, 4);
  EXPECT_FALSE(r.tie);
  EXPECT_EQ(r.seats, (std::vector<double>{2, 1, 1}));
  EXPECT_EQ(r.allocation.shares(), (std::vector<double>{0.5, 0.25, 0.25}));
  const std::vector<double> one = {7.0};
  EXPECT_EQ(jdh_exact(one, 5).allocation.shares(), (std::vector<double>{1.0}));
}

TEST(JdhExact, TieIsInterpolated) {
  const std::vector<double> w = {0.5, 0.5};
  const auto r = jdh_exact(w, 3);
  EXPECT_TRUE(r.tie);
  EXPECT_EQ(r.k_minus, 2);
  EXPECT_EQ(r.k_plus, 4);
  EXPECT_DOUBLE_EQ(r.allocation[0], 0.5);
  EXPECT_DOUBLE_EQ(r.allocation[1], 0.5);
}

TEST(JdhExact, TieInterpolationWeightsTheNeighbouringHouseSizes) {
  // k=2 with three equal parties: k- = 0 so the k+ allocation is used.
  const std::vector<double> eq = {1, 1, 1};
  const auto r = jdh_exact(eq, 2);
  EXPECT_TRUE(r.tie);
  EXPECT_EQ(r.k_minus, 0);
  EXPECT_EQ(r.k_plus, 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.allocation[i], 1.0 / 3, 1e-12);
  // (0.4, 0.3, 0.3), k=2: k- = 1 gives (1,0,0), k+ = 3 gives (1,1,1)/3; midpoint.
  const std::vector<double> w = {0.4, 0.3, 0.3};
  const auto t = jdh_exact(w, 2);
  ASSERT_TRUE(t.tie);
  EXPECT_NEAR(t.allocation[0], 0.5 * (1.0 / 3) + 0.5 * 1.0, 1e-12);
  EXPECT_NEAR(t.allocation[1], 0.5 * (1.0 / 3), 1e-12);
}

TEST(JdhExact, Errors) {
  const std::vector<double> zero = {0, 0};
  EXPECT_THROW(jdh_exact(zero, 3), DegenerateInput);
  const std::vector<double> neg = {1, -1};
  EXPECT_THROW(jdh_exact(neg, 3), DomainError);
  const std::vector<double> ok = {1, 1};
  EXPECT_THROW(jdh_exact(ok, 0), DomainError);
}

TEST(JdhExact, ZeroVotePartyGetsNothing) {
  const std::vector<double> w = {0.6, 0.0, 0.4};
  EXPECT_EQ(jdh_exact(w, 7).seats[1], 0.0);
}

TEST(JdhExact, MatchesLargestRatioOracle) {
  Rng rng(51);
  int compared = 0;
  for (int t = 0; t < 2000; ++t) {
    const int p = 1 + static_cast<int>(rng.below(8));
    const int k = 1 + static_cast<int>(rng.below(40));
    const auto w = random_simplex(rng, p);
    const auto oracle = largest_ratio(w, k);
    if (!oracle) continue;
    const auto r = jdh_exact(w, k);
    ASSERT_FALSE(r.tie);
    for (int i = 0; i < p; ++i) ASSERT_EQ(r.seats[static_cast<std::size_t>(i)], (*oracle)[static_cast<std::size_t>(i)]);
    ++compared;
  }
  EXPECT_GT(compared, 1900);
}

TEST(JdhExact, ScaleInvariantAndHouseMonotone) {
  Rng rng(52);
  for (int t = 0; t < 500; ++t) {
    const int p = 2 + static_cast<int>(rng.below(6));
    auto w = random_simplex(rng, p);
    auto counts = w;
    for (double& x : counts) x *= 12345.0;
    const int k = 1 + static_cast<int>(rng.below(30));
    const auto a = jdh_exact(w, k), b = jdh_exact(counts, k);
    for (int i = 0; i < p; ++i) ASSERT_NEAR(a.allocation[i], b.allocation[i], 1e-12);
    const auto c = jdh_exact(w, k + 1);
    if (a.tie || c.tie) continue;
    for (int i = 0; i < p; ++i) ASSERT_GE(c.seats[static_cast<std::size_t>(i)], a.seats[static_cast<std::size_t>(i)]);
  }
}

TEST(JdhPotLadle, EqualSharesAreExact) {
  for (int p = 1; p <= 8; ++p) {
    const std::vector<double> w(static_cast<std::size_t>(p), 1.0);
    const auto a = jdh_pot_ladle(w, 5);
    for (int i = 0; i < p; ++i) EXPECT_NEAR(a[i], 1.0 / p, 1e-12);
  }
}

TEST(JdhPotLadle, Example) {
  const std::vector<double> w = {0.5, 0.3, 0.2};
  const auto a = jdh_pot_ladle(w, 10);
  EXPECT_NEAR(a[0], 0.525, 1e-12);
  EXPECT_NEAR(a[1], 0.295, 1e-12);
  EXPECT_NEAR(a[2], 0.18, 1e-12);
  // Input order is preserved.
  const std::vector<double> rev = {0.2, 0.3, 0.5};
  EXPECT_NEAR(jdh_pot_ladle(rev, 10)[2], 0.525, 1e-12);
}

TEST(JdhPotLadle, SmallPartiesBelowTheCutoffGetZero) {
  const std::vector<double> w = {0.9, 0.09, 0.01};
  const auto a = jdh_pot_ladle(w, 3);
  EXPECT_EQ(a[2], 0.0);
}

TEST(JdhPotLadle, StaysCloseToExactJdh) {
  Rng rng(53);
  double gap = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const auto w = random_simplex(rng, 2 + static_cast<int>(rng.below(8)));
    const auto exact = jdh_exact(w, 15);
    if (exact.tie) continue;
    const auto approx = jdh_pot_ladle(w, 15);
    for (int i = 0; i < approx.size(); ++i) gap = std::max(gap, std::abs(approx[i] - exact.allocation[i]));
  }
  RecordProperty("max_gap", std::to_string(gap));
  EXPECT_LT(gap, 2.0 / 15);
}
