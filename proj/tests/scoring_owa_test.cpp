#include <gtest/gtest.h>

#include <cmath>

#include "spoiler/owa.hpp"
#include "spoiler/rules.hpp"
#include "spoiler/scoring.hpp"
#include "test_support.hpp"

using namespace spoiler;
using spoiler::testing::random_district;
using spoiler::testing::random_mixed_district;
using spoiler::testing::random_permutation;

namespace {

std::vector<int> positions_of(const std::vector<int>& vote) {
  std::vector<int> pos(vote.size());
  for (std::size_t r = 0; r < vote.size(); ++r) pos[static_cast<std::size_t>(vote[r])] = static_cast<int>(r);
  return pos;
}

// Position-table oracle: score written straight from the definition, with the sort done by
// scanning ranks from the top.
double oracle_score(const std::vector<int>& committee, const std::vector<int>& vote, const std::vector<double>& w,
                    const std::vector<double>& z) {
  double s = 0.0;
  std::size_t i = 0;
  for (std::size_t r = 0; r < vote.size(); ++r) {
    if (std::find(committee.begin(), committee.end(), vote[r]) != committee.end()) s += z[i++] * w[r];
  }
  return s;
}

// Independent exhaustive search over bitmasks.
std::vector<Committee> oracle_exact(const DistrictElection& e, int k, const std::vector<double>& w,
                                    const std::vector<double>& z) {
  const int m = e.num_candidates();
  double best = -1.0;
  std::vector<std::pair<double, Committee>> all;
  for (int mask = 0; mask < (1 << m); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
    Committee c;
    for (int x = 0; x < m; ++x) {
      if (mask >> x & 1) c.push_back(x);
    }
    double s = 0.0;
    for (int v = 0; v < e.num_voters(); ++v) {
      const auto vote = e.vote(v);
      s += oracle_score(c, std::vector<int>(vote.begin(), vote.end()), w, z);
    }
    best = std::max(best, s);
    all.emplace_back(s, c);
  }
  std::vector<Committee> out;
  for (auto& [s, c] : all) {
    if (s >= best - 1e-9) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ScoringVectors, NamedVectors) {
  EXPECT_EQ(approval_vector(2, 4), (std::vector<double>{1, 1, 0, 0}));
  EXPECT_EQ(borda_vector(3), (std::vector<double>{1.0, 0.5, 0.0}));
  EXPECT_EQ(borda_vector(1), (std::vector<double>{1.0}));
  EXPECT_EQ(harmonic_vector(3), (std::vector<double>{1.0, 0.5, 1.0 / 3}));
  EXPECT_THROW(approval_vector(3, 2), DomainError);
}

TEST(OwaScore, Examples) {
  // CC, m=4, vote a>b>c>d, S={b,d}: only b counts, Borda 2/3.
  const std::vector<int> vote = {0, 1, 2, 3};
  const auto pos = positions_of(vote);
  const std::vector<int> bd = {1, 3};
  EXPECT_NEAR(owa_score(bd, pos, {borda_vector(4)}, {approval_vector(1, 2)}), 2.0 / 3.0, 1e-15);
  // kPAV, k=2, S within the top 2.
  const std::vector<int> ab = {1, 0};
  EXPECT_DOUBLE_EQ(owa_score(ab, pos, {approval_vector(2, 4)}, {harmonic_vector(2)}), 1.5);
  // HB, m=3, k=2, vote a>b>c, S={a,c}.
  const std::vector<int> v3 = {0, 1, 2};
  const std::vector<int> ac = {0, 2};
  EXPECT_DOUBLE_EQ(owa_score(ac, positions_of(v3), {borda_vector(3)}, {harmonic_vector(2)}), 1.0);
  EXPECT_DOUBLE_EQ(oracle_score(ac, v3, borda_vector(3), harmonic_vector(2)), 1.0);
}

TEST(OwaScore, RejectsForeignCandidatesAndSizeMismatch) {
  const auto pos = positions_of({0, 1, 2});
  const std::vector<int> bad = {0, 5};
  EXPECT_THROW(owa_score(bad, pos, {borda_vector(3)}, {harmonic_vector(2)}), DomainError);
  const std::vector<int> one = {0};
  EXPECT_THROW(owa_score(one, pos, {borda_vector(3)}, {harmonic_vector(2)}), DimensionError);
}

TEST(OwaScore, InvariantUnderRelabelingOutsideTheCommittee) {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const int m = 6;
    auto vote = random_permutation(rng, m);
    const std::vector<int> committee = {1, 4};
    // Swap two non-members inside the vote.
    auto other = vote;
    const auto i = std::find(other.begin(), other.end(), 0);
    const auto j = std::find(other.begin(), other.end(), 5);
    std::iter_swap(i, j);
    const auto a = owa_score(committee, positions_of(vote), {borda_vector(m)}, {harmonic_vector(2)});
    const auto b = owa_score(committee, positions_of(other), {borda_vector(m)}, {harmonic_vector(2)});
    EXPECT_DOUBLE_EQ(a, b);
  }
}

TEST(OwaScore, MatchesPositionTableOracle) {
  Rng rng(22);
  for (int t = 0; t < 500; ++t) {
    const int m = 2 + static_cast<int>(rng.below(7));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    auto vote = random_permutation(rng, m);
    auto perm = random_permutation(rng, m);
    std::vector<int> committee(perm.begin(), perm.begin() + k);
    for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::HB, Rule::KPav}) {
      const auto [w, z] = owa_vectors(r, m, k);
      ASSERT_NEAR(owa_score(committee, positions_of(vote), w, z), oracle_score(committee, vote, w.w, z.z), 1e-12);
    }
  }
}

TEST(SolveOwaExact, KEqualsMGivesTheFullCommittee) {
  Rng rng(23);
  const auto e = random_district(rng, 2, 2, 5);
  const auto [w, z] = owa_vectors(Rule::CC, 4, 4);
  const auto s = solve_owa_exact(e, 4, w, z);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Committee{0, 1, 2, 3}));
}

TEST(SolveOwaExact, UnanimousSntvTiesEveryCommitteeWithTheTopChoice) {
  const int m = 6, k = 3;
  std::vector<std::vector<int>> votes(4, {2, 0, 1, 3, 4, 5});
  const DistrictElection e({0, 0, 0, 1, 1, 1}, 2, votes);
  const auto [w, z] = owa_vectors(Rule::Sntv, m, k);
  const auto s = solve_owa_exact(e, k, w, z);
  EXPECT_EQ(static_cast<double>(s.size()), binomial(m - 1, k - 1));
  for (const auto& c : s) EXPECT_NE(std::find(c.begin(), c.end(), 2), c.end());
}

TEST(SolveOwaExact, MatchesIndependentEnumeration) {
  Rng rng(24);
  for (int t = 0; t < 200; ++t) {
    const int m = 3 + static_cast<int>(rng.below(5));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(m, 4))));
    const auto e = random_mixed_district(rng, 3, m, 1 + static_cast<int>(rng.below(6)));
    for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::HB, Rule::KPav}) {
      const auto [w, z] = owa_vectors(r, m, k);
      ASSERT_EQ(solve_owa_exact(e, k, w, z), oracle_exact(e, k, w.w, z.z)) << rule_name(r) << " m=" << m << " k=" << k;
    }
  }
}

TEST(SolveOwaExact, CapExceededIsInfeasible) {
  Rng rng(25);
  const auto e = random_district(rng, 4, 5, 3);
  const auto [w, z] = owa_vectors(Rule::CC, 20, 10);
  EXPECT_THROW(solve_owa_exact(e, 10, w, z, 1000), EnumerationInfeasible);
}

TEST(SolveSeparableTopk, NoTieCountsPartiesAmongTopK) {
  // Plurality scores: c0=3, c1=2, c2=1, c3=0.
  std::vector<std::vector<int>> votes = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 1, 3, 2}, {1, 0, 2, 3}, {1, 0, 2, 3}, {2, 3, 1, 0}};
  const DistrictElection e({0, 1, 1, 0}, 2, votes);
  const auto a = solve_separable_topk(e, 2, SeparableScoring::Plurality);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.5);
}

TEST(SolveSeparableTopk, TwoWayTieForLastSeatSplitsIt) {
  // Plurality: c0=2, c1=1, c2=1 -> c1 and c2 tie for the second seat.
  std::vector<std::vector<int>> votes = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {2, 0, 1}};
  const DistrictElection e({0, 1, 2}, 3, votes);
  const auto a = solve_separable_topk(e, 2, SeparableScoring::Plurality);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.25);
  EXPECT_DOUBLE_EQ(a[2], 0.25);
}

TEST(SolveSeparableTopk, ThreeWayTieForTwoSlotsMatchesEnumeration) {
  // c0..c2 one first place each, c3 none: 3-way tie for k=2.
  std::vector<std::vector<int>> votes = {{0, 3, 1, 2}, {1, 3, 2, 0}, {2, 3, 0, 1}};
  const DistrictElection e({0, 0, 1, 1}, 2, votes);
  const auto a = solve_separable_topk(e, 2, SeparableScoring::Plurality);
  const auto [w, z] = owa_vectors(Rule::Sntv, 4, 2);
  const auto b = allocation_from_committees(solve_owa_exact(e, 2, w, z), e.affiliation(), 2);
  EXPECT_NEAR(a[0], b[0], 1e-12);
  EXPECT_NEAR(a[0], 2.0 / 3.0, 1e-12);
}

TEST(SolveSeparableTopk, EquivalentToExactEnumerationOnRandomInstances) {
  Rng rng(26);
  for (int t = 0; t < 300; ++t) {
    const int m = 2 + static_cast<int>(rng.below(8));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    if (binomial(m, k) > 1e4) continue;
    const auto e = random_mixed_district(rng, 3, m, 1 + static_cast<int>(rng.below(5)));
    for (auto [rule, sep] : {std::pair{Rule::Sntv, SeparableScoring::Plurality}, std::pair{Rule::KBorda, SeparableScoring::Borda}}) {
      const auto [w, z] = owa_vectors(rule, m, k);
      const auto exact = allocation_from_committees(solve_owa_exact(e, k, w, z), e.affiliation(), 3);
      const auto fast = solve_separable_topk(e, k, sep);
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(fast[i], exact[i], 1e-9);
    }
  }
}

TEST(SolveOwaGreedy, SingleSeatEqualsExactMaximizer) {
  Rng rng(27);
  for (int t = 0; t < 100; ++t) {
    const auto e = random_mixed_district(rng, 3, 6, 7);
    for (Rule r : {Rule::CC, Rule::HB, Rule::KPav}) {
      const auto [w, z] = owa_vectors(r, 6, 1);
      const auto g = solve_owa_greedy(e, 1, w, z);
      const auto ex = solve_owa_exact(e, 1, w, z);
      // Greedy picks the lowest-index maximizer; exact lists maximizers in order.
      ASSERT_EQ(g, ex.front());
    }
  }
}

TEST(SolveOwaGreedy, UnanimousBlocsAreFound) {
  // Three blocs, each adoring a distinct candidate.
  std::vector<std::vector<int>> votes;
  for (int b = 0; b < 3; ++b) {
    for (int v = 0; v < 4; ++v) {
      std::vector<int> order = {b * 2};
      for (int c = 0; c < 6; ++c) {
        if (c != b * 2) order.push_back(c);
      }
      votes.push_back(order);
    }
  }
  const DistrictElection e({0, 0, 1, 1, 2, 2}, 3, votes);
  const auto [w, z] = owa_vectors(Rule::CC, 6, 3);
  EXPECT_EQ(solve_owa_greedy(e, 3, w, z), (Committee{0, 2, 4}));
}

TEST(SolveOwaGreedy, RespectsTheGreedyBoundOnRandomInstances) {
  Rng rng(28);
  const double bound = 1.0 - std::exp(-1.0);
  for (int t = 0; t < 100; ++t) {
    const auto e = random_mixed_district(rng, 3, 8, 10);
    for (Rule r : {Rule::CC, Rule::HB, Rule::KPav}) {
      const auto [w, z] = owa_vectors(r, 8, 3);
      const auto g = solve_owa_greedy(e, 3, w, z);
      const auto ex = solve_owa_exact(e, 3, w, z);
      ASSERT_GE(total_owa_score(e, g, w, z), bound * total_owa_score(e, ex.front(), w, z) - 1e-9);
    }
  }
}

TEST(RuleAllocation, SingleDistrictEqualsDistrictAllocation) {
  Rng rng(29);
  const auto e = spoiler::testing::random_election(rng, 3, 1, 2, 9, 2);
  for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::Stv, Rule::Jdh}) {
    const auto spec = RuleSpec::defaults(r);
    EXPECT_EQ(rule_allocation(e, spec).shares(), district_allocation(e.district(0), 2, spec).shares());
  }
}

TEST(RuleAllocation, SntvWithOneSeatIsOnePavAndPlurality) {
  Rng rng(30);
  for (int t = 0; t < 50; ++t) {
    const auto e = spoiler::testing::random_election(rng, 3, 3, 2, 7, 1);
    const auto sntv = rule_allocation(e, RuleSpec{Rule::Sntv, Solver::Exact});
    const auto pav = rule_allocation(e, RuleSpec{Rule::KPav, Solver::Exact});
    std::vector<double> plural(3, 0.0);
    for (const auto& d : e.districts()) {
      std::vector<int> firsts(static_cast<std::size_t>(d.num_candidates()), 0);
      for (int v = 0; v < d.num_voters(); ++v) ++firsts[static_cast<std::size_t>(d.vote(v)[0])];
      const int top = *std::max_element(firsts.begin(), firsts.end());
      int ties = 0;
      for (int f : firsts) ties += f == top;
      for (int c = 0; c < d.num_candidates(); ++c) {
        if (firsts[static_cast<std::size_t>(c)] == top) plural[static_cast<std::size_t>(d.party_of(c))] += 1.0 / ties / 3.0;
      }
    }
    for (int i = 0; i < 3; ++i) {
      ASSERT_NEAR(sntv[i], pav[i], 1e-12);
      ASSERT_NEAR(sntv[i], plural[static_cast<std::size_t>(i)], 1e-12);
    }
  }
}

TEST(RuleAllocation, TwoIdenticalDistrictsEqualOne) {
  Rng rng(31);
  const auto d = random_district(rng, 3, 2, 8);
  const MultiDistrictElection one(PartyRoster::numbered(3), {d}, {2});
  const MultiDistrictElection two(PartyRoster::numbered(3), {d, d}, {2, 2});
  for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::HB, Rule::KPav, Rule::Stv, Rule::Jdh, Rule::JdhPotLadle}) {
    const auto spec = RuleSpec::defaults(r);
    const auto a = rule_allocation(one, spec), b = rule_allocation(two, spec);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12) << rule_name(r);
  }
}

TEST(RuleAllocation, EveryRuleReturnsAnAllocation) {
  Rng rng(32);
  for (int t = 0; t < 20; ++t) {
    const auto e = spoiler::testing::random_election(rng, 4, 2, 3, 12, 3);
    for (Rule r : {Rule::Sntv, Rule::KBorda, Rule::CC, Rule::HB, Rule::KPav, Rule::Stv, Rule::Jdh, Rule::JdhPotLadle}) {
      const auto a = rule_allocation(e, RuleSpec::defaults(r));
      double s = 0.0;
      for (double x : a.shares()) {
        ASSERT_GE(x, 0.0);
        s += x;
      }
      ASSERT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(RuleSpec, SolverCompatibility) {
  EXPECT_TRUE((RuleSpec{Rule::CC, Solver::Greedy}.valid()));
  EXPECT_FALSE((RuleSpec{Rule::Sntv, Solver::Greedy}.valid()));
  EXPECT_FALSE((RuleSpec{Rule::Jdh, Solver::Formula}.valid()));
  EXPECT_TRUE((RuleSpec{Rule::JdhPotLadle, Solver::Formula}.valid()));
  EXPECT_FALSE((RuleSpec{Rule::JdhPotLadle, Solver::Exact}.valid()));
  EXPECT_EQ(parse_rule("jdh-potladle"), Rule::JdhPotLadle);
  EXPECT_THROW(parse_rule("borda"), ConfigError);
}
