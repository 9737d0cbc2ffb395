#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "spoiler/election.hpp"
#include "spoiler/election_io.hpp"
#include "test_support.hpp"

using namespace spoiler;
using spoiler::testing::random_election;
using spoiler::testing::random_permutation;

namespace {

std::vector<int> restrict(const std::vector<int>& vote, const std::vector<int>& keep) {
  return restrict_vote(std::span<const int>(vote), keep);
}

}  // namespace

TEST(RestrictVote, KeepsRelativeOrder) {
  // a=0, b=1, c=2, d=3
  EXPECT_EQ(restrict({0, 1, 2}, {0, 2}), (std::vector<int>{0, 2}));
  EXPECT_EQ(restrict({0, 1, 2}, {0, 1, 2}), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(restrict({2, 0, 3, 1}, {1, 3}), (std::vector<int>{3, 1}));
}

TEST(RestrictVote, EmptyOrForeignKeepSetIsRejected) {
  EXPECT_THROW(restrict({0, 1, 2}, {}), InvalidRestriction);
  EXPECT_THROW(restrict({0, 1, 2}, {0, 7}), InvalidRestriction);
}

TEST(RestrictVote, MatchesFilterOracleOverAllOrdersOfFour) {
  std::vector<int> vote = {0, 1, 2, 3};
  do {
    for (int mask = 1; mask < 16; ++mask) {
      std::vector<int> keep;
      for (int c = 0; c < 4; ++c) {
        if (mask >> c & 1) keep.push_back(c);
      }
      std::vector<int> expected;
      for (int c : vote) {
        if (mask >> c & 1) expected.push_back(c);
      }
      ASSERT_EQ(restrict(vote, keep), expected);
    }
  } while (std::next_permutation(vote.begin(), vote.end()));
}

TEST(RestrictVote, PreservesPairOrderOnRandomPermutations) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + static_cast<int>(rng.below(9));
    const auto vote = random_permutation(rng, m);
    std::vector<int> keep;
    for (int c = 0; c < m; ++c) {
      if (rng.coin()) keep.push_back(c);
    }
    if (keep.empty()) keep.push_back(0);
    const auto r = restrict(vote, keep);
    ASSERT_EQ(r.size(), keep.size());
    std::map<int, int> pos;
    for (int i = 0; i < m; ++i) pos[vote[static_cast<std::size_t>(i)]] = i;
    for (std::size_t i = 1; i < r.size(); ++i) ASSERT_LT(pos[r[i - 1]], pos[r[i]]);
  }
}

TEST(DistrictElection, RejectsMalformedVotes) {
  EXPECT_THROW(DistrictElection({0, 1}, 2, std::vector<std::vector<int>>{{0, 0}}), DomainError);
  EXPECT_THROW(DistrictElection({0, 2}, 2, std::vector<std::vector<int>>{{0, 1}}), DomainError);
  EXPECT_THROW(DistrictElection({0, 1}, 2, std::vector<std::vector<int>>{}), DomainError);
  EXPECT_THROW(DistrictElection({0, 1}, 2, std::vector<std::vector<int>>{{0, 1}, {1}}), DimensionError);
}

TEST(DistrictElection, PositionsInvertVotes) {
  Rng rng(3);
  const auto d = spoiler::testing::random_district(rng, 3, 2, 10);
  for (int v = 0; v < d.num_voters(); ++v) {
    for (int r = 0; r < d.num_candidates(); ++r) EXPECT_EQ(d.positions(v)[static_cast<std::size_t>(d.vote(v)[static_cast<std::size_t>(r)])], r);
  }
}

TEST(PartyRoster, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(PartyRoster({"A", "A"}), DomainError);
  EXPECT_THROW(PartyRoster(std::vector<std::string>{}), DomainError);
  EXPECT_EQ(PartyRoster::numbered(3).name(2), "P3");
}

TEST(Allocation, ValidatesSimplex) {
  EXPECT_THROW(Allocation({0.5, 0.6}), DomainError);
  EXPECT_THROW(Allocation({-0.1, 1.1}), DomainError);
  EXPECT_THROW(Allocation(std::vector<double>{}), DimensionError);
  const Allocation a({0.25, 0.75});
  EXPECT_EQ(a.embed_zero(1).shares(), (std::vector<double>{0.25, 0.0, 0.75}));
}

TEST(RestrictElection, FullRosterIsIdentity) {
  Rng rng(5);
  const auto e = random_election(rng, 3, 2, 2, 6, 2);
  const std::vector<int> all = {0, 1, 2};
  EXPECT_EQ(restrict_election(e, all), e);
}

TEST(RestrictElection, DroppingTheOtherOfTwoPartiesLeavesOnlyPartyOneCandidates) {
  Rng rng(6);
  const auto e = random_election(rng, 2, 1, 3, 5, 2);
  const auto r = remove_party(e, 1);
  ASSERT_EQ(r.num_parties(), 1);
  EXPECT_EQ(r.district(0).num_candidates(), 3);
  for (int v = 0; v < 5; ++v) {
    for (int c : r.district(0).vote(v)) EXPECT_EQ(r.district(0).party_of(c), 0);
  }
  EXPECT_EQ(r.seats(), e.seats());
}

TEST(RestrictElection, CandidateCountsShrinkByDroppedPartySize) {
  // Two districts with heterogeneous party sizes.
  const DistrictElection d1({0, 0, 1, 2, 2, 2}, 3, std::vector<std::vector<int>>{{5, 4, 3, 2, 1, 0}});
  const DistrictElection d2({0, 1, 1, 2}, 3, std::vector<std::vector<int>>{{3, 0, 1, 2}, {0, 1, 2, 3}});
  const MultiDistrictElection e(PartyRoster::numbered(3), {d1, d2}, {2, 1});
  const auto r = remove_party(e, 2);
  EXPECT_EQ(r.district(0).num_candidates(), 6 - 3);
  EXPECT_EQ(r.district(1).num_candidates(), 4 - 1);
  EXPECT_EQ(r.roster().names(), (std::vector<std::string>{"P1", "P2"}));
  // Labels keep the original candidate identity.
  EXPECT_EQ(r.district(1).vote(0)[0], 0);
  EXPECT_EQ(r.district(1).label(r.district(1).vote(0)[0]), 0);
}

TEST(RestrictElection, IsAProjection) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto e = random_election(rng, 4, 2, 2, 5, 2);
    const std::vector<int> outer = {0, 1, 3};
    const std::vector<int> inner_in_outer = {0, 2};  // parties 0 and 3 of the original
    const std::vector<int> inner = {0, 3};
    EXPECT_EQ(restrict_election(restrict_election(e, outer), inner_in_outer), restrict_election(e, inner));
  }
}

TEST(RestrictElection, EmptyKeepSetIsRejected) {
  Rng rng(8);
  const auto e = random_election(rng, 2, 1, 1, 3, 1);
  EXPECT_THROW(restrict_election(e, std::vector<int>{}), InvalidRestriction);
}

TEST(Aggregate, Examples) {
  const std::vector<Allocation> same = {Allocation({0.2, 0.8}), Allocation({0.2, 0.8})};
  const std::vector<int> k2 = {3, 5};
  EXPECT_NEAR(aggregate(same, k2)[0], 0.2, 1e-15);
  const std::vector<Allocation> r = {Allocation({1.0, 0.0}), Allocation({0.0, 1.0})};
  const std::vector<int> k = {1, 3};
  EXPECT_DOUBLE_EQ(aggregate(r, k)[0], 0.25);
  EXPECT_DOUBLE_EQ(aggregate(r, k)[1], 0.75);
  const std::vector<int> bad = {1};
  EXPECT_THROW(aggregate(r, bad), DimensionError);
}

TEST(Aggregate, MatchesDirectSummationAndIsPermutationInvariant) {
  Rng rng(9);
  std::vector<Allocation> parts;
  std::vector<int> seats;
  for (int d = 0; d < 5; ++d) {
    parts.push_back(spoiler::testing::random_allocation(rng, 4));
    seats.push_back(1 + static_cast<int>(rng.below(10)));
  }
  const auto a = aggregate(parts, seats);
  double total = 0.0;
  for (int s : seats) total += s;
  for (int i = 0; i < 4; ++i) {
    double num = 0.0;
    for (int d = 0; d < 5; ++d) num += seats[static_cast<std::size_t>(d)] * parts[static_cast<std::size_t>(d)][i];
    EXPECT_NEAR(a[i], num / total, 1e-12);
  }
  std::reverse(parts.begin(), parts.end());
  std::reverse(seats.begin(), seats.end());
  const auto b = aggregate(parts, seats);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(AllocationFromCommittees, Examples) {
  const std::vector<int> aff = {0, 0, 1};
  const std::vector<Committee> one = {{0, 1}};
  EXPECT_EQ(allocation_from_committees(one, aff, 2).shares(), (std::vector<double>{1.0, 0.0}));
  const std::vector<Committee> two = {{0, 1}, {0, 2}};
  EXPECT_EQ(allocation_from_committees(two, aff, 2).shares(), (std::vector<double>{0.75, 0.25}));
  EXPECT_THROW(allocation_from_committees(std::vector<Committee>{}, aff, 2), TieResolutionError);
}

TEST(AllocationFromCommittees, EqualsBruteForceAverage) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const int m = 6, k = 3, p = 3;
    std::vector<int> aff;
    for (int c = 0; c < m; ++c) aff.push_back(static_cast<int>(rng.below(p)));
    std::vector<Committee> set;
    const int count = 1 + static_cast<int>(rng.below(20));
    for (int s = 0; s < count; ++s) {
      auto perm = random_permutation(rng, m);
      Committee c(perm.begin(), perm.begin() + k);
      std::sort(c.begin(), c.end());
      set.push_back(c);
    }
    std::vector<double> expect(p, 0.0);
    for (const auto& c : set) {
      for (int i = 0; i < p; ++i) {
        double members = 0;
        for (int x : c) members += aff[static_cast<std::size_t>(x)] == i;
        expect[static_cast<std::size_t>(i)] += members / k / count;
      }
    }
    const auto got = allocation_from_committees(set, aff, p);
    for (int i = 0; i < p; ++i) EXPECT_NEAR(got[i], expect[static_cast<std::size_t>(i)], 1e-12);
  }
}

TEST(ElectionText, RoundTrips) {
  Rng rng(12);
  const auto e = random_election(rng, 3, 2, 2, 4, 2);
  std::stringstream ss;
  write_election(ss, e);
  EXPECT_EQ(read_election(ss), e);
}

TEST(ElectionText, ReportsLineOfBadInput) {
  std::istringstream in("# comment\n2 1\n2 1 1\n0 1\n0 0\n");
  try {
    read_election(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  std::istringstream short_in("2 1\n2 1 1\n0 1\n");
  EXPECT_THROW(read_election(short_in), ParseError);
  std::istringstream junk("2 x\n");
  EXPECT_THROW(read_election(junk), ParseError);
}
