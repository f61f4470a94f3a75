#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sigrev/sigrev.hpp"

using namespace sigrev;

TEST(Lookahead, NullSecondBidderLeavesThePostedPrice) {
  const std::vector<double> pts{1.0, 2.0, 4.0};
  const auto m1 = oracle::erd_masses(pts, 4.0);
  std::vector<double> pmf(m1.begin(), m1.end());
  const auto inst = MultiBidderInstance::build({ValueGrid(pts), ValueGrid({0.5})}, pmf);
  const auto la = lookahead_auction(inst);
  EXPECT_NEAR(la.revenue, 1.0, 1e-12);
  EXPECT_NEAR(la.revenue_by_bidder[1], 0.0, 0.0);
  EXPECT_NEAR(la.revenue, oracle::best_posted(pts, m1), 1e-12);
}

TEST(Lookahead, RevenueMatchesOracle) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = random_two_bidder(seed, 2 + seed % 5, 2 + (seed * 7) % 6);
    const auto la = lookahead_auction(inst);
    EXPECT_NEAR(la.revenue, oracle::lookahead_revenue(oracle::dense(inst)), 1e-12) << seed;
    EXPECT_NEAR(audit_multi(inst, la.mechanism).revenue, la.revenue, 1e-12);
  }
}

TEST(Lookahead, DominantStrategyTruthful) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    for (const auto& inst : {random_two_bidder(seed, 6, 5), random_regular_two_bidder(seed, 8, 8)}) {
      const auto rep = audit_multi(inst, lookahead_auction(inst).mechanism);
      EXPECT_LE(rep.max_dsic_violation, 1e-9) << seed;
      EXPECT_LE(rep.max_expost_ir_violation, 1e-9) << seed;
      EXPECT_LE(rep.max_feasibility_violation, 0.0);
      EXPECT_GE(rep.min_payment, 0.0);
    }
  }
}

TEST(Lookahead, WinnerRegionsPartitionProfiles) {
  const auto inst = random_two_bidder(3, 7, 7);
  const auto la = lookahead_auction(inst);
  const auto entries = inst.entries();
  const auto d = oracle::dense(inst);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& t = entries[e].t;
    int wins = 0;
    for (std::size_t i = 0; i < 2; ++i) wins += wins_at(inst, i, t) ? 1 : 0;
    EXPECT_EQ(wins, 1);
    EXPECT_EQ(la.winner[e], oracle::winner(d, t[0], t[1]));
    EXPECT_TRUE(wins_at(inst, la.winner[e], t));
    EXPECT_EQ(la.mechanism.alloc(e, 1 - la.winner[e]), 0.0);
  }
}

TEST(Lookahead, TiesGoToTheLowerIndex) {
  const std::vector<double> pmf{0.25, 0.25, 0.25, 0.25};
  const auto inst = MultiBidderInstance::build({ValueGrid({1.0, 2.0}), ValueGrid({1.0, 2.0})}, pmf);
  EXPECT_TRUE(wins_at(inst, 0, Profile{1, 1, 0}));
  EXPECT_FALSE(wins_at(inst, 1, Profile{1, 1, 0}));
  EXPECT_TRUE(wins_at(inst, 1, Profile{0, 1, 0}));
}

TEST(Lift, BuildsTheSignalBidder) {
  const auto base = example1_instance(100.0, 0.2, 20);
  const double eps = 1e-3;
  const auto lifted = lift_two_bidders(base, eps);
  ASSERT_EQ(lifted.num_bidders(), 2u);
  EXPECT_EQ(lifted.grid(0).points(), base.grid().points());
  const std::size_t S = base.num_signals();
  ASSERT_EQ(lifted.grid(1).size(), S);
  for (std::size_t j = 0; j < S; ++j) {
    EXPECT_NEAR(lifted.grid(1)[j], (j + 1) * eps / S, 1e-18);
  }
  for (const auto& c : base.cells()) {
    EXPECT_NEAR(lifted.mass(Profile{c.t, c.s, 0}), c.mass, 1e-15);
  }
  EXPECT_THROW(lift_two_bidders(base, 0.0), Error);
}

TEST(Lift, SignalBidderRarelyWins) {
  const auto base = random_regular_instance(5, 30, 3);
  const auto lifted = lift_two_bidders(base, 1e-3);
  const auto la = lookahead_auction(lifted);
  EXPECT_NEAR(la.revenue_by_bidder[1], 0.0, 1e-3);
  EXPECT_LE(la.revenue, drev(base).total + 1e-3 + 1e-9);
}
