#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "sigrev/sigrev.hpp"

using namespace sigrev;

namespace {

std::vector<ConstraintMode> all_modes() {
  std::vector<ConstraintMode> out;
  for (auto ir : {IrMode::ExPost, IrMode::Interim}) {
    for (auto pay : {PaymentMode::Free, PaymentMode::NonNegative}) {
      for (auto ic : {IcMode::Bayesian, IcMode::DominantStrategy}) out.push_back({ir, pay, ic});
    }
  }
  return out;
}

std::string key(const ConstraintMode& m) {
  return std::string(to_string(m.ir)) + "/" + std::string(to_string(m.payments)) + "/" +
         std::string(to_string(m.ic));
}

nlohmann::json fixture() {
  std::ifstream in(std::string(SIGREV_TEST_DATA) + "/lp_reference.json");
  return nlohmann::json::parse(in);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

constexpr ConstraintMode kNonNeg{IrMode::ExPost, PaymentMode::NonNegative, IcMode::Bayesian};

}  // namespace

TEST(SingleBuyer, PointMass) {
  const std::vector<double> pmf{1.0};
  const auto inst = SignalPricingInstance::build(ValueGrid({3.5}), {"s"}, pmf);
  for (const auto& m : all_modes()) {
    const auto sol = solve_single_buyer(inst, m);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.objective, 3.5, 1e-9) << key(m);
  }
}

TEST(SingleBuyer, UninformativeSignalIsMyerson) {
  const std::vector<double> pmf{0.5, 0.5};
  const auto inst = SignalPricingInstance::build(ValueGrid({1.0, 2.0}), {"*"}, pmf);
  for (const auto& m : all_modes()) {
    EXPECT_NEAR(solve_single_buyer(inst, m).objective, 1.0, 1e-9) << key(m);
  }
}

TEST(SingleBuyer, InformativeSignalExtractsSurplus) {
  const std::vector<double> pmf{0.5, 0.0, 0.0, 0.5};
  const auto inst = SignalPricingInstance::build(ValueGrid({1.0, 2.0}), {"lo", "hi"}, pmf);
  const auto sol = solve_single_buyer(inst, kNonNeg);
  EXPECT_NEAR(sol.objective, 1.5, 1e-9);
  const auto rep = audit_mechanism(inst, sol.mechanism);
  EXPECT_NEAR(rep.revenue, 1.5, 1e-9);
}

TEST(SingleBuyer, SizeCap) {
  const auto inst = random_regular_instance(1, 100, 3);
  LpOptions opts;
  opts.max_cells = 50;
  try {
    solve_single_buyer(inst, kNonNeg, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeCapExceeded);
  }
}

TEST(SingleBuyer, MatchesReferenceSolver) {
  const auto fx = fixture();
  for (const auto& c : fx["single"]) {
    const auto inst = SignalPricingInstance::build(ValueGrid(c["values"].get<std::vector<double>>()),
                                                   c["signals"].get<std::vector<std::string>>(),
                                                   c["pmf"].get<std::vector<double>>());
    for (const auto& m : all_modes()) {
      const auto sol = solve_single_buyer(inst, m);
      ASSERT_EQ(sol.status, LpStatus::Optimal);
      const double want = c["objective"][key(m)].get<double>();
      EXPECT_LE(rel(sol.objective, want), 1e-7) << key(m) << " " << sol.objective << " vs " << want;
      const auto rep = audit_mechanism(inst, sol.mechanism);
      EXPECT_TRUE(passes(rep, m, 1e-7)) << key(m);
      EXPECT_NEAR(rep.revenue, sol.objective, 1e-7 * std::max(1.0, sol.objective));
    }
  }
}

TEST(SingleBuyer, ModeMonotonicityAndDRev) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = seed % 2 ? random_regular_instance(seed, 12, 3) : random_mixture_instance(seed, 10, 3);
    auto obj = [&](IrMode ir, PaymentMode pay, IcMode ic) {
      const auto sol = solve_single_buyer(inst, {ir, pay, ic});
      EXPECT_EQ(sol.status, LpStatus::Optimal);
      EXPECT_TRUE(passes(audit_mechanism(inst, sol.mechanism), {ir, pay, ic}, 1e-7));
      return sol.objective;
    };
    for (auto ic : {IcMode::Bayesian, IcMode::DominantStrategy}) {
      const double interim_free = obj(IrMode::Interim, PaymentMode::Free, ic);
      const double expost_free = obj(IrMode::ExPost, PaymentMode::Free, ic);
      const double expost_nonneg = obj(IrMode::ExPost, PaymentMode::NonNegative, ic);
      EXPECT_GE(interim_free, expost_free - 1e-7);
      EXPECT_GE(expost_free, expost_nonneg - 1e-7);
    }
    for (auto ir : {IrMode::ExPost, IrMode::Interim}) {
      for (auto pay : {PaymentMode::Free, PaymentMode::NonNegative}) {
        EXPECT_GE(obj(ir, pay, IcMode::Bayesian), obj(ir, pay, IcMode::DominantStrategy) - 1e-7);
      }
    }
    EXPECT_GE(obj(IrMode::ExPost, PaymentMode::NonNegative, IcMode::Bayesian), drev(inst).total - 1e-7);
  }
}

TEST(SingleBuyer, LagrangianBoundsTheOptimum) {
  const auto inst = random_mixture_instance(9, 8, 3);
  const auto sol = solve_single_buyer(inst, kNonNeg);
  const auto d = oracle::dense(inst);
  const auto M = oracle::dense(inst, sol.mechanism);
  Rng rng(17);
  const std::size_t T = d.T();
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<double> lambda(T * T), mu(T * d.S);
    for (auto& v : lambda) v = 5.0 * rng.uniform();
    for (auto& v : mu) v = 5.0 * rng.uniform();
    EXPECT_GE(oracle::lagrangian(d, M, lambda, mu), sol.objective - 1e-7);
  }
}

TEST(SingleBuyer, DominatesEveryLatticeMechanism) {
  // x on {0, 1/2, 1}; payments from {0, x v : v on the grid, v <= own value}, ex post IR and
  // nonnegative by construction. The best BIC lattice point must not beat the LP.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = random_generic_3x3(seed);
    const std::vector<double> pmf = inst.dense_pmf();
    // keep two signals: merge the third into the second
    std::vector<double> two(6);
    for (std::size_t t = 0; t < 3; ++t) {
      two[t * 2] = pmf[t * 3];
      two[t * 2 + 1] = pmf[t * 3 + 1] + pmf[t * 3 + 2];
    }
    const auto small = SignalPricingInstance::build(inst.grid(), {"a", "b"}, two);
    const auto d = oracle::dense(small);
    const double lp = solve_single_buyer(small, kNonNeg).objective;
    double best = 0.0;
    oracle::DenseMech M{std::vector<double>(6), std::vector<double>(6)};
    for (int xs = 0; xs < 729; ++xs) {
      int code = xs;
      for (std::size_t k = 0; k < 6; ++k) {
        M.x[k] = 0.5 * (code % 3);
        code /= 3;
      }
      // payment choice per cell: index into {0, x v_0, ..., x v_t}
      std::array<int, 6> pick{};
      while (true) {
        for (std::size_t k = 0; k < 6; ++k) {
          M.p[k] = pick[k] == 0 ? 0.0 : M.x[k] * d.values[pick[k] - 1];
        }
        if (oracle::bic_violation(d, M) <= 1e-12) best = std::max(best, oracle::revenue(d, M));
        std::size_t k = 0;
        for (; k < 6; ++k) {
          if (pick[k] < static_cast<int>(k / 2) + 1) {
            ++pick[k];
            break;
          }
          pick[k] = 0;
        }
        if (k == 6) break;
      }
    }
    EXPECT_GE(lp, best - 1e-9) << seed;
    EXPECT_GT(best, 0.0);
  }
}

TEST(MultiBidder, SingleBidderMatchesSingleBuyer) {
  const auto er = erd_grid(16.0, 5);
  const auto multi = MultiBidderInstance::build({er.grid}, er.pmf);
  const auto single = SignalPricingInstance::build(er.grid, {"*"}, er.pmf);
  for (const auto& m : all_modes()) {
    if (m.ir == IrMode::Interim) continue;
    EXPECT_NEAR(solve_multi_bidder(multi, m).objective, solve_single_buyer(single, m).objective, 1e-9);
  }
}

TEST(MultiBidder, IidUniformBeatsSecondPrice) {
  const std::vector<double> pmf{0.25, 0.25, 0.25, 0.25};
  const auto inst = MultiBidderInstance::build({ValueGrid({1.0, 2.0}), ValueGrid({1.0, 2.0})}, pmf);
  EXPECT_DOUBLE_EQ(second_price_revenue(inst), 1.25);
  const ConstraintMode dsic{IrMode::ExPost, PaymentMode::NonNegative, IcMode::DominantStrategy};
  const auto sol = solve_multi_bidder(inst, dsic);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_GE(sol.objective, 1.25 - 1e-9);
  const auto rep = audit_multi(inst, sol.mechanism);
  EXPECT_LE(rep.max_dsic_violation_rel, 1e-7);
  EXPECT_LE(rep.max_feasibility_violation, 1e-7);
  EXPECT_GE(solve_multi_bidder(inst, kNonNeg).objective, sol.objective - 1e-9);
}

TEST(MultiBidder, MatchesReferenceSolver) {
  const auto fx = fixture();
  for (const auto& c : fx["multi"]) {
    std::vector<ValueGrid> grids;
    for (const auto& g : c["grids"]) grids.emplace_back(g.get<std::vector<double>>());
    const auto inst = MultiBidderInstance::build(grids, c["pmf"].get<std::vector<double>>());
    for (const auto& m : all_modes()) {
      if (m.ir == IrMode::Interim) continue;
      const auto sol = solve_multi_bidder(inst, m);
      ASSERT_EQ(sol.status, LpStatus::Optimal);
      const double want = c["objective"][key(m)].get<double>();
      EXPECT_LE(rel(sol.objective, want), 1e-7) << key(m) << " " << sol.objective << " vs " << want;
      const auto rep = audit_multi(inst, sol.mechanism);
      const double ic = m.ic == IcMode::Bayesian ? rep.max_bic_violation_rel : rep.max_dsic_violation_rel;
      EXPECT_LE(ic, 1e-7);
      EXPECT_LE(rep.max_expost_ir_violation_rel, 1e-7);
      EXPECT_LE(rep.max_feasibility_violation, 1e-7);
      if (m.payments == PaymentMode::NonNegative) {
        EXPECT_GE(rep.min_payment, -1e-7);
      }
    }
  }
}

TEST(MultiBidder, HighestOnlyRestriction) {
  const auto inst = random_two_bidder(4, 4, 3);
  LpOptions opts;
  opts.highest_only = true;
  const auto sol = solve_multi_bidder(inst, kNonNeg, opts);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  const auto entries = inst.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::size_t w = highest_bidder(inst, entries[e].t);
    for (std::size_t i = 0; i < 2; ++i) {
      if (i != w) {
        EXPECT_EQ(sol.mechanism.alloc(e, i), 0.0);
      }
    }
  }
  EXPECT_LE(sol.objective, solve_multi_bidder(inst, kNonNeg).objective + 1e-9);
}

TEST(Certificate, MultipliersAreNonnegative) {
  const auto inst = random_regular_instance(5, 15, 3);
  const auto sol = solve_single_buyer(inst, kNonNeg);
  ASSERT_FALSE(sol.certificate.empty());
  for (const auto& r : sol.certificate) EXPECT_GE(r.value, -1e-12);
  EXPECT_GT(sol.stats.rounds, 0u);
  EXPECT_LE(sol.stats.max_row_violation, 1e-9);
}
