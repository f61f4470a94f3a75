#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "sigrev/sigrev.hpp"

using namespace sigrev;

namespace {

ExperimentReport run(const std::string& name, io::Json params, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.name = name;
  c.seed = seed;
  c.parameters = std::move(params);
  return run_experiment(c);
}

}  // namespace

TEST(Experiments, Names) {
  EXPECT_EQ(experiment_names().size(), 6u);
  ExperimentConfig c;
  c.name = "gap-regular";
  try {
    run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownExperiment);
  }
}

TEST(Experiments, BadParameters) {
  for (const auto& p : {io::Json{{"instances", 0}}, io::Json{{"instances", 1.5}}, io::Json{{"delta", -1}},
                        io::Json{{"signals_min", 5}, {"signals_max", 2}}, io::Json::array()}) {
    try {
      run("mixture-bound", p);
      FAIL() << p.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    }
  }
}

TEST(Experiments, ConfigFromJson) {
  const auto c = config_from_json(io::parse(R"({"name": "gap-irregular", "seed": 7, "parameters": {"m_levels": [2]}})"));
  EXPECT_EQ(c.name, "gap-irregular");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_THROW(config_from_json(io::parse(R"({"seed": -1})")), Error);
  EXPECT_THROW(config_from_json(io::parse("[]")), Error);
}

TEST(Experiments, GapNegativePaymentSmall) {
  const auto r = run("gap-negative-payment", {{"H", {1e2, 1e4}}, {"eps", 0.1}, {"points", 60}, {"lp_points", 30}});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.metric("closed_form_ir_violation").pass);
  EXPECT_TRUE(r.metric("closed_form_bic_violation").pass);
  EXPECT_TRUE(r.metric("free_minus_nonneg").pass);
  EXPECT_TRUE(r.metric("weak_duality_margin").pass);
}

TEST(Experiments, GapIrregularSmall) {
  const auto r = run("gap-irregular", {{"m_levels", {2, 3, 4}}});
  EXPECT_TRUE(r.all_pass);
  EXPECT_LE(r.metric("enumeration_agreement").value, 1e-12);
}

TEST(Experiments, BoundFamiliesSmall) {
  const auto a = run("three-x-bound", {{"instances", 3}, {"n_values", 30}});
  EXPECT_TRUE(a.all_pass);
  const auto b = run("mixture-bound", {{"instances", 3}, {"n_values", 30}});
  EXPECT_TRUE(b.all_pass);
  EXPECT_EQ(b.metrics.size(), 2u);
}

TEST(Experiments, LookaheadSmall) {
  const auto r = run("lookahead-five-x", {{"instances", 3}, {"grid", 5}});
  EXPECT_TRUE(r.all_pass);
}

TEST(Experiments, FullSurplusInterim) {
  const auto r = run("full-surplus-interim", {{"instances", 3}});
  EXPECT_TRUE(r.all_pass);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_LE(r.at(i, "lp_expost_free"), r.at(i, "lp_interim_free") + 1e-9);
  }
}

TEST(Experiments, Deterministic) {
  const io::Json p{{"instances", 2}, {"n_values", 20}, {"solve_lp", 0}, {"refinement", 0}};
  EXPECT_EQ(run("three-x-bound", p, 5).csv(), run("three-x-bound", p, 5).csv());
  EXPECT_NE(run("three-x-bound", p, 5).csv(), run("three-x-bound", p, 6).csv());
}

TEST(Experiments, WritesOutputs) {
  ExperimentConfig c;
  c.name = "gap-irregular";
  c.parameters = {{"m_levels", {2}}};
  c.output = testing::TempDir() + "sigrev_exp";
  const auto r = run_experiment(c);
  std::ifstream csv(c.output + ".csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("m_levels,", 0), 0u);
  const auto j = io::read_file(c.output + ".json");
  EXPECT_EQ(j["experiment"], "gap-irregular");
  EXPECT_EQ(j["all_pass"], r.all_pass);
  std::remove((c.output + ".csv").c_str());
  std::remove((c.output + ".json").c_str());
}
