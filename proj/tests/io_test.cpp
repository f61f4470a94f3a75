#include <gtest/gtest.h>

#include <cstdio>
#include <limits>
#include <optional>

#include "sigrev/sigrev.hpp"

using namespace sigrev;

namespace {

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Format, RoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 3.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(3.0), "3.0");
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::quiet_NaN()), "null");
  EXPECT_EQ(io::dump(io::Json{{"a", 0.1}}, -1), "{\"a\":0.10000000000000001}");
}

TEST(Instance, RoundTrip) {
  for (const auto& inst : {random_regular_instance(4, 12, 3), example1_instance(50.0, 0.3, 16),
                           random_mixture_instance(2, 10, 2)}) {
    const auto back = io::instance_from_json(io::parse(io::dump(io::to_json(inst))));
    EXPECT_EQ(back.grid().points(), inst.grid().points());
    EXPECT_EQ(back.grid().widths(), inst.grid().widths());
    EXPECT_EQ(back.signals(), inst.signals());
    EXPECT_EQ(back.dense_pmf(), inst.dense_pmf());
    EXPECT_EQ(back.mode(), inst.mode());
    EXPECT_EQ(back.mixture_k(), inst.mixture_k());
  }
}

TEST(Instance, DefaultsToMassMode) {
  const auto inst = io::instance_from_json(
      io::parse(R"({"values": [1, 2], "signals": ["a"], "pmf": [0.5, 0.5]})"));
  EXPECT_EQ(inst.mode(), MassMode::Mass);
  EXPECT_NEAR(drev(inst).total, 1.0, 1e-12);
}

TEST(Instance, ParseErrors) {
  EXPECT_EQ(code_of([] { io::parse("{\"values\": [1,"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::instance_from_json(io::parse(R"({"signals": ["a"], "pmf": [1]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::instance_from_json(io::parse(R"({"values": "x", "signals": ["a"], "pmf": [1]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] {
              io::instance_from_json(io::parse(R"({"mode": "dense", "values": [1], "signals": ["a"], "pmf": [1]})"));
            }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::instance_from_json(io::parse(R"({"values": [1, 2], "signals": ["a"], "pmf": [0.5, 0.4]})")); }),
            ErrorCode::SumNotOne);
  EXPECT_EQ(code_of([] { io::read_file("/nonexistent/instance.json"); }), ErrorCode::ParseError);
}

TEST(Mechanism, RoundTrip) {
  const auto inst = random_regular_instance(9, 8, 2);
  const auto sol = solve_single_buyer(inst, {IrMode::ExPost, PaymentMode::NonNegative, IcMode::Bayesian});
  const auto back = io::mechanism_from_json(inst, io::parse(io::dump(io::to_json(inst, sol.mechanism))));
  EXPECT_EQ(back.x, sol.mechanism.x);
  EXPECT_EQ(back.p, sol.mechanism.p);
}

TEST(Profile, RoundTripWithMechanism) {
  const auto inst = random_two_bidder(6, 4, 3);
  const auto back = io::profile_from_json(io::parse(io::dump(io::to_json(inst))));
  EXPECT_EQ(back.dense_pmf(), inst.dense_pmf());
  EXPECT_EQ(back.grid(1).points(), inst.grid(1).points());
  const auto la = lookahead_auction(inst);
  const auto mech = io::multi_mechanism_from_json(inst, io::to_json(inst, la.mechanism));
  EXPECT_EQ(mech.x, la.mechanism.x);
  EXPECT_EQ(mech.p, la.mechanism.p);
  EXPECT_EQ(code_of([&] { io::multi_mechanism_from_json(inst, io::Json{{"x", {1.0}}, {"p", {1.0}}}); }),
            ErrorCode::ShapeMismatch);
}

TEST(Profile, AcceptsBareGrids) {
  const auto inst = io::profile_from_json(
      io::parse(R"({"n": 2, "grids": [[1, 2], [1]], "pmf": [0.5, 0.5]})"));
  EXPECT_EQ(inst.num_bidders(), 2u);
  EXPECT_EQ(code_of([] { io::profile_from_json(io::parse(R"({"n": 3, "grids": [[1], [1]], "pmf": [1]})")); }),
            ErrorCode::ParseError);
}

TEST(File, WriteThenRead) {
  const std::string path = testing::TempDir() + "sigrev_io_test.json";
  const auto inst = random_regular_instance(1, 5, 2);
  io::write_file(path, io::to_json(inst));
  EXPECT_EQ(io::instance_from_json(io::read_file(path)).dense_pmf(), inst.dense_pmf());
  std::remove(path.c_str());
}
