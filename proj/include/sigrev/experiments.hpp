#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sigrev/auctions.hpp"
#include "sigrev/core_model.hpp"
#include "sigrev/duality.hpp"
#include "sigrev/generators.hpp"
#include "sigrev/io.hpp"
#include "sigrev/lp_engine.hpp"
#include "sigrev/mechanisms.hpp"
#include "sigrev/public_pricing.hpp"

#ifndef SIGREV_VERSION
#define SIGREV_VERSION "unknown"
#endif

namespace sigrev {

inline constexpr const char* kVersion = SIGREV_VERSION;

// ---------------------------------------------------------------------------------------------
// Weak-duality probes: Lagrangian values at a solved mechanism under random nonnegative weights.

inline DualWeights random_weights(const SignalPricingInstance& inst, Rng& rng) {
  const std::size_t T = inst.num_values();
  DualWeights w;
  w.num_values = T;
  w.lambda.resize(T * T);
  for (auto& v : w.lambda) v = rng.uniform();
  w.mu.resize(inst.cells().size());
  for (auto& v : w.mu) v = rng.uniform();
  w.mu_interim.resize(T);
  for (auto& v : w.mu_interim) v = rng.uniform();
  return w;
}

inline MultiDualWeights random_weights(const MultiBidderInstance& inst, Rng& rng) {
  MultiDualWeights w;
  for (std::size_t i = 0; i < inst.num_bidders(); ++i) {
    const std::size_t Ti = inst.grid(i).size();
    std::vector<double> l(Ti * Ti);
    for (auto& v : l) v = rng.uniform();
    w.lambda.push_back(std::move(l));
  }
  w.mu.resize(inst.entries().size() * inst.num_bidders());
  for (auto& v : w.mu) v = rng.uniform();
  return w;
}

/// min over draws of L(x, p, lambda, mu) - objective.
inline double weak_duality_margin(const SignalPricingInstance& inst, const Mechanism& mech,
                                  double objective, IrMode ir, std::uint64_t seed, int draws = 20) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int d = 0; d < draws; ++d) {
    const auto w = random_weights(inst, rng);
    worst = std::min(worst, evaluate_lagrangian(inst, mech, w, ir) - objective);
  }
  return worst;
}

inline double weak_duality_margin(const MultiBidderInstance& inst, const MultiMechanism& mech,
                                  double objective, std::uint64_t seed, int draws = 20) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int d = 0; d < draws; ++d) {
    const auto w = random_weights(inst, rng);
    worst = std::min(worst, evaluate_lagrangian(inst, mech, w) - objective);
  }
  return worst;
}

// ---------------------------------------------------------------------------------------------

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 1;
  io::Json parameters = io::Json::object();
  std::string output;  ///< path prefix; empty writes nothing
};

struct Metric {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  ///< "<=", ">=" or "=="
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Metric> metrics;
  io::Json config;
  bool all_pass = true;

  double at(std::size_t row, const std::string& col) const {
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end()) throw Error(ErrorCode::InvalidConfig, "no column " + col);
    return rows[row][static_cast<std::size_t>(it - columns.begin())];
  }

  std::vector<double> column(const std::string& col) const {
    std::vector<double> out;
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(at(r, col));
    return out;
  }

  const Metric& metric(const std::string& n) const {
    for (const auto& m : metrics) {
      if (m.name == n) return m;
    }
    throw Error(ErrorCode::InvalidConfig, "no metric " + n);
  }

  std::string csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        out += (c ? "," : "") + (std::isfinite(r[c]) ? io::format_double(r[c]) : std::string("nan"));
      }
      out += '\n';
    }
    return out;
  }

  io::Json summary() const {
    io::Json ms = io::Json::array();
    for (const auto& m : metrics) {
      ms.push_back(io::Json{{"name", m.name}, {"value", m.value}, {"relation", m.relation},
                            {"limit", m.limit}, {"pass", m.pass}});
    }
    return io::Json{{"experiment", name}, {"version", kVersion}, {"seed", config.value("seed", 0)},
                    {"config", config}, {"rows", rows.size()}, {"all_pass", all_pass}, {"metrics", ms}};
  }
};

namespace detail {

class Params {
 public:
  explicit Params(const io::Json& j) : j_(j) {
    if (!j_.is_object()) throw Error(ErrorCode::InvalidConfig, "parameters must be an object");
  }

  double num(const char* key, double def) const {
    if (!j_.contains(key)) return def;
    if (!j_.at(key).is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number");
    return j_.at(key).get<double>();
  }

  double tol(const char* key, double def) const {
    const double v = num(key, def);
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be > 0");
    return v;
  }

  std::size_t count(const char* key, std::size_t def, std::size_t lo = 1) const {
    const double v = num(key, static_cast<double>(def));
    if (!(v >= static_cast<double>(lo)) || v != std::floor(v)) {
      throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be an integer >= " + std::to_string(lo));
    }
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const char* key, std::vector<double> def) const {
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty() || !std::all_of(v.begin(), v.end(), [](const io::Json& e) { return e.is_number(); })) {
      throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a nonempty list of numbers");
    }
    return v.get<std::vector<double>>();
  }

 private:
  const io::Json& j_;
};

inline void add_metric(ExperimentReport& r, std::string name, double value, const char* rel, double limit) {
  bool pass = false;
  const std::string rs(rel);
  if (rs == "<=") pass = value <= limit;
  if (rs == ">=") pass = value >= limit;
  if (rs == "==") pass = value == limit;
  r.metrics.push_back({std::move(name), value, limit, rs, pass});
  r.all_pass = r.all_pass && pass;
}

inline bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

inline double min_of(const std::vector<double>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

inline double max_of(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

inline std::size_t signals_for(std::uint64_t seed, std::size_t lo, std::size_t hi) {
  Rng rng(seed ^ 0xD1B54A32D192ED03ULL);
  return lo + rng.below(hi - lo + 1);
}

inline LpSolution solve_checked(const SignalPricingInstance& inst, const ConstraintMode& mode) {
  auto sol = solve_single_buyer(inst, mode);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::SolverFailure, std::string("LP ended ") + std::string(to_string(sol.status)));
  }
  return sol;
}

inline MultiLpSolution solve_checked(const MultiBidderInstance& inst, const ConstraintMode& mode,
                                     const LpOptions& opts = {}) {
  auto sol = solve_multi_bidder(inst, mode, opts);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::SolverFailure, std::string("LP ended ") + std::string(to_string(sol.status)));
  }
  return sol;
}

inline constexpr ConstraintMode kExPostNonNeg{IrMode::ExPost, PaymentMode::NonNegative, IcMode::Bayesian};
inline constexpr ConstraintMode kExPostFree{IrMode::ExPost, PaymentMode::Free, IcMode::Bayesian};

// --- gap-negative-payment ----------------------------------------------------------------------

inline void gap_negative_payment(const Params& P, ExperimentReport& r, std::uint64_t seed) {
  const auto Hs = P.list("H", {1e3, 1e6, 1e9, 1e12});
  const double eps = P.num("eps", 1e-4);
  const std::size_t points = P.count("points", 400, 2);
  const std::size_t lp_points = P.count("lp_points", 120, 2);
  const double bic_tol = P.tol("bic_tol", 1e-8);
  const double slack = P.tol("bound_slack", 0.05);
  const double wd_tol = P.tol("duality_tol", 1e-7);
  r.columns = {"H", "eps", "drev", "closed_form_revenue", "revenue_bound", "closed_form_bic_violation",
               "closed_form_ir_violation", "lp_drev", "lp_nonneg", "lp_free_payment", "ratio",
               "weak_duality_margin"};
  for (double H : Hs) {
    const auto inst = example1_instance(H, eps, points);
    const auto mech = example1_mechanism(inst);
    const auto audit = audit_mechanism(inst, mech);
    const auto small = example1_instance(H, eps, lp_points);
    const auto nn = solve_checked(small, kExPostNonNeg);
    const auto fr = solve_checked(small, kExPostFree);
    const double lp_drev = drev(small).total;
    const double wd = std::min(
        weak_duality_margin(small, nn.mechanism, nn.objective, IrMode::ExPost, seed),
        weak_duality_margin(small, fr.mechanism, fr.objective, IrMode::ExPost, seed + 1));
    r.rows.push_back({H, eps, drev(inst).total, audit.revenue, example1_revenue_bound(H, eps),
                      audit.max_bic_violation, audit.max_expost_ir_violation, lp_drev, nn.objective,
                      fr.objective, fr.objective / lp_drev, wd});
  }
  std::vector<double> margin, free_gain;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    margin.push_back(r.at(i, "closed_form_revenue") - r.at(i, "revenue_bound"));
    free_gain.push_back(r.at(i, "lp_free_payment") - r.at(i, "lp_nonneg"));
  }
  add_metric(r, "closed_form_bic_violation", max_of(r.column("closed_form_bic_violation")), "<=", bic_tol);
  add_metric(r, "closed_form_ir_violation", max_of(r.column("closed_form_ir_violation")), "==", 0.0);
  add_metric(r, "closed_form_minus_bound", min_of(margin), ">=", -slack);
  add_metric(r, "free_minus_nonneg", min_of(free_gain), ">=", -1e-9);
  add_metric(r, "ratio_increasing_in_H", strictly_increasing(r.column("ratio")) ? 1.0 : 0.0, "==", 1.0);
  add_metric(r, "weak_duality_margin", min_of(r.column("weak_duality_margin")), ">=", -wd_tol);
}

// --- gap-irregular -----------------------------------------------------------------------------

inline void gap_irregular(const Params& P, ExperimentReport& r) {
  const auto levels = P.list("m_levels", {4, 8, 12});
  const std::size_t enum_max = P.count("enumeration_max", 6, 0);
  const double tol = P.tol("agreement_tol", 1e-12);
  r.columns = {"m_levels", "expected_value", "private_revenue", "public_revenue", "ratio",
               "max_truthful_error", "max_deviation_ratio", "enumeration_diff"};
  for (double mv : levels) {
    const int m = static_cast<int>(mv);
    if (mv != m) throw Error(ErrorCode::InvalidConfig, "m_levels must be integers");
    const auto a = example2_symmetry_audit(m);
    double truth_err = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      truth_err = std::max(truth_err, std::abs(a.truthful[i] - 2.0 * a.values[i] / 3.0));
    }
    double diff = std::numeric_limits<double>::quiet_NaN();
    if (static_cast<std::size_t>(m) <= enum_max) {
      const auto e = example2_enumeration_audit(example2_instance(m));
      diff = std::abs(e.revenue - a.revenue);
      diff = std::max(diff, std::abs(e.public_revenue - a.public_revenue));
      diff = std::max(diff, std::abs(e.expected_value - a.expected_value));
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        diff = std::max({diff, std::abs(e.truthful[i] - a.truthful[i]),
                         std::abs(e.best_deviation[i] - a.best_deviation[i]),
                         std::abs(e.value_mass[i] - a.value_mass[i])});
      }
    }
    r.rows.push_back({mv, a.expected_value, a.revenue, a.public_revenue, a.revenue / a.public_revenue,
                      truth_err, a.max_deviation_ratio, diff});
  }
  double agree = 0.0;
  for (double d : r.column("enumeration_diff")) {
    if (std::isfinite(d)) agree = std::max(agree, d);
  }
  add_metric(r, "max_truthful_error", max_of(r.column("max_truthful_error")), "<=", 1e-12);
  add_metric(r, "max_deviation_ratio", max_of(r.column("max_deviation_ratio")), "<=", 0.5);
  add_metric(r, "ratio_increasing_in_m", strictly_increasing(r.column("ratio")) ? 1.0 : 0.0, "==", 1.0);
  add_metric(r, "enumeration_agreement", agree, "<=", tol);
}

// --- three-x-bound and mixture-bound -----------------------------------------------------------

inline void bound_family(const Params& P, ExperimentReport& r, std::uint64_t seed, bool mixture) {
  const std::size_t count = P.count("instances", mixture ? 20 : 50);
  const std::size_t n_values = P.count("n_values", 200, 2);
  const std::size_t s_lo = P.count("signals_min", 2);
  const std::size_t s_hi = P.count("signals_max", 8);
  const double delta = P.tol("delta", 0.05);
  const bool solve = P.num("solve_lp", mixture ? 0.0 : 1.0) != 0.0;
  const bool refine = P.num("refinement", mixture ? 0.0 : 1.0) != 0.0;
  const double wd_tol = P.tol("duality_tol", 1e-7);
  if (s_hi < s_lo) throw Error(ErrorCode::InvalidConfig, "signals_max < signals_min");
  const double k = mixture ? 2.0 : 1.0;
  r.columns = {"seed", "n_signals", "drev", "lp", "lag2", "factor", "max_h_ratio", "max_tg_ratio",
               "per_signal_ok", "weak_duality_margin", "factor_half", "factor_double"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t sd = seed + i;
    const std::size_t S = signals_for(sd, s_lo, s_hi);
    auto make = [&](std::size_t n) {
      return mixture ? random_mixture_instance(sd, n, S) : random_regular_instance(sd, n, S);
    };
    const auto inst = make(n_values);
    const auto b = lagrangian_bound(inst, delta);
    double hr = 0.0, tr = 0.0;
    bool ok = true;
    for (const auto& s : b.per_signal) {
      hr = std::max(hr, s.h_ratio);
      tr = std::max(tr, s.tg_ratio);
      ok = ok && s.h_term <= 2.0 * k * s.drev * (1.0 + delta) && s.tg_term <= k * s.drev * (1.0 + delta);
    }
    double lp = nan, wd = nan;
    if (solve) {
      const auto sol = solve_checked(inst, kExPostNonNeg);
      lp = sol.objective;
      wd = weak_duality_margin(inst, sol.mechanism, sol.objective, IrMode::ExPost, sd);
    }
    double fh = nan, fd = nan;
    if (refine) {
      fh = lagrangian_bound(make(std::max<std::size_t>(2, n_values / 2)), delta).factor;
      fd = lagrangian_bound(make(2 * n_values), delta).factor;
    }
    r.rows.push_back({static_cast<double>(sd), static_cast<double>(S), b.drev_total, lp, b.lag2_total,
                      b.factor, hr, tr, ok ? 1.0 : 0.0, wd, fh, fd});
  }
  add_metric(r, "max_factor", max_of(r.column("factor")), "<=", 3.0 * k * (1.0 + delta));
  add_metric(r, "per_signal_all_ok", min_of(r.column("per_signal_ok")), "==", 1.0);
  if (solve) {
    std::vector<double> gap;
    for (std::size_t i = 0; i < r.rows.size(); ++i) gap.push_back(r.at(i, "lp") - r.at(i, "lag2"));
    add_metric(r, "max_lp_minus_lag2", max_of(gap), "<=", 1e-6);
    add_metric(r, "weak_duality_margin", min_of(r.column("weak_duality_margin")), ">=", -wd_tol);
  }
  if (refine) {
    // Grid error of the factor, |factor(n) - factor(2n)| against |factor(n/2) - factor(n)|.
    double coarse = 0.0, fine = 0.0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      coarse = std::max(coarse, std::abs(r.at(i, "factor_half") - r.at(i, "factor")));
      fine = std::max(fine, std::abs(r.at(i, "factor") - r.at(i, "factor_double")));
    }
    add_metric(r, "refinement_error_fine", fine, "<=", coarse);
  }
}

// --- lookahead-five-x --------------------------------------------------------------------------

inline void lookahead_five_x(const Params& P, ExperimentReport& r, std::uint64_t seed) {
  const std::size_t count = P.count("instances", 20);
  const std::size_t n = P.count("grid", 12, 2);
  const double delta = P.tol("delta", 0.05);
  const double ic_tol = P.tol("ic_tol", 1e-9);
  const double wd_tol = P.tol("duality_tol", 1e-7);
  r.columns = {"seed", "dsla", "lp_dsic", "lp_bic", "second_price", "bound_total", "winner_term_max",
               "dsla_dsic_violation", "dsla_ir_violation", "half_ratio", "five_ratio",
               "weak_duality_margin"};
  const ConstraintMode dsic{IrMode::ExPost, PaymentMode::NonNegative, IcMode::DominantStrategy};
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t sd = seed + i;
    const auto inst = random_regular_two_bidder(sd, n, n);
    const auto la = lookahead_auction(inst);
    const auto au = audit_multi(inst, la.mechanism);
    const auto d = solve_checked(inst, dsic);
    const auto b = solve_checked(inst, kExPostNonNeg);
    const auto terms = lookahead_bound_terms(inst, b.mechanism);
    const double wd = std::min(weak_duality_margin(inst, d.mechanism, d.objective, sd),
                               weak_duality_margin(inst, b.mechanism, b.objective, sd + 1));
    r.rows.push_back({static_cast<double>(sd), la.revenue, d.objective, b.objective,
                      second_price_revenue(inst), terms.total, terms.winner_term_max,
                      au.max_dsic_violation, au.max_expost_ir_violation, la.revenue / d.objective,
                      b.objective / la.revenue, wd});
  }
  std::vector<double> half_margin;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    half_margin.push_back(r.at(i, "dsla") - 0.5 * r.at(i, "lp_dsic"));
  }
  add_metric(r, "dsla_dsic_violation", max_of(r.column("dsla_dsic_violation")), "<=", ic_tol);
  add_metric(r, "dsla_ir_violation", max_of(r.column("dsla_ir_violation")), "<=", ic_tol);
  add_metric(r, "dsla_minus_half_dsic_lp", min_of(half_margin), ">=", -1e-6);
  add_metric(r, "max_bic_lp_over_dsla", max_of(r.column("five_ratio")), "<=", 5.0 * (1.0 + delta));
  add_metric(r, "weak_duality_margin", min_of(r.column("weak_duality_margin")), ">=", -wd_tol);
}

// --- full-surplus-interim ----------------------------------------------------------------------

inline void full_surplus_interim(const Params& P, ExperimentReport& r, std::uint64_t seed) {
  const std::size_t count = P.count("instances", 1);
  const double tol = P.tol("surplus_tol", 1e-6);
  const double wd_tol = P.tol("duality_tol", 1e-7);
  r.columns = {"seed", "rank", "expected_value", "lp_interim_free", "lp_expost_free", "lp_expost_nonneg",
               "surplus_gap", "weak_duality_margin"};
  const ConstraintMode interim{IrMode::Interim, PaymentMode::Free, IcMode::Bayesian};
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t sd = seed + i;
    const auto inst = random_generic_3x3(sd);
    const double ev = value_distribution(inst).mean();
    const auto a = solve_checked(inst, interim);
    const auto b = solve_checked(inst, kExPostFree);
    const auto c = solve_checked(inst, kExPostNonNeg);
    const double wd =
        std::min({weak_duality_margin(inst, a.mechanism, a.objective, IrMode::Interim, sd),
                  weak_duality_margin(inst, b.mechanism, b.objective, IrMode::ExPost, sd + 1),
                  weak_duality_margin(inst, c.mechanism, c.objective, IrMode::ExPost, sd + 2)});
    r.rows.push_back({static_cast<double>(sd), static_cast<double>(conditional_rank(inst, 1e-6)), ev,
                      a.objective, b.objective, c.objective, std::abs(a.objective - ev), wd});
  }
  add_metric(r, "max_surplus_gap", max_of(r.column("surplus_gap")), "<=", tol);
  add_metric(r, "min_rank", min_of(r.column("rank")), "==", 3.0);
  add_metric(r, "weak_duality_margin", min_of(r.column("weak_duality_margin")), ">=", -wd_tol);
}

}  // namespace detail

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"gap-negative-payment", "gap-irregular",
                                              "three-x-bound",        "mixture-bound",
                                              "lookahead-five-x",     "full-surplus-interim"};
  return names;
}

inline ExperimentConfig config_from_json(const io::Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw Error(ErrorCode::InvalidConfig, "name must be a string");
    c.name = j["name"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorCode::InvalidConfig, "seed must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("parameters")) c.parameters = j["parameters"];
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw Error(ErrorCode::InvalidConfig, "output must be a string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

/// Runs one named experiment. With a nonempty `output`, writes <output>.csv and <output>.json.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.name) == names.end()) {
    throw Error(ErrorCode::UnknownExperiment, "unknown experiment '" + cfg.name + "'");
  }
  const detail::Params P(cfg.parameters);
  ExperimentReport r;
  r.name = cfg.name;
  r.config = io::Json{{"name", cfg.name}, {"seed", cfg.seed}, {"parameters", cfg.parameters}};
  if (cfg.name == "gap-negative-payment") detail::gap_negative_payment(P, r, cfg.seed);
  if (cfg.name == "gap-irregular") detail::gap_irregular(P, r);
  if (cfg.name == "three-x-bound") detail::bound_family(P, r, cfg.seed, false);
  if (cfg.name == "mixture-bound") detail::bound_family(P, r, cfg.seed, true);
  if (cfg.name == "lookahead-five-x") detail::lookahead_five_x(P, r, cfg.seed);
  if (cfg.name == "full-surplus-interim") detail::full_surplus_interim(P, r, cfg.seed);
  if (!cfg.output.empty()) {
    std::FILE* f = std::fopen((cfg.output + ".csv").c_str(), "w");
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + cfg.output + ".csv");
    const std::string text = r.csv();
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    io::write_file(cfg.output + ".json", r.summary());
  }
  return r;
}

}  // namespace sigrev
