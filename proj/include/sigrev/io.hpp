#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigrev/auctions.hpp"
#include "sigrev/core_model.hpp"
#include "sigrev/duality.hpp"
#include "sigrev/lp_engine.hpp"
#include "sigrev/mechanisms.hpp"
#include "sigrev/multi_bidder.hpp"
#include "sigrev/public_pricing.hpp"

namespace sigrev::io {

using Json = nlohmann::ordered_json;

/// %.17g round-trips every double; non-finite values become null.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace detail {

inline void write(std::ostream& os, const Json& j, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: os << format_double(j.get<double>()); break;
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        os << Json(it.key()).dump() << (indent >= 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      pad(depth);
      os << '}';
      break;
    }
    case Json::value_t::array: {
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_primitive(); });
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << (flat && indent >= 0 ? ", " : ",");
        first = false;
        if (!flat) pad(depth + 1);
        write(os, v, indent, depth + 1);
      }
      if (!flat && !j.empty()) pad(depth);
      os << ']';
      break;
    }
    default: os << j.dump(); break;
  }
}

}  // namespace detail

inline std::string dump(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  return os.str();
}

inline Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline void write_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << dump(j) << '\n';
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

inline MassMode parse_mass_mode(const std::string& s) {
  if (s == "mass") return MassMode::Mass;
  if (s == "quadrature") return MassMode::Quadrature;
  throw Error(ErrorCode::ParseError, "mode must be mass or quadrature");
}

// --- single-buyer instances --------------------------------------------------------------------

inline Json to_json(const SignalPricingInstance& inst) {
  Json j;
  j["mode"] = std::string(to_string(inst.mode()));
  j["values"] = inst.grid().points();
  j["widths"] = inst.grid().widths();
  j["signals"] = inst.signals();
  j["pmf"] = inst.dense_pmf();
  if (inst.mixture_k() > 1) j["k"] = inst.mixture_k();
  return j;
}

inline SignalPricingInstance instance_from_json(const Json& j) {
  const auto mode = j.contains("mode") ? parse_mass_mode(field<std::string>(j, "mode")) : MassMode::Mass;
  auto values = field<std::vector<double>>(j, "values");
  ValueGrid grid = j.contains("widths") ? ValueGrid(values, field<std::vector<double>>(j, "widths"))
                                        : ValueGrid(values);
  auto signals = field<std::vector<std::string>>(j, "signals");
  const auto pmf = field<std::vector<double>>(j, "pmf");
  auto inst = SignalPricingInstance::build(std::move(grid), std::move(signals), pmf, mode);
  if (j.contains("k")) inst = inst.with_mixture_k(field<int>(j, "k"));
  return inst;
}

// --- mechanisms ----------------------------------------------------------------------------------

inline Json to_json(const SignalPricingInstance& inst, const Mechanism& mech) {
  const auto [x, p] = mech.to_dense(inst);
  return Json{{"x", x}, {"p", p}};
}

inline Mechanism mechanism_from_json(const SignalPricingInstance& inst, const Json& j) {
  const auto x = field<std::vector<double>>(j, "x");
  const auto p = field<std::vector<double>>(j, "p");
  return Mechanism::from_dense(inst, x, p);
}

// --- profile instances ---------------------------------------------------------------------------

inline Json to_json(const MultiBidderInstance& inst) {
  Json j;
  j["mode"] = std::string(to_string(inst.mode()));
  j["n"] = inst.num_bidders();
  Json grids = Json::array();
  for (const auto& g : inst.grids()) grids.push_back(Json{{"values", g.points()}, {"widths", g.widths()}});
  j["grids"] = grids;
  j["pmf"] = inst.dense_pmf();
  return j;
}

inline MultiBidderInstance profile_from_json(const Json& j) {
  const auto mode = j.contains("mode") ? parse_mass_mode(field<std::string>(j, "mode")) : MassMode::Mass;
  const auto n = field<std::size_t>(j, "n");
  const auto& gj = j.at("grids");
  if (!gj.is_array() || gj.size() != n) throw Error(ErrorCode::ParseError, "grids must list n grids");
  std::vector<ValueGrid> grids;
  for (const auto& g : gj) {
    if (g.is_array()) {
      grids.emplace_back(g.get<std::vector<double>>());
    } else {
      auto values = field<std::vector<double>>(g, "values");
      grids.push_back(g.contains("widths") ? ValueGrid(values, field<std::vector<double>>(g, "widths"))
                                           : ValueGrid(values));
    }
  }
  return MultiBidderInstance::build(std::move(grids), field<std::vector<double>>(j, "pmf"), mode);
}

/// Dense over profiles: x[flat * n + i], zero on zero-mass profiles.
inline Json to_json(const MultiBidderInstance& inst, const MultiMechanism& mech) {
  const std::size_t n = inst.num_bidders();
  std::vector<double> x(inst.dense_pmf().size() * n, 0.0), p(x.size(), 0.0);
  const auto entries = inst.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      x[entries[e].flat * n + i] = mech.alloc(e, i);
      p[entries[e].flat * n + i] = mech.pay(e, i);
    }
  }
  return Json{{"n", n}, {"x", x}, {"p", p}};
}

inline MultiMechanism multi_mechanism_from_json(const MultiBidderInstance& inst, const Json& j) {
  const std::size_t n = inst.num_bidders();
  const auto x = field<std::vector<double>>(j, "x");
  const auto p = field<std::vector<double>>(j, "p");
  if (x.size() != inst.dense_pmf().size() * n || p.size() != x.size()) {
    throw Error(ErrorCode::ShapeMismatch, "mechanism arrays must cover every profile and bidder");
  }
  auto mech = MultiMechanism::zero(inst);
  const auto entries = inst.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      mech.x[e * n + i] = x[entries[e].flat * n + i];
      mech.p[e * n + i] = p[entries[e].flat * n + i];
    }
  }
  return mech;
}

// --- reports -------------------------------------------------------------------------------------

inline Json to_json(const DRevReport& r) {
  Json rows = Json::array();
  for (const auto& s : r.per_signal) {
    rows.push_back(Json{{"signal", s.signal}, {"price", s.price}, {"contribution", s.contribution}});
  }
  return Json{{"total", r.total}, {"per_signal", rows}};
}

inline Json to_json(const AuditReport& r) {
  return Json{{"revenue", r.revenue},
              {"min_payment", r.min_payment},
              {"max_bic_violation", r.max_bic_violation},
              {"max_bic_violation_rel", r.max_bic_violation_rel},
              {"max_dsic_violation", r.max_dsic_violation},
              {"max_dsic_violation_rel", r.max_dsic_violation_rel},
              {"max_expost_ir_violation", r.max_expost_ir_violation},
              {"max_interim_ir_violation", r.max_interim_ir_violation},
              {"max_allocation_violation", r.max_allocation_violation},
              {"worst_deviation", r.worst_deviation ? Json{r.worst_deviation->first, r.worst_deviation->second}
                                                    : Json(nullptr)}};
}

inline Json to_json(const MultiAuditReport& r) {
  return Json{{"revenue", r.revenue},
              {"revenue_by_bidder", r.revenue_by_bidder},
              {"min_payment", r.min_payment},
              {"max_bic_violation", r.max_bic_violation},
              {"max_bic_violation_rel", r.max_bic_violation_rel},
              {"max_dsic_violation", r.max_dsic_violation},
              {"max_dsic_violation_rel", r.max_dsic_violation_rel},
              {"max_expost_ir_violation", r.max_expost_ir_violation},
              {"max_feasibility_violation", r.max_feasibility_violation}};
}

inline Json to_json(const ConstraintMode& m) {
  return Json{{"ir", std::string(to_string(m.ir))},
              {"payments", std::string(to_string(m.payments))},
              {"ic", std::string(to_string(m.ic))}};
}

inline Json to_json(const LpStats& s) {
  return Json{{"rounds", s.rounds},     {"rows", s.rows},         {"columns", s.columns},
              {"pivots", s.pivots},     {"rebuilds", s.rebuilds}, {"max_row_violation", s.max_row_violation}};
}

inline std::string_view to_string(RowKind k) {
  switch (k) {
    case RowKind::Bic: return "bic";
    case RowKind::Dsic: return "dsic";
    case RowKind::InterimIr: return "interim_ir";
    case RowKind::NonNegative: return "nonneg";
    case RowKind::Feasibility: return "feasibility";
  }
  return "?";
}

inline Json certificate_json(const std::vector<RowDual>& cert) {
  Json out = Json::array();
  for (const auto& d : cert) {
    out.push_back(Json{{"kind", std::string(to_string(d.kind))}, {"agent", d.agent}, {"a", d.a},
                       {"b", d.b}, {"value", d.value}});
  }
  return out;
}

inline Json to_json(const SignalPricingInstance& inst, const LpSolution& sol, const ConstraintMode& mode) {
  return Json{{"status", std::string(to_string(sol.status))},
              {"objective", sol.objective},
              {"mode", to_json(mode)},
              {"stats", to_json(sol.stats)},
              {"mechanism", to_json(inst, sol.mechanism)},
              {"certificate", certificate_json(sol.certificate)}};
}

inline Json to_json(const MultiBidderInstance& inst, const MultiLpSolution& sol, const ConstraintMode& mode) {
  return Json{{"status", std::string(to_string(sol.status))},
              {"objective", sol.objective},
              {"mode", to_json(mode)},
              {"stats", to_json(sol.stats)},
              {"mechanism", to_json(inst, sol.mechanism)},
              {"certificate", certificate_json(sol.certificate)}};
}

inline Json to_json(const BoundReport& r) {
  Json rows = Json::array();
  for (const auto& s : r.per_signal) {
    rows.push_back(Json{{"signal", s.signal},
                        {"h_term", s.h_term},
                        {"tg_term", s.tg_term},
                        {"drev", s.drev},
                        {"h_ratio", s.h_ratio},
                        {"tg_ratio", s.tg_ratio},
                        {"regular", s.regular},
                        {"holds", s.holds}});
  }
  return Json{{"lag2_total", r.lag2_total}, {"drev_total", r.drev_total}, {"factor", r.factor},
              {"delta", r.delta},           {"all_hold", r.all_hold},     {"per_signal", rows}};
}

inline Json to_json(const LookaheadResult& r, const MultiBidderInstance& inst) {
  Json prices = Json::array();
  for (const auto& pi : r.prices) prices.push_back(pi);
  return Json{{"revenue", r.revenue},
              {"revenue_by_bidder", r.revenue_by_bidder},
              {"prices", prices},
              {"second_price_revenue", second_price_revenue(inst)},
              {"mechanism", to_json(inst, r.mechanism)}};
}

}  // namespace sigrev::io
