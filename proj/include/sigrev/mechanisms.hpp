#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sigrev/core_model.hpp"
#include "sigrev/public_pricing.hpp"

namespace sigrev {

enum class IrMode { ExPost, Interim };
enum class PaymentMode { Free, NonNegative };
enum class IcMode { Bayesian, DominantStrategy };

struct ConstraintMode {
  IrMode ir = IrMode::ExPost;
  PaymentMode payments = PaymentMode::NonNegative;
  IcMode ic = IcMode::Bayesian;

  friend bool operator==(const ConstraintMode&, const ConstraintMode&) = default;
};

inline std::string_view to_string(IrMode m) { return m == IrMode::ExPost ? "expost" : "interim"; }
inline std::string_view to_string(PaymentMode m) {
  return m == PaymentMode::Free ? "free" : "nonneg";
}
inline std::string_view to_string(IcMode m) { return m == IcMode::Bayesian ? "bic" : "dsic"; }

/// Allocation and payment per mass-positive cell, aligned with `SignalPricingInstance::cells()`.
/// Cells absent from the instance carry x = p = 0.
struct Mechanism {
  std::vector<double> x;
  std::vector<double> p;

  static Mechanism zero(const SignalPricingInstance& inst) {
    return {std::vector<double>(inst.cells().size(), 0.0),
            std::vector<double>(inst.cells().size(), 0.0)};
  }

  /// From row-major (value, signal) matrices. Nonzero entries on zero-mass cells are rejected.
  static Mechanism from_dense(const SignalPricingInstance& inst, std::span<const double> x,
                              std::span<const double> p) {
    const std::size_t S = inst.num_signals();
    const std::size_t n = inst.num_values() * S;
    if (x.size() != n || p.size() != n) {
      throw Error(ErrorCode::ShapeMismatch, "mechanism matrices must be |T| x |S|");
    }
    Mechanism m = zero(inst);
    std::vector<char> used(n, 0);
    const auto cells = inst.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t k = cells[i].t * S + cells[i].s;
      m.x[i] = x[k];
      m.p[i] = p[k];
      used[k] = 1;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!used[k] && (x[k] != 0.0 || p[k] != 0.0)) {
        throw Error(ErrorCode::InvalidMechanism, "nonzero entry on a zero-mass cell");
      }
    }
    return m;
  }

  std::pair<std::vector<double>, std::vector<double>> to_dense(
      const SignalPricingInstance& inst) const {
    const std::size_t S = inst.num_signals();
    std::vector<double> dx(inst.num_values() * S, 0.0);
    std::vector<double> dp(dx.size(), 0.0);
    const auto cells = inst.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      dx[cells[i].t * S + cells[i].s] = x[i];
      dp[cells[i].t * S + cells[i].s] = p[i];
    }
    return {std::move(dx), std::move(dp)};
  }
};

inline void check_shape(const SignalPricingInstance& inst, const Mechanism& mech) {
  if (mech.x.size() != inst.cells().size() || mech.p.size() != inst.cells().size()) {
    throw Error(ErrorCode::ShapeMismatch, "mechanism is not aligned with the instance cells");
  }
}

/// Scale used for relative tolerances: values below 1 are compared absolutely.
inline double value_scale(double t) { return std::max(1.0, std::abs(t)); }

struct AuditReport {
  double revenue = 0.0;
  /// Largest gain from a misreport, per unit of the deviating type's mass.
  double max_bic_violation = 0.0;
  double max_bic_violation_rel = 0.0;
  /// Largest gain from a misreport after seeing the signal.
  double max_dsic_violation = 0.0;
  double max_dsic_violation_rel = 0.0;
  double max_expost_ir_violation = 0.0;
  double max_expost_ir_violation_rel = 0.0;
  /// Per unit of type mass.
  double max_interim_ir_violation = 0.0;
  double max_interim_ir_violation_rel = 0.0;
  double min_payment = 0.0;
  double max_allocation_violation = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_deviation;
};

/// Expected utility of type t reporting r, per unit of type-t mass.
inline long double interim_utility(const SignalPricingInstance& inst, const Mechanism& mech,
                                   std::size_t t, std::size_t r) {
  const double ft = inst.value_mass(t);
  if (!(ft > 0.0)) return 0.0L;
  const long double tv = inst.grid()[t];
  long double acc = 0.0L;
  for (std::size_t ci : inst.cells_of_value(t)) {
    const auto& c = inst.cells()[ci];
    const auto j = r == t ? std::optional<std::size_t>(ci) : inst.cell_index(r, c.s);
    if (!j) continue;
    acc += static_cast<long double>(c.mass) * (tv * mech.x[*j] - mech.p[*j]);
  }
  return acc / ft;
}

/// Independent checker: every field is computed from the instance and the mechanism alone.
inline AuditReport audit_mechanism(const SignalPricingInstance& inst, const Mechanism& mech) {
  check_shape(inst, mech);
  AuditReport rep;
  const auto cells = inst.cells();
  const auto& grid = inst.grid();
  long double revenue = 0.0L;
  rep.min_payment = cells.empty() ? 0.0 : mech.p[0];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double t = grid[cells[i].t];
    revenue += static_cast<long double>(cells[i].mass) * mech.p[i];
    rep.min_payment = std::min(rep.min_payment, mech.p[i]);
    const double xv = mech.x[i];
    rep.max_allocation_violation =
        std::max({rep.max_allocation_violation, -xv, xv - 1.0, std::isnan(xv) ? 1.0 : 0.0});
    const double ir = static_cast<double>(mech.p[i] - static_cast<long double>(t) * xv);
    rep.max_expost_ir_violation = std::max(rep.max_expost_ir_violation, ir);
    rep.max_expost_ir_violation_rel = std::max(rep.max_expost_ir_violation_rel, ir / value_scale(t));
  }
  rep.revenue = static_cast<double>(revenue);

  const std::size_t T = inst.num_values();
  for (std::size_t t = 0; t < T; ++t) {
    if (!(inst.value_mass(t) > 0.0)) continue;
    const double tv = grid[t];
    const long double truthful = interim_utility(inst, mech, t, t);
    const double iir = static_cast<double>(-truthful);
    rep.max_interim_ir_violation = std::max(rep.max_interim_ir_violation, iir);
    rep.max_interim_ir_violation_rel =
        std::max(rep.max_interim_ir_violation_rel, iir / value_scale(tv));
    for (std::size_t r = 0; r < T; ++r) {
      if (r == t) continue;
      const double gain = static_cast<double>(interim_utility(inst, mech, t, r) - truthful);
      if (gain > rep.max_bic_violation) {
        rep.max_bic_violation = gain;
        rep.worst_deviation = std::make_pair(t, r);
      }
      rep.max_bic_violation_rel =
          std::max(rep.max_bic_violation_rel, gain / value_scale(std::max(tv, grid[r])));
    }
  }

  for (std::size_t s = 0; s < inst.num_signals(); ++s) {
    const auto col = inst.column(s);
    if (col.empty()) continue;
    const std::size_t off = inst.column_offset(s);
    // A report outside the column gets x = p = 0.
    const bool has_outside = col.size() < T;
    for (std::size_t a = 0; a < col.size(); ++a) {
      const long double tv = grid[col[a].t];
      const long double own = tv * mech.x[off + a] - mech.p[off + a];
      long double best = has_outside ? 0.0L : own;
      for (std::size_t b = 0; b < col.size(); ++b) {
        best = std::max(best, tv * mech.x[off + b] - mech.p[off + b]);
      }
      const double gain = static_cast<double>(best - own);
      rep.max_dsic_violation = std::max(rep.max_dsic_violation, gain);
      rep.max_dsic_violation_rel =
          std::max(rep.max_dsic_violation_rel, gain / value_scale(grid.back()));
    }
  }
  return rep;
}

/// Whether an audit satisfies a constraint mode, with relative tolerance `tol`.
inline bool passes(const AuditReport& r, const ConstraintMode& mode, double tol) {
  if (r.max_allocation_violation > tol) return false;
  const double ic = mode.ic == IcMode::Bayesian ? r.max_bic_violation_rel
                                                : std::max(r.max_dsic_violation_rel,
                                                           r.max_bic_violation_rel);
  if (ic > tol) return false;
  if (mode.ir == IrMode::ExPost && r.max_expost_ir_violation_rel > tol) return false;
  if (mode.ir == IrMode::Interim && r.max_interim_ir_violation_rel > tol) return false;
  if (mode.payments == PaymentMode::NonNegative && r.min_payment < -tol) return false;
  return true;
}

// ---------------------------------------------------------------------------------------------
// Negative-payment gap mechanism on the equal revenue instance.

/// max over y in [1, min(z, H)] of ln(y) (z - y) / ln H. The objective is concave, so the
/// stationary point y (ln y + 1) = z is the maximizer; grid points in `y_grid` are also scored
/// so that on-grid deviations never beat the returned value.
inline double g_example(double z, double H, std::span<const double> y_grid = {}) {
  if (!(z >= 1.0) || !std::isfinite(z)) throw Error(ErrorCode::InvalidDomain, "need z >= 1");
  if (!(H > std::exp(1.0)) || !std::isfinite(H)) throw Error(ErrorCode::InvalidDomain, "need H > e");
  const double lnH = std::log(H);
  const double hi = std::min(z, H);
  auto objective = [&](double y) { return std::log(y) * (z - y) / lnH; };
  double best = 0.0;  // y = 1
  if (hi > 1.0) {
    // Safeguarded Newton on y ln y + y - z, increasing on [1, z].
    double lo_b = 1.0;
    double hi_b = hi;
    double y = z > std::exp(1.0) ? z / std::log(z) : 0.5 * (1.0 + hi);
    for (int it = 0; it < 200; ++it) {
      const double r = y * std::log(y) + y - z;
      if (r > 0.0) hi_b = y; else lo_b = y;
      double next = y - r / (std::log(y) + 2.0);
      if (!(next > lo_b && next < hi_b)) next = 0.5 * (lo_b + hi_b);
      if (std::abs(next - y) <= 1e-15 * y) {
        y = next;
        break;
      }
      y = next;
    }
    for (double cand : {y, std::nextafter(y, 0.0), std::nextafter(y, hi), hi}) {
      if (cand >= 1.0 && cand <= hi) best = std::max(best, objective(cand));
    }
  }
  for (double y : y_grid) {
    if (y >= 1.0 && y <= hi) best = std::max(best, objective(y));
  }
  return best;
}

/// x(v,*) = ln v / ln H with p(v,*) = v x(v,*); the revealing signal pays the buyer
/// (m(v,*)/m(v,v)) g_example(v) for agreeing with it.
inline Mechanism example1_mechanism(const SignalPricingInstance& inst) {
  if (!is_example1_shaped(inst)) {
    throw Error(ErrorCode::WrongInstanceShape, "instance is not of the revealing-signal form");
  }
  const auto& grid = inst.grid();
  const double H = grid.back();
  const double lnH = std::log(H);
  Mechanism m = Mechanism::zero(inst);
  const auto cells = inst.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const double v = grid[c.t];
    if (c.s == 0) {
      m.x[i] = std::min(1.0, std::log(v) / lnH);
      // round the price down so that v x - p is never negative in extended precision
      m.p[i] = v * m.x[i];
      if (static_cast<long double>(v) * m.x[i] < m.p[i]) m.p[i] = std::nextafter(m.p[i], 0.0);
    } else {
      const double star = inst.mass(c.t, 0);
      m.x[i] = 0.0;
      m.p[i] = -(star / c.mass) * g_example(v, H, grid.points());
    }
  }
  return m;
}

/// (1 - eps)(ln ln H - 2).
inline double example1_revenue_bound(double H, double eps) {
  if (!(H > std::exp(std::exp(1.0))) || !std::isfinite(H)) {
    throw Error(ErrorCode::InvalidH, "need H > e^e");
  }
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidEps, "need 0 <= eps < 1");
  return (1.0 - eps) * (std::log(std::log(H)) - 2.0);
}

// ---------------------------------------------------------------------------------------------
// Interleaved-support mechanism.

/// Sell at v / 3 whenever the report lies in the signal's support.
inline Mechanism example2_mechanism(const SignalPricingInstance& inst) {
  if (!interleaved_levels(inst)) {
    throw Error(ErrorCode::WrongInstanceShape, "instance is not of the interleaved form");
  }
  Mechanism m = Mechanism::zero(inst);
  const auto cells = inst.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    m.x[i] = 1.0;
    m.p[i] = inst.grid()[cells[i].t] / 3.0;
  }
  return m;
}

struct InterleavedAudit {
  int levels = 0;
  std::vector<double> values;          ///< grid order, value index 2(k-1) + b
  std::vector<double> value_mass;      ///< Pr[v]
  std::vector<double> truthful;        ///< per unit of type mass
  std::vector<double> best_deviation;  ///< per unit of type mass, over on-grid misreports
  std::vector<std::size_t> best_report;
  double expected_value = 0.0;
  double revenue = 0.0;                ///< private-signal revenue of the mechanism
  double public_revenue = 0.0;         ///< optimal revenue with the signal public
  double max_deviation_ratio = 0.0;    ///< max over v of best_deviation / v
};

/// Closed-form audit of the interleaved mechanism. Given v = 3j + b the signal bits are
/// independent: bit j equals b, bit j+1 follows the equal-revenue weights
/// 1/v - 1/(3(j+1) + c), and every other bit is a fair coin.
inline InterleavedAudit example2_symmetry_audit(int m) {
  if (m < 2 || m > kMaxInterleavedLevels) {
    throw Error(ErrorCode::TooManyLevels, "m_levels must lie in [2, 16]");
  }
  InterleavedAudit a;
  a.levels = m;
  const std::size_t T = 2 * static_cast<std::size_t>(m);
  a.values.resize(T);
  a.value_mass.resize(T);
  a.truthful.resize(T);
  a.best_deviation.resize(T);
  a.best_report.resize(T);
  const double z = InterleavedLayout::raw_total();
  // Pr[bit_{j+1} = c | v] for each v.
  auto next_bit_prob = [](int j, double v, int c) {
    const double w0 = 1.0 / v - 1.0 / InterleavedLayout::value_of(j + 1, 0);
    const double w1 = 1.0 / v - 1.0 / InterleavedLayout::value_of(j + 1, 1);
    return (c == 0 ? w0 : w1) / (w0 + w1);
  };
  for (int j = 1; j <= m; ++j) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t i = InterleavedLayout::value_index(j, b);
      const double v = InterleavedLayout::value_of(j, b);
      a.values[i] = v;
      const double raw = j < m ? 1.0 / v - 0.5 * (1.0 / InterleavedLayout::value_of(j + 1, 0) +
                                                  1.0 / InterleavedLayout::value_of(j + 1, 1))
                               : 1.0 / v;
      a.value_mass[i] = raw / (2.0 * z);
      a.truthful[i] = v - v / 3.0;
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_r = i;
      for (int k = 1; k <= m; ++k) {
        for (int c = 0; c < 2; ++c) {
          if (k == j && c == b) continue;
          const double w = InterleavedLayout::value_of(k, c);
          double win;
          if (k == j) {
            win = 0.0;
          } else if (k == j + 1) {
            win = next_bit_prob(j, v, c);
          } else {
            win = 0.5;
          }
          const double u = win * (v - w / 3.0);
          if (u > best) {
            best = u;
            best_r = InterleavedLayout::value_index(k, c);
          }
        }
      }
      a.best_deviation[i] = best;
      a.best_report[i] = best_r;
      a.max_deviation_ratio = std::max(a.max_deviation_ratio, best / v);
      a.expected_value += a.value_mass[i] * v;
    }
  }
  a.revenue = a.expected_value / 3.0;
  a.public_revenue = 1.0 / z;
  return a;
}

/// The same quantities by summing over every signal of the stored instance.
inline InterleavedAudit example2_enumeration_audit(const SignalPricingInstance& inst) {
  const auto levels = interleaved_levels(inst);
  if (!levels) throw Error(ErrorCode::WrongInstanceShape, "instance is not of the interleaved form");
  const Mechanism mech = example2_mechanism(inst);
  InterleavedAudit a;
  a.levels = *levels;
  const std::size_t T = inst.num_values();
  a.values = inst.grid().points();
  a.value_mass = inst.value_marginal();
  a.truthful.resize(T);
  a.best_deviation.resize(T);
  a.best_report.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    a.truthful[t] = static_cast<double>(interim_utility(inst, mech, t, t));
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < T; ++r) {
      if (r == t) continue;
      const double u = static_cast<double>(interim_utility(inst, mech, t, r));
      if (u > best) {
        best = u;
        a.best_report[t] = r;
      }
    }
    a.best_deviation[t] = best;
    a.max_deviation_ratio = std::max(a.max_deviation_ratio, best / a.values[t]);
    a.expected_value += a.value_mass[t] * a.values[t];
  }
  a.revenue = audit_mechanism(inst, mech).revenue;
  a.public_revenue = drev(inst).total;
  return a;
}

}  // namespace sigrev
