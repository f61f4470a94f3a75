#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sigrev/core_model.hpp"
#include "sigrev/mechanisms.hpp"
#include "sigrev/multi_bidder.hpp"
#include "sigrev/public_pricing.hpp"

namespace sigrev {

inline double pos(double v) { return v > 0.0 ? v : 0.0; }

/// Dense (value, signal) fields, row-major t * |S| + s, in density units.
struct DualFields {
  std::size_t num_values = 0;
  std::size_t num_signals = 0;
  std::vector<double> g;
  std::vector<double> h;

  double g_at(std::size_t t, std::size_t s) const { return g[t * num_signals + s]; }
  double h_at(std::size_t t, std::size_t s) const { return h[t * num_signals + s]; }
};

inline void require_quadrature(MassMode mode) {
  if (mode != MassMode::Quadrature) {
    throw Error(ErrorCode::WrongMode, "duality fields need a quadrature-mode instance");
  }
}

namespace detail {

/// g and h along one column of masses m[0..n) on a grid, with f = m / width.
///   g = -f + 2 sum_{t' > t} m(t') / t'
///   h = 2 f phi on the support (forward gap to the next support point),
///       2 (t f - tail) off the support, i.e. -2 tail.
inline void gh_column(const ValueGrid& grid, const std::vector<double>& m, std::vector<double>& g,
                      std::vector<double>& h) {
  const std::size_t n = grid.size();
  g.assign(n, 0.0);
  h.assign(n, 0.0);
  double inv_tail = 0.0;  // sum_{t' > t} m / t'
  double tail = 0.0;      // sum_{t' > t} m
  std::optional<std::size_t> next;
  for (std::size_t i = n; i-- > 0;) {
    const double t = grid[i];
    const double w = grid.width(i);
    const double f = m[i] / w;
    g[i] = -f + 2.0 * inv_tail;
    if (m[i] > 0.0) {
      const double gap = next ? grid[*next] - t : 0.0;
      h[i] = 2.0 * (t * m[i] - tail * gap) / w;
    } else {
      h[i] = -2.0 * tail;
    }
    if (m[i] > 0.0) {
      if (t > 0.0) inv_tail += m[i] / t;
      tail += m[i];
      next = i;
    }
  }
}

}  // namespace detail

inline DualFields gh_fields(const SignalPricingInstance& inst) {
  require_quadrature(inst.mode());
  const std::size_t T = inst.num_values();
  const std::size_t S = inst.num_signals();
  DualFields df{T, S, std::vector<double>(T * S, 0.0), std::vector<double>(T * S, 0.0)};
  std::vector<double> m(T), g, h;
  for (std::size_t s = 0; s < S; ++s) {
    std::fill(m.begin(), m.end(), 0.0);
    for (const auto& c : inst.column(s)) m[c.t] = c.mass;
    detail::gh_column(inst.grid(), m, g, h);
    for (std::size_t t = 0; t < T; ++t) {
      df.g[t * S + s] = g[t];
      df.h[t * S + s] = h[t];
    }
  }
  return df;
}

struct SignalBound {
  std::string signal;
  std::size_t signal_index = 0;
  double h_term = 0.0;   ///< sum of width * [h]_+
  double tg_term = 0.0;  ///< sum of width * [t g + h / 2]_+
  double drev = 0.0;     ///< public-signal revenue contribution of the signal
  double h_ratio = 0.0;  ///< h_term / drev, to be compared with 2
  double tg_ratio = 0.0; ///< tg_term / drev, to be compared with 1
  bool regular = true;
  bool holds = true;     ///< both per-signal inequalities within the slack
};

struct BoundReport {
  double lag2_total = 0.0;
  double drev_total = 0.0;
  double factor = 0.0;  ///< lag2_total / drev_total
  double delta = 0.0;
  std::vector<SignalBound> per_signal;
  bool all_hold = true;
};

/// Sum over all (t, s) of width(t) ([t g + h/2]_+ + [h]_+), with the per-signal split.
/// `delta` is the relative grid slack used for the per-signal checks.
inline BoundReport lagrangian_bound(const SignalPricingInstance& inst, double delta = 0.05) {
  const DualFields df = gh_fields(inst);
  const auto dr = drev(inst);
  const auto reg = joint_regularity_audit(inst);
  BoundReport rep;
  rep.delta = delta;
  rep.drev_total = dr.total;
  std::vector<double> drev_by_signal(inst.num_signals(), 0.0);
  for (const auto& sp : dr.per_signal) drev_by_signal[sp.signal_index] = sp.contribution;
  const std::size_t S = inst.num_signals();
  long double total = 0.0L;
  for (std::size_t s = 0; s < S; ++s) {
    SignalBound sb;
    sb.signal = inst.signals()[s];
    sb.signal_index = s;
    for (std::size_t t = 0; t < inst.num_values(); ++t) {
      const double w = inst.grid().width(t);
      const double tv = inst.grid()[t];
      sb.h_term += w * pos(df.h_at(t, s));
      sb.tg_term += w * pos(tv * df.g_at(t, s) + 0.5 * df.h_at(t, s));
    }
    sb.drev = drev_by_signal[s];
    sb.h_ratio = sb.drev > 0.0 ? sb.h_term / sb.drev : 0.0;
    sb.tg_ratio = sb.drev > 0.0 ? sb.tg_term / sb.drev : 0.0;
    sb.regular = reg[s].regular();
    sb.holds = sb.h_term <= 2.0 * sb.drev * (1.0 + delta) + 1e-12 &&
               sb.tg_term <= sb.drev * (1.0 + delta) + 1e-12;
    rep.all_hold = rep.all_hold && sb.holds;
    total += static_cast<long double>(sb.h_term) + sb.tg_term;
    rep.per_signal.push_back(std::move(sb));
  }
  rep.lag2_total = static_cast<double>(total);
  rep.factor = rep.drev_total > 0.0 ? rep.lag2_total / rep.drev_total : 0.0;
  return rep;
}

/// Same numbers, named after their use: the per-signal inequalities with grid slack delta.
inline BoundReport per_signal_bounds(const SignalPricingInstance& inst, double delta = 0.05) {
  return lagrangian_bound(inst, delta);
}

struct PsiReport {
  std::vector<double> psi;               ///< per grid point
  std::vector<std::size_t> positive;     ///< indices with psi > 0
  bool contiguous = true;                ///< positive set is one run of grid indices
};

/// psi_s(t) = 2 sum_{t'>t} m(t', s) / t' - sum_{t'>t} m(t', s) / t, in mass units.
inline PsiReport psi_diagnostic(const SignalPricingInstance& inst, std::size_t s) {
  require_quadrature(inst.mode());
  if (s >= inst.num_signals()) throw Error(ErrorCode::DimensionMismatch, "signal out of range");
  const std::size_t T = inst.num_values();
  std::vector<double> m(T, 0.0);
  for (const auto& c : inst.column(s)) m[c.t] = c.mass;
  PsiReport rep;
  rep.psi.assign(T, 0.0);
  double inv_tail = 0.0, tail = 0.0;
  double scale = 0.0;
  for (std::size_t i = T; i-- > 0;) {
    const double t = inst.grid()[i];
    rep.psi[i] = t > 0.0 ? 2.0 * inv_tail - tail / t : 0.0;
    scale = std::max(scale, std::abs(rep.psi[i]));
    if (t > 0.0) inv_tail += m[i] / t;
    tail += m[i];
  }
  const double tol = 1e-12 * scale;
  for (std::size_t i = 0; i < T; ++i) {
    if (rep.psi[i] > tol) rep.positive.push_back(i);
  }
  for (std::size_t k = 1; k < rep.positive.size(); ++k) {
    if (rep.positive[k] != rep.positive[k - 1] + 1) rep.contiguous = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Lagrangian of the private-signal revenue program.

/// lambda(t, t') per pair of grid values (row-major t * |T| + t'), mu per instance cell and,
/// for interim IR, one weight per value.
struct DualWeights {
  std::size_t num_values = 0;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> mu_interim;
};

/// lambda*(t_i, t_j) = 2 l_j / t_i for j < i, with l_1 = t_2 covering [0, t_2) and
/// l_j = t_{j+1} - t_j; mu* f = [g]_+ in mass form, so the payment coefficient of every
/// mass-positive cell is nonpositive.
inline DualWeights canonical_weights(const SignalPricingInstance& inst) {
  const auto& grid = inst.grid();
  const std::size_t T = grid.size();
  DualWeights w;
  w.num_values = T;
  w.lambda.assign(T * T, 0.0);
  std::vector<double> ell(T, 0.0);
  for (std::size_t j = 0; j + 1 < T; ++j) ell[j] = j == 0 ? grid[1] : grid[j + 1] - grid[j];
  std::vector<double> out_sum(T, 0.0);
  for (std::size_t i = 0; i < T; ++i) {
    if (!(grid[i] > 0.0)) continue;
    for (std::size_t j = 0; j < i; ++j) {
      w.lambda[i * T + j] = 2.0 * ell[j] / grid[i];
      out_sum[i] += w.lambda[i * T + j];
    }
  }
  const auto cells = inst.cells();
  w.mu.assign(cells.size(), 0.0);
  for (std::size_t s = 0; s < inst.num_signals(); ++s) {
    const auto col = inst.column(s);
    const std::size_t off = inst.column_offset(s);
    // inflow(t) = sum_{t' > t} lambda(t', t) m(t', s) = 2 l_t sum_{t' > t} m(t', s) / t'
    double inv_tail = 0.0;
    for (std::size_t k = col.size(); k-- > 0;) {
      const std::size_t t = col[k].t;
      const double m = col[k].mass;
      const double p0 = m * (1.0 - out_sum[t]) + 2.0 * ell[t] * inv_tail;
      w.mu[off + k] = pos(p0) / m;
      if (grid[t] > 0.0) inv_tail += m / grid[t];
    }
  }
  w.mu_interim.assign(T, 0.0);
  return w;
}

inline void check_weights(const DualWeights& w) {
  for (const auto* v : {&w.lambda, &w.mu, &w.mu_interim}) {
    for (double x : *v) {
      if (!(x >= 0.0)) throw Error(ErrorCode::NegativeWeights, "dual weights must be >= 0");
    }
  }
}

/// revenue + sum lambda(t,t') [IC slack of t against t', mass form]
///         + sum mu(t,s) m(t,s) (t x - p)            (ex-post IR)
///         or sum mu_interim(t) sum_s m(t,s) (t x - p) (interim IR).
inline double evaluate_lagrangian(const SignalPricingInstance& inst, const Mechanism& mech,
                                  const DualWeights& w, IrMode ir = IrMode::ExPost) {
  check_shape(inst, mech);
  check_weights(w);
  const std::size_t T = inst.num_values();
  if (w.num_values != T || w.lambda.size() != T * T ||
      (ir == IrMode::ExPost && w.mu.size() != inst.cells().size()) ||
      (ir == IrMode::Interim && w.mu_interim.size() != T)) {
    throw Error(ErrorCode::ShapeMismatch, "dual weights do not match the instance");
  }
  const auto cells = inst.cells();
  const auto& grid = inst.grid();
  long double acc = 0.0L;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const long double u = static_cast<long double>(grid[cells[i].t]) * mech.x[i] - mech.p[i];
    acc += static_cast<long double>(cells[i].mass) * mech.p[i];
    if (ir == IrMode::ExPost) {
      acc += static_cast<long double>(w.mu[i]) * cells[i].mass * u;
    } else {
      acc += static_cast<long double>(w.mu_interim[cells[i].t]) * cells[i].mass * u;
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    const double ft = inst.value_mass(t);
    if (!(ft > 0.0)) continue;
    const long double truthful = interim_utility(inst, mech, t, t) * ft;
    for (std::size_t r = 0; r < T; ++r) {
      const double l = w.lambda[t * T + r];
      if (l == 0.0 || r == t) continue;
      acc += static_cast<long double>(l) * (truthful - interim_utility(inst, mech, t, r) * ft);
    }
  }
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------------------------
// Multi-bidder fields.

/// Fields of one bidder over the mass-positive and zero-mass profiles alike, indexed by the flat
/// profile index. Density is mass over the product of all bidders' widths.
struct BidderFields {
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> f;
  std::vector<double> measure;  ///< product of the widths of the profile's cell
};

inline std::vector<BidderFields> multibidder_gh(const MultiBidderInstance& inst) {
  require_quadrature(inst.mode());
  const std::size_t n = inst.num_bidders();
  const auto& pmf = inst.dense_pmf();
  const std::size_t P = pmf.size();
  std::vector<BidderFields> out(n);
  std::vector<double> measure(P, 1.0);
  for (std::size_t f = 0; f < P; ++f) {
    const Profile t = inst.unflatten(f);
    for (std::size_t j = 0; j < n; ++j) measure[f] *= inst.grid(j).width(t[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& bf = out[i];
    bf.g.assign(P, 0.0);
    bf.h.assign(P, 0.0);
    bf.f.assign(P, 0.0);
    bf.measure = measure;
    const auto& gi = inst.grid(i);
    const std::size_t Ti = gi.size();
    // Walk each line of profiles along bidder i's coordinate.
    for (std::size_t f0 = 0; f0 < P; ++f0) {
      Profile t = inst.unflatten(f0);
      if (t[i] != 0) continue;
      std::vector<double> m(Ti), g, h;
      std::vector<std::size_t> flat(Ti);
      double other_width = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) other_width *= inst.grid(j).width(t[j]);
      }
      for (std::size_t k = 0; k < Ti; ++k) {
        t[i] = k;
        flat[k] = inst.flatten(t);
        m[k] = pmf[flat[k]] / other_width;  // density in t_{-i}, mass in t_i
      }
      detail::gh_column(gi, m, g, h);
      for (std::size_t k = 0; k < Ti; ++k) {
        bf.g[flat[k]] = g[k];
        bf.h[flat[k]] = h[k];
        bf.f[flat[k]] = m[k] / gi.width(k);
      }
    }
  }
  return out;
}

/// max over bidders and profiles of [g_i t_i]_+ + h_i - 2 t_i f.
inline double claim_dual_bound_check(const MultiBidderInstance& inst) {
  const auto fields = multibidder_gh(inst);
  double worst = -std::numeric_limits<double>::infinity();
  const std::size_t P = inst.dense_pmf().size();
  for (std::size_t i = 0; i < inst.num_bidders(); ++i) {
    for (std::size_t f = 0; f < P; ++f) {
      const double ti = inst.grid(i)[inst.unflatten(f)[i]];
      const auto& bf = fields[i];
      const double v = pos(bf.g[f] * ti) + bf.h[f] - 2.0 * ti * bf.f[f];
      // relative to the size of the terms
      const double scale = std::max({1.0, std::abs(bf.h[f]), std::abs(bf.g[f] * ti),
                                     2.0 * ti * bf.f[f]});
      worst = std::max(worst, v / scale);
    }
  }
  return worst;
}

struct LookaheadBoundTerms {
  double second_price_term = 0.0;  ///< 2 E[second-highest value]
  double winner_term = 0.0;        ///< with the given allocation on each winner region
  double winner_term_max = 0.0;    ///< allocation 1 wherever the integrand is positive
  double total = 0.0;              ///< second_price_term + winner_term_max
  std::vector<double> winner_term_by_bidder;
  std::vector<double> winner_term_max_by_bidder;
};

/// Two-term split of the multi-bidder Lagrangian bound over the highest-bidder regions.
inline LookaheadBoundTerms lookahead_bound_terms(const MultiBidderInstance& inst,
                                                 const MultiMechanism& mech) {
  const auto fields = multibidder_gh(inst);
  const std::size_t n = inst.num_bidders();
  LookaheadBoundTerms out;
  out.second_price_term = 2.0 * second_price_revenue(inst);
  out.winner_term_by_bidder.assign(n, 0.0);
  out.winner_term_max_by_bidder.assign(n, 0.0);
  const std::size_t P = inst.dense_pmf().size();
  for (std::size_t f = 0; f < P; ++f) {
    const Profile t = inst.unflatten(f);
    const std::size_t i = highest_bidder(inst, t);
    const auto& bf = fields[i];
    const double ti = inst.grid(i)[t[i]];
    const double integrand = (pos(bf.g[f] * ti) + bf.h[f]) * bf.measure[f];
    out.winner_term_max_by_bidder[i] += pos(integrand);
    const std::size_t e = inst.entry_index(t);
    if (e != MultiBidderInstance::kNone && mech.n == n) {
      out.winner_term_by_bidder[i] += mech.alloc(e, i) * integrand;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.winner_term += out.winner_term_by_bidder[i];
    out.winner_term_max += out.winner_term_max_by_bidder[i];
  }
  out.total = out.second_price_term + out.winner_term_max;
  return out;
}

/// Per-bidder weights: lambda_i over pairs of bidder i's grid, mu over (entry, bidder).
struct MultiDualWeights {
  std::vector<std::vector<double>> lambda;
  std::vector<double> mu;
};

inline double evaluate_lagrangian(const MultiBidderInstance& inst, const MultiMechanism& mech,
                                  const MultiDualWeights& w) {
  const std::size_t n = inst.num_bidders();
  const auto entries = inst.entries();
  if (mech.n != n || mech.x.size() != entries.size() * n || w.lambda.size() != n ||
      w.mu.size() != entries.size() * n) {
    throw Error(ErrorCode::ShapeMismatch, "weights or mechanism do not match the instance");
  }
  for (const auto& l : w.lambda) {
    for (double v : l) {
      if (!(v >= 0.0)) throw Error(ErrorCode::NegativeWeights, "dual weights must be >= 0");
    }
  }
  for (double v : w.mu) {
    if (!(v >= 0.0)) throw Error(ErrorCode::NegativeWeights, "dual weights must be >= 0");
  }
  long double acc = 0.0L;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      const long double ti = inst.value(i, entries[e].t);
      acc += static_cast<long double>(entries[e].mass) * mech.pay(e, i);
      acc += static_cast<long double>(w.mu[e * n + i]) * entries[e].mass *
             (ti * mech.alloc(e, i) - mech.pay(e, i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t Ti = inst.grid(i).size();
    if (w.lambda[i].size() != Ti * Ti) throw Error(ErrorCode::ShapeMismatch, "lambda size");
    for (std::size_t e = 0; e < entries.size(); ++e) {
      Profile t = entries[e].t;
      const std::size_t ti = t[i];
      const long double tv = inst.value(i, t);
      const long double m = entries[e].mass;
      const long double own = tv * mech.alloc(e, i) - mech.pay(e, i);
      for (std::size_t r = 0; r < Ti; ++r) {
        const double l = w.lambda[i][ti * Ti + r];
        if (l == 0.0 || r == ti) continue;
        t[i] = r;
        const std::size_t d = inst.entry_index(t);
        const long double dev = d == MultiBidderInstance::kNone ? 0.0L
                                                                : tv * mech.alloc(d, i) - mech.pay(d, i);
        acc += static_cast<long double>(l) * m * (own - dev);
        t[i] = ti;
      }
    }
  }
  return static_cast<double>(acc);
}

}  // namespace sigrev
