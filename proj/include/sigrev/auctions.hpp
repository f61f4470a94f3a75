#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sigrev/core_model.hpp"
#include "sigrev/multi_bidder.hpp"
#include "sigrev/public_pricing.hpp"

namespace sigrev {

struct LookaheadResult {
  MultiMechanism mechanism;
  double revenue = 0.0;
  std::vector<double> revenue_by_bidder;
  /// prices[i][c]: posted price for bidder i in context c = t_{-i}; NaN when the winner region
  /// of that context carries no mass.
  std::vector<std::vector<double>> prices;
  std::vector<std::size_t> winner;  ///< per entry, the highest bidder
};

/// Whether bidder i is the highest bidder at t under the lowest-index tie rule.
inline bool wins_at(const MultiBidderInstance& inst, std::size_t i, const Profile& t) {
  const double v = inst.value(i, t);
  for (std::size_t j = 0; j < inst.num_bidders(); ++j) {
    if (j < i && inst.value(j, t) >= v) return false;
    if (j > i && inst.value(j, t) > v) return false;
  }
  return true;
}

/// Deterministic single-bidder lookahead: the highest bidder is offered the optimal posted price
/// of its value conditioned on the others' values and on staying the highest bidder.
inline LookaheadResult lookahead_auction(const MultiBidderInstance& inst) {
  const std::size_t n = inst.num_bidders();
  const auto entries = inst.entries();
  LookaheadResult out;
  out.mechanism = MultiMechanism::zero(inst);
  out.revenue_by_bidder.assign(n, 0.0);
  out.prices.resize(n);
  out.winner.resize(entries.size());
  const auto& pmf = inst.dense_pmf();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gi = inst.grid(i);
    out.prices[i].assign(inst.num_contexts(i), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t f0 = 0; f0 < pmf.size(); ++f0) {
      Profile t = inst.unflatten(f0);
      if (t[i] != 0) continue;
      const std::size_t ctx = inst.context_of(i, t);
      std::vector<double> m(gi.size(), 0.0);
      double total = 0.0;
      for (std::size_t k = 0; k < gi.size(); ++k) {
        t[i] = k;
        if (wins_at(inst, i, t)) {
          m[k] = pmf[inst.flatten(t)];
          total += m[k];
        }
      }
      if (!(total > 0.0)) continue;
      for (auto& v : m) v /= total;
      const auto pp = optimal_posted_price(DiscreteDist{gi, std::move(m)});
      out.prices[i][ctx] = pp.price;
    }
  }
  long double rev = 0.0L;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Profile& t = entries[e].t;
    const std::size_t w = highest_bidder(inst, t);
    out.winner[e] = w;
    const double price = out.prices[w][inst.context_of(w, t)];
    if (inst.value(w, t) >= price) {
      out.mechanism.x[e * n + w] = 1.0;
      out.mechanism.p[e * n + w] = price;
      rev += static_cast<long double>(entries[e].mass) * price;
      out.revenue_by_bidder[w] += entries[e].mass * price;
    }
  }
  out.revenue = static_cast<double>(rev);
  return out;
}

/// Two-bidder instance from a single-buyer one: bidder 1 keeps the value, bidder 2 reports the
/// signal and values signal j at (j + 1) eps / |S|.
inline MultiBidderInstance lift_two_bidders(const SignalPricingInstance& inst, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidEps, "eps must be > 0");
  const std::size_t T = inst.num_values();
  const std::size_t S = inst.num_signals();
  std::vector<double> pts(S);
  for (std::size_t j = 0; j < S; ++j) {
    pts[j] = static_cast<double>(j + 1) * eps / static_cast<double>(S);
  }
  std::vector<ValueGrid> grids{inst.grid(), ValueGrid(pts)};
  const std::size_t S2 = S;
  std::vector<double> pmf(T * S2, 0.0);
  for (const auto& c : inst.cells()) pmf[c.t * S2 + c.s] = c.mass;
  return MultiBidderInstance::build(std::move(grids), pmf, inst.mode());
}

}  // namespace sigrev
