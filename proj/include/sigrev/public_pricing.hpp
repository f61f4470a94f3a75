#pragma once

#include <string>
#include <vector>

#include "sigrev/core_model.hpp"

namespace sigrev {

struct PostedPrice {
  double price = 0.0;
  double revenue = 0.0;
  std::size_t index = 0;
};

/// Revenue-maximizing take-it-or-leave-it price over the support; ties go to the lowest price.
inline PostedPrice optimal_posted_price(const DiscreteDist& dist) {
  const std::size_t n = dist.pmf.size();
  std::vector<double> revenue(n, -1.0);
  double tail = 0.0;
  double best = -1.0;
  for (std::size_t i = n; i-- > 0;) {
    if (!(dist.pmf[i] > 0.0)) continue;
    tail += dist.pmf[i];
    revenue[i] = dist.grid[i] * tail;
    best = std::max(best, revenue[i]);
  }
  if (best < 0.0) throw Error(ErrorCode::InvalidParams, "distribution has no support");
  const double tie = 1e-12 * std::max(1.0, best);
  for (std::size_t i = 0; i < n; ++i) {
    if (revenue[i] >= 0.0 && revenue[i] >= best - tie) return {dist.grid[i], revenue[i], i};
  }
  return {};
}

struct SignalPrice {
  std::string signal;
  std::size_t signal_index = 0;
  double price = 0.0;
  double contribution = 0.0;  ///< f(s) times the optimal posted-price revenue given s
};

struct DRevReport {
  std::vector<SignalPrice> per_signal;
  double total = 0.0;
};

/// Optimal revenue when the seller's signal is public: price optimally for each conditional.
inline DRevReport drev(const SignalPricingInstance& inst) {
  DRevReport rep;
  for (std::size_t s = 0; s < inst.num_signals(); ++s) {
    auto col = inst.column(s);
    if (col.empty()) continue;
    double tail = 0.0;
    double best = -1.0;
    std::vector<double> rev(col.size());
    for (std::size_t k = col.size(); k-- > 0;) {
      tail += col[k].mass;
      rev[k] = inst.grid()[col[k].t] * tail;
      best = std::max(best, rev[k]);
    }
    const double tie = 1e-12 * std::max(1e-300, best);
    std::size_t pick = 0;
    while (rev[pick] < best - tie) ++pick;
    rep.per_signal.push_back({inst.signals()[s], s, inst.grid()[col[pick].t], rev[pick]});
    rep.total += rev[pick];
  }
  return rep;
}

/// Smallest support point whose virtual value is nonnegative; the optimal price of a regular
/// distribution.
inline std::optional<double> first_nonnegative_virtual_point(const DiscreteDist& dist) {
  const auto phi = virtual_values(dist);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (dist.pmf[i] > 0.0 && phi[i] >= -monotone_slack(dist.grid[i])) return dist.grid[i];
  }
  return std::nullopt;
}

}  // namespace sigrev
