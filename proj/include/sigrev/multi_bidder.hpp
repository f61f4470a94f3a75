#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sigrev/core_model.hpp"

namespace sigrev {

inline constexpr std::size_t kMaxBidders = 3;

using Profile = std::array<std::size_t, kMaxBidders>;

/// Joint distribution of the bidders' types. The dense pmf is bidder-1-major:
/// index = ((t_1 * n_2) + t_2) * n_3 + t_3.
class MultiBidderInstance {
 public:
  struct Entry {
    Profile t{};
    std::size_t flat = 0;
    double mass = 0.0;
  };

  MultiBidderInstance() = default;

  static MultiBidderInstance build(std::vector<ValueGrid> grids, std::span<const double> pmf,
                                   MassMode mode = MassMode::Mass) {
    if (grids.empty() || grids.size() > kMaxBidders) {
      throw Error(ErrorCode::TooManyBidders, "1 to 3 bidders supported");
    }
    std::size_t total = 1;
    for (const auto& g : grids) total *= g.size();
    if (pmf.size() != total) {
      throw Error(ErrorCode::DimensionMismatch, "pmf length differs from the profile count");
    }
    if (mode == MassMode::Quadrature) {
      for (const auto& g : grids) {
        if (!g.cells_disjoint()) throw Error(ErrorCode::InvalidGrid, "quadrature cells overlap");
      }
    }
    MultiBidderInstance inst;
    inst.grids_ = std::move(grids);
    inst.mode_ = mode;
    double sum = 0.0;
    for (double m : pmf) {
      if (!(m >= 0.0)) throw Error(ErrorCode::NegativeMass, "negative or NaN mass");
      sum += m;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::SumNotOne, "masses sum to " + std::to_string(sum));
    }
    const double scale = std::abs(sum - 1.0) > 1e-12 ? 1.0 / sum : 1.0;
    inst.pmf_.assign(pmf.begin(), pmf.end());
    for (auto& m : inst.pmf_) m *= scale;
    inst.index_of_.assign(total, kNone);
    for (std::size_t f = 0; f < total; ++f) {
      if (inst.pmf_[f] > 0.0) {
        inst.index_of_[f] = inst.entries_.size();
        inst.entries_.push_back({inst.unflatten(f), f, inst.pmf_[f]});
      }
    }
    return inst;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t num_bidders() const { return grids_.size(); }
  const ValueGrid& grid(std::size_t i) const { return grids_[i]; }
  const std::vector<ValueGrid>& grids() const { return grids_; }
  MassMode mode() const { return mode_; }
  const std::vector<double>& dense_pmf() const { return pmf_; }
  std::span<const Entry> entries() const { return entries_; }

  std::size_t flatten(const Profile& t) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < grids_.size(); ++i) f = f * grids_[i].size() + t[i];
    return f;
  }

  Profile unflatten(std::size_t f) const {
    Profile t{};
    for (std::size_t i = grids_.size(); i-- > 0;) {
      t[i] = f % grids_[i].size();
      f /= grids_[i].size();
    }
    return t;
  }

  /// Position in entries() of a profile, or kNone when its mass is zero.
  std::size_t entry_index(const Profile& t) const { return index_of_[flatten(t)]; }

  double mass(const Profile& t) const { return pmf_[flatten(t)]; }

  /// Index of t_{-i} among the profiles of the other bidders, in the same major order.
  std::size_t context_of(std::size_t i, const Profile& t) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < grids_.size(); ++j) {
      if (j != i) c = c * grids_[j].size() + t[j];
    }
    return c;
  }

  std::size_t num_contexts(std::size_t i) const {
    std::size_t c = 1;
    for (std::size_t j = 0; j < grids_.size(); ++j) {
      if (j != i) c *= grids_[j].size();
    }
    return c;
  }

  double value(std::size_t i, const Profile& t) const { return grids_[i][t[i]]; }

 private:
  std::vector<ValueGrid> grids_;
  MassMode mode_ = MassMode::Mass;
  std::vector<double> pmf_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> index_of_;
};

/// Allocation and payment of every bidder on every mass-positive profile:
/// x[e * n + i] for entry e of the instance.
struct MultiMechanism {
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> p;

  static MultiMechanism zero(const MultiBidderInstance& inst) {
    const std::size_t k = inst.entries().size() * inst.num_bidders();
    return {inst.num_bidders(), std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  }

  double alloc(std::size_t e, std::size_t i) const { return x[e * n + i]; }
  double pay(std::size_t e, std::size_t i) const { return p[e * n + i]; }
};

struct MultiAuditReport {
  double revenue = 0.0;
  std::vector<double> revenue_by_bidder;
  double max_bic_violation = 0.0;  ///< per unit of the deviating type's mass
  double max_bic_violation_rel = 0.0;
  double max_dsic_violation = 0.0;
  double max_dsic_violation_rel = 0.0;
  double max_expost_ir_violation = 0.0;
  double max_expost_ir_violation_rel = 0.0;
  double min_payment = 0.0;
  double max_feasibility_violation = 0.0;  ///< max of sum_i x_i - 1 and of -x_i
};

inline MultiAuditReport audit_multi(const MultiBidderInstance& inst, const MultiMechanism& mech) {
  const std::size_t n = inst.num_bidders();
  const auto entries = inst.entries();
  if (mech.n != n || mech.x.size() != entries.size() * n || mech.p.size() != mech.x.size()) {
    throw Error(ErrorCode::ShapeMismatch, "mechanism is not aligned with the profiles");
  }
  auto scale = [](double v) { return std::max(1.0, std::abs(v)); };
  MultiAuditReport rep;
  rep.revenue_by_bidder.assign(n, 0.0);
  rep.min_payment = entries.empty() ? 0.0 : mech.p[0];
  long double revenue = 0.0L;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    double xs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = mech.alloc(e, i);
      const double pi = mech.pay(e, i);
      const double t = inst.value(i, entries[e].t);
      xs += xi;
      rep.max_feasibility_violation = std::max(rep.max_feasibility_violation, -xi);
      revenue += static_cast<long double>(entries[e].mass) * pi;
      rep.revenue_by_bidder[i] += entries[e].mass * pi;
      rep.min_payment = std::min(rep.min_payment, pi);
      const double ir = static_cast<double>(pi - static_cast<long double>(t) * xi);
      rep.max_expost_ir_violation = std::max(rep.max_expost_ir_violation, ir);
      rep.max_expost_ir_violation_rel = std::max(rep.max_expost_ir_violation_rel, ir / scale(t));
    }
    rep.max_feasibility_violation = std::max(rep.max_feasibility_violation, xs - 1.0);
  }
  rep.revenue = static_cast<double>(revenue);

  // Utility of bidder i with true profile t reporting r, at a fixed t_{-i}.
  auto util = [&](std::size_t i, Profile t, std::size_t r, long double tv) -> long double {
    t[i] = r;
    const std::size_t e = inst.entry_index(t);
    if (e == MultiBidderInstance::kNone) return 0.0L;
    return tv * mech.alloc(e, i) - mech.pay(e, i);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t Ti = inst.grid(i).size();
    // Interim sums per (type, report).
    std::vector<long double> dev(Ti * Ti, 0.0L);
    std::vector<long double> fmass(Ti, 0.0L);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const Profile& t = entries[e].t;
      const std::size_t ti = t[i];
      const long double tv = inst.value(i, t);
      const long double m = entries[e].mass;
      fmass[ti] += m;
      const long double own = tv * mech.alloc(e, i) - mech.pay(e, i);
      long double best = own;
      double best_scale = scale(static_cast<double>(tv));
      for (std::size_t r = 0; r < Ti; ++r) {
        const long double u = r == ti ? own : util(i, t, r, tv);
        dev[ti * Ti + r] += m * u;
        if (u > best) {
          best = u;
          best_scale = scale(std::max(static_cast<double>(tv), inst.grid(i)[r]));
        }
      }
      const double gain = static_cast<double>(best - own);
      rep.max_dsic_violation = std::max(rep.max_dsic_violation, gain);
      rep.max_dsic_violation_rel = std::max(rep.max_dsic_violation_rel, gain / best_scale);
    }
    for (std::size_t t = 0; t < Ti; ++t) {
      if (!(fmass[t] > 0.0L)) continue;
      for (std::size_t r = 0; r < Ti; ++r) {
        const double gain = static_cast<double>((dev[t * Ti + r] - dev[t * Ti + t]) / fmass[t]);
        rep.max_bic_violation = std::max(rep.max_bic_violation, gain);
        rep.max_bic_violation_rel = std::max(
            rep.max_bic_violation_rel, gain / scale(std::max(inst.grid(i)[t], inst.grid(i)[r])));
      }
    }
  }
  return rep;
}

/// Winner under the lowest-index tie rule: the first bidder holding the highest value.
inline std::size_t highest_bidder(const MultiBidderInstance& inst, const Profile& t) {
  std::size_t w = 0;
  for (std::size_t i = 1; i < inst.num_bidders(); ++i) {
    if (inst.value(i, t) > inst.value(w, t)) w = i;
  }
  return w;
}

/// Expected second-highest type; 0 for a single bidder.
inline double second_price_revenue(const MultiBidderInstance& inst) {
  const std::size_t n = inst.num_bidders();
  if (n < 2) return 0.0;
  long double acc = 0.0L;
  for (const auto& e : inst.entries()) {
    std::array<double, kMaxBidders> v{};
    for (std::size_t i = 0; i < n; ++i) v[i] = inst.value(i, e.t);
    std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), std::greater<>());
    acc += static_cast<long double>(e.mass) * v[1];
  }
  return static_cast<double>(acc);
}

}  // namespace sigrev
