#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace sigrev::lp {

enum class RowSense { LessEqual, GreaterEqual };
enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  long max_iterations = 5'000'000;
  /// Consecutive degenerate pivots before pricing switches to a random eligible candidate.
  int randomize_after_degenerate = 64;
};

/// Dense tableau simplex for
///   maximize c'y  subject to  rows (a'y <= b or a'y >= b),  0 <= y <= u  (u may be +inf).
///
/// Nonbasic variables always sit at zero; a variable resting at its upper bound is
/// complemented (y = u - y') in place. Rows may be appended after a solve: the next solve
/// restarts from the previous basis with the dual simplex.
template <class Scalar = double>
class BoundedSimplex {
 public:
  static constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

  BoundedSimplex(std::span<const double> cost, std::span<const double> upper,
                 SimplexOptions opts = {})
      : n_(cost.size()), opts_(opts) {
    cost_.assign(cost.begin(), cost.end());
    upper_.reserve(n_);
    for (double u : upper) upper_.push_back(u < 0 ? Scalar(0) : Scalar(u));
    upper_.resize(n_, kInf);
    flipped_.assign(n_, 0);
    nonbasis_.resize(n_);
    pos_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      pos_[j] = -static_cast<long>(j) - 1;
    }
    d_.assign(cost_.begin(), cost_.end());
  }

  std::size_t num_rows() const { return basis_.size(); }
  /// Rows ever added, including dropped ones; row ids run from 0 to this count.
  std::size_t num_row_ids() const { return cost_.size() - n_; }
  bool row_alive(std::size_t id) const { return pos_[n_ + id] != kDropped; }
  std::size_t num_structural() const { return n_; }
  long iterations() const { return iterations_; }

  /// Appends a row and returns its id. The row is expressed in the current basis.
  std::size_t add_row(std::span<const std::size_t> idx, std::span<const double> coef,
                      RowSense sense, double rhs) {
    const Scalar sign = sense == RowSense::LessEqual ? Scalar(1) : Scalar(-1);
    const std::size_t row = basis_.size();
    const std::size_t id = cost_.size() - n_;
    std::vector<Scalar> alpha(n_, Scalar(0));
    Scalar beta = sign * Scalar(rhs);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t v = idx[k];
      const Scalar a = sign * Scalar(coef[k]);
      if (a == Scalar(0)) continue;
      const long p = pos_[v];
      if (p < 0) {
        const std::size_t col = static_cast<std::size_t>(-p - 1);
        if (flipped_[v]) {
          beta -= a * upper_[v];
          alpha[col] -= a;
        } else {
          alpha[col] += a;
        }
      } else {
        const std::size_t i = static_cast<std::size_t>(p);
        const Scalar* src = &tab_[i * n_];
        if (flipped_[v]) {
          beta -= a * (upper_[v] - beta_[i]);
          for (std::size_t c = 0; c < n_; ++c) alpha[c] += a * src[c];
        } else {
          beta -= a * beta_[i];
          for (std::size_t c = 0; c < n_; ++c) alpha[c] -= a * src[c];
        }
      }
    }
    const std::size_t slack = cost_.size();
    cost_.push_back(Scalar(0));
    upper_.push_back(kInf);
    flipped_.push_back(0);
    pos_.push_back(static_cast<long>(row));
    basis_.push_back(slack);
    beta_.push_back(beta);
    Scalar w = Scalar(1);
    for (const Scalar v : alpha) w += v * v;
    weight_.push_back(w);
    tab_.insert(tab_.end(), alpha.begin(), alpha.end());
    return id;
  }

  /// Removes every row whose slack is basic with value at least `min_slack` and for which
  /// `keep(id)` is false. Such rows are not tight, so the basis stays primal and dual feasible.
  template <class Keep>
  std::vector<std::size_t> drop_loose_rows(double min_slack, Keep&& keep) {
    std::vector<std::size_t> dropped;
    for (std::size_t i = basis_.size(); i-- > 0;) {
      const std::size_t v = basis_[i];
      if (v < n_ || beta_[i] < Scalar(min_slack)) continue;
      const std::size_t id = v - n_;
      if (keep(id)) continue;
      const std::size_t last = basis_.size() - 1;
      if (i != last) {
        std::copy_n(&tab_[last * n_], n_, &tab_[i * n_]);
        beta_[i] = beta_[last];
        weight_[i] = weight_[last];
        basis_[i] = basis_[last];
        pos_[basis_[i]] = static_cast<long>(i);
      }
      tab_.resize(last * n_);
      beta_.pop_back();
      weight_.pop_back();
      basis_.pop_back();
      pos_[v] = kDropped;
      dropped.push_back(id);
    }
    return dropped;
  }

  SimplexStatus solve() {
    if (!primal_feasible()) {
      // Phase 1 uses a zero objective, under which every basis is dual feasible.
      if (!dual_feasible()) std::fill(d_.begin(), d_.end(), Scalar(0));
      perturb_reduced_costs();
      const auto st = dual_loop();
      refresh_reduced_costs();
      if (st != SimplexStatus::Optimal) return st;
    }
    return primal_loop();
  }

  std::vector<double> primal() const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t v = 0; v < n_; ++v) y[v] = static_cast<double>(value_of(v));
    return y;
  }

  double objective() const {
    const auto y = primal();
    long double acc = 0;
    for (std::size_t v = 0; v < n_; ++v) acc += static_cast<long double>(cost_[v]) * y[v];
    return static_cast<double>(acc);
  }

  /// Nonnegative multipliers indexed by row id, oriented so that (b - a'y) >= 0 for <= rows
  /// and (a'y - b) >= 0 for >= rows. Dropped rows get 0.
  std::vector<double> row_duals() const {
    std::vector<double> out(num_row_ids(), 0.0);
    for (std::size_t r = 0; r < out.size(); ++r) {
      const long p = pos_[n_ + r];
      if (p < 0 && p != kDropped) out[r] = static_cast<double>(-d_[static_cast<std::size_t>(-p - 1)]);
    }
    return out;
  }

 private:
  Scalar value_of(std::size_t v) const {
    const long p = pos_[v];
    Scalar val = p >= 0 ? beta_[static_cast<std::size_t>(p)] : Scalar(0);
    if (flipped_[v]) val = upper_[v] - val;
    if (val < Scalar(0)) val = Scalar(0);
    if (val > upper_[v]) val = upper_[v];
    return val;
  }

  Scalar& at(std::size_t i, std::size_t j) { return tab_[i * n_ + j]; }

  bool dual_feasible() const {
    for (const Scalar dj : d_) {
      if (dj > Scalar(opts_.optimality_tol)) return false;
    }
    return true;
  }

  bool primal_feasible() const {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (infeasibility(i) > Scalar(opts_.feasibility_tol)) return false;
    }
    return true;
  }

  Scalar infeasibility(std::size_t i) const {
    const Scalar b = beta_[i];
    const Scalar u = upper_[basis_[i]];
    if (b < Scalar(0)) return -b;
    if (b > u) return b - u;
    return Scalar(0);
  }

  std::uint64_t next_random() {
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 7;
    rng_ ^= rng_ << 17;
    return rng_;
  }

  Scalar effective_cost(std::size_t v) const { return flipped_[v] ? -cost_[v] : cost_[v]; }

  /// Pushes every reduced cost strictly below zero by a small deterministic amount, so the dual
  /// ratio test has no ties. The exact values are restored before the primal pass.
  void perturb_reduced_costs() {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(iterations_);
    for (std::size_t k = 0; k < n_; ++k) {
      h ^= h >> 33;
      h *= 0xFF51AFD7ED558CCDULL;
      h ^= h >> 29;
      const Scalar u = Scalar(0.5) + Scalar(0.5) * static_cast<Scalar>(h >> 11) * Scalar(0x1.0p-53);
      const Scalar dk = std::min(d_[k], Scalar(0));
      d_[k] = dk - Scalar(kPerturbation) * (Scalar(1) + std::abs(dk)) * u;
    }
  }

  void refresh_reduced_costs() {
    for (std::size_t j = 0; j < n_; ++j) d_[j] = effective_cost(nonbasis_[j]);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      const Scalar cb = effective_cost(basis_[i]);
      if (cb == Scalar(0)) continue;
      const Scalar* row = &tab_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) d_[j] -= cb * row[j];
    }
  }

  void flip_nonbasic(std::size_t j) {
    const std::size_t v = nonbasis_[j];
    const Scalar u = upper_[v];
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      Scalar& a = at(i, j);
      if (a != Scalar(0)) {
        beta_[i] -= a * u;
        a = -a;
      }
    }
    d_[j] = -d_[j];
    flipped_[v] ^= 1;
  }

  void flip_basic(std::size_t r) {
    const std::size_t v = basis_[r];
    beta_[r] = upper_[v] - beta_[r];
    Scalar* row = &tab_[r * n_];
    for (std::size_t j = 0; j < n_; ++j) row[j] = -row[j];
    flipped_[v] ^= 1;
  }

  void pivot(std::size_t r, std::size_t j) {
    Scalar* prow = &tab_[r * n_];
    const Scalar a = prow[j];
    const Scalar inv = Scalar(1) / a;
    Scalar pnorm = Scalar(1);
    for (std::size_t k = 0; k < n_; ++k) {
      prow[k] *= inv;
      pnorm += prow[k] * prow[k];
    }
    pnorm += inv * inv - prow[j] * prow[j];
    prow[j] = inv;
    beta_[r] *= inv;
    weight_[r] = pnorm;

    nz_.clear();
    for (std::size_t k = 0; k < n_; ++k) {
      if (prow[k] != Scalar(0)) nz_.push_back(k);
    }
    const bool sparse = nz_.size() * 3 < n_;
    const std::size_t m = basis_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      Scalar* row = &tab_[i * n_];
      const Scalar f = row[j];
      if (f == Scalar(0)) continue;
      if (sparse) {
        Scalar delta = -f * f;
        row[j] = Scalar(0);
        for (const std::size_t k : nz_) {
          const Scalar before = row[k];
          row[k] -= f * prow[k];
          delta += row[k] * row[k] - before * before;
        }
        weight_[i] = std::max(weight_[i] + delta, Scalar(1));
      } else {
        row[j] = Scalar(0);
        Scalar w = Scalar(1);
        for (std::size_t k = 0; k < n_; ++k) {
          row[k] -= f * prow[k];
          w += row[k] * row[k];
        }
        weight_[i] = w;
      }
      beta_[i] -= f * beta_[r];
    }
    const Scalar f = d_[j];
    if (f != Scalar(0)) {
      d_[j] = Scalar(0);
      for (const std::size_t k : nz_) d_[k] -= f * prow[k];
    }
    const std::size_t in = nonbasis_[j];
    const std::size_t out = basis_[r];
    basis_[r] = in;
    nonbasis_[j] = out;
    pos_[in] = static_cast<long>(r);
    pos_[out] = -static_cast<long>(j) - 1;
  }

  SimplexStatus primal_loop() {
    const Scalar opt_tol = Scalar(opts_.optimality_tol);
    const Scalar ptol = Scalar(opts_.pivot_tol);
    const Scalar ftol = Scalar(opts_.feasibility_tol);
    const std::size_t m = basis_.size();
    int degenerate = 0;
    while (true) {
      if (++iterations_ > opts_.max_iterations) return SimplexStatus::IterationLimit;
      const bool randomize = degenerate > opts_.randomize_after_degenerate;
      std::size_t j = n_;
      Scalar best = opt_tol;
      std::size_t seen = 0;
      for (std::size_t k = 0; k < n_; ++k) {
        if (d_[k] <= opt_tol) continue;
        if (randomize) {
          if (next_random() % ++seen == 0) j = k;
        } else if (d_[k] > best) {
          best = d_[k];
          j = k;
        }
      }
      if (j == n_) return SimplexStatus::Optimal;

      // Harris two-pass ratio test.
      Scalar relaxed = kInf;
      for (std::size_t i = 0; i < m; ++i) {
        const Scalar a = tab_[i * n_ + j];
        if (a > ptol) {
          relaxed = std::min(relaxed, (std::max(beta_[i], Scalar(0)) + ftol) / a);
        } else if (a < -ptol) {
          const Scalar u = upper_[basis_[i]];
          if (u < kInf) relaxed = std::min(relaxed, (std::max(u - beta_[i], Scalar(0)) + ftol) / -a);
        }
      }
      const Scalar own_bound = upper_[nonbasis_[j]];
      if (relaxed == kInf && own_bound == kInf) return SimplexStatus::Unbounded;

      std::size_t r = m;
      Scalar r_ratio = kInf;
      Scalar r_abs = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const Scalar a = tab_[i * n_ + j];
        Scalar lim;
        if (a > ptol) {
          lim = std::max(beta_[i], Scalar(0)) / a;
        } else if (a < -ptol && upper_[basis_[i]] < kInf) {
          lim = std::max(upper_[basis_[i]] - beta_[i], Scalar(0)) / -a;
        } else {
          continue;
        }
        if (lim > relaxed) continue;
        const Scalar mag = std::abs(a);
        const bool better = r == m || mag > r_abs;
        if (better) {
          r = i;
          r_ratio = lim;
          r_abs = mag;
        }
      }

      if (r == m || own_bound <= r_ratio) {
        flip_nonbasic(j);
        degenerate = 0;
        continue;
      }
      degenerate = r_ratio <= Scalar(1e-12) ? degenerate + 1 : 0;
      if (tab_[r * n_ + j] < 0) flip_basic(r);
      pivot(r, j);
    }
  }

  SimplexStatus dual_loop() {
    const Scalar ptol = Scalar(opts_.pivot_tol);
    const Scalar ftol = Scalar(opts_.feasibility_tol);
    const Scalar otol = Scalar(opts_.optimality_tol);
    const std::size_t m = basis_.size();
    int degenerate = 0;
    while (true) {
      if (++iterations_ > opts_.max_iterations) return SimplexStatus::IterationLimit;
      const bool randomize = degenerate > opts_.randomize_after_degenerate;
      std::size_t r = m;
      Scalar worst = 0;
      std::size_t seen = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const Scalar inf = infeasibility(i);
        if (inf <= ftol) continue;
        if (randomize) {
          if (next_random() % ++seen == 0) r = i;
        } else if (inf * inf > worst * weight_[i]) {
          worst = inf * inf / weight_[i];
          r = i;
        }
      }
      if (r == m) return SimplexStatus::Optimal;
      if (beta_[r] > upper_[basis_[r]]) flip_basic(r);

      const Scalar* row = &tab_[r * n_];
      cand_.clear();
      for (std::size_t k = 0; k < n_; ++k) {
        if (row[k] < -ptol) cand_.push_back({std::max(-d_[k], Scalar(0)) / -row[k], k});
      }
      if (cand_.empty()) return SimplexStatus::Infeasible;
      std::sort(cand_.begin(), cand_.end());

      // Bound-flipping ratio test: pass breakpoints of boxed columns while the leaving row
      // stays infeasible, then pick the largest pivot near the stopping breakpoint.
      Scalar slope = -beta_[r];
      std::size_t q = 0;
      for (; q + 1 < cand_.size(); ++q) {
        const std::size_t k = cand_[q].second;
        const Scalar u = upper_[nonbasis_[k]];
        if (u == kInf) break;
        const Scalar next = slope + row[k] * u;
        if (next <= ftol) break;
        slope = next;
      }
      Scalar relaxed = kInf;
      for (std::size_t c = q; c < cand_.size(); ++c) {
        const std::size_t k = cand_[c].second;
        relaxed = std::min(relaxed, (std::max(-d_[k], Scalar(0)) + otol) / -row[k]);
      }
      std::size_t j = n_;
      Scalar j_ratio = 0;
      Scalar j_abs = 0;
      for (std::size_t c = q; c < cand_.size() && cand_[c].first <= relaxed; ++c) {
        const std::size_t k = cand_[c].second;
        if (j == n_ || -row[k] > j_abs) {
          j = k;
          j_ratio = cand_[c].first;
          j_abs = -row[k];
        }
      }
      for (std::size_t c = 0; c < q; ++c) flip_nonbasic(cand_[c].second);
      degenerate = j_ratio <= Scalar(1e-12) ? degenerate + 1 : 0;
      pivot(r, j);
    }
  }

  static constexpr long kDropped = std::numeric_limits<long>::min();
  static constexpr double kPerturbation = 1e-7;

  std::size_t n_;
  SimplexOptions opts_;
  std::vector<Scalar> cost_;
  std::vector<Scalar> upper_;
  std::vector<char> flipped_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonbasis_;
  std::vector<long> pos_;
  std::vector<Scalar> tab_;
  std::vector<Scalar> beta_;
  /// Dual steepest-edge weights: 1 + squared norm of each tableau row.
  std::vector<Scalar> weight_;
  std::vector<std::pair<Scalar, std::size_t>> cand_;
  std::vector<Scalar> d_;
  std::vector<std::size_t> nz_;
  long iterations_ = 0;
  std::uint64_t rng_ = 0x2545F4914F6CDD1DULL;
};

}  // namespace sigrev::lp
