#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigrev/error.hpp"

namespace sigrev {

/// Accepted deviation of a probability vector's total from 1 when building instances.
inline constexpr double kSumTolerance = 1e-9;

enum class MassMode { Mass, Quadrature };
enum class GridSpacing { Geometric, Linear };

inline std::string_view to_string(MassMode mode) {
  return mode == MassMode::Mass ? "mass" : "quadrature";
}

/// Sorted value (type) points. Widths are cell widths used by quadrature sums;
/// the default width of a point is the forward gap to the next point.
class ValueGrid {
 public:
  ValueGrid() = default;

  explicit ValueGrid(std::vector<double> points) : points_(std::move(points)) {
    widths_ = forward_gaps(points_);
    validate();
  }

  ValueGrid(std::vector<double> points, std::vector<double> widths)
      : points_(std::move(points)), widths_(std::move(widths)) {
    validate();
  }

  static ValueGrid geometric(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
      throw Error(ErrorCode::InvalidGrid, "geometric grid needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> pts(n);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    pts.front() = lo;
    pts.back() = hi;
    return ValueGrid(std::move(pts));
  }

  static ValueGrid linear(double lo, double hi, std::size_t n) {
    if (!(lo >= 0.0) || !(hi > lo) || n < 2) {
      throw Error(ErrorCode::InvalidGrid, "linear grid needs 0 <= lo < hi and n >= 2");
    }
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    pts.back() = hi;
    return ValueGrid(std::move(pts));
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double point(std::size_t i) const { return points_[i]; }
  double width(std::size_t i) const { return widths_[i]; }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& widths() const { return widths_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  /// Index of an exact grid value.
  std::optional<std::size_t> find(double v) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), v);
    if (it == points_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - points_.begin());
  }

  /// Cells [point_i, point_i + width_i) do not overlap.
  bool cells_disjoint() const {
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      if (points_[i] + widths_[i] > points_[i + 1] * (1.0 + 1e-12) + 1e-300) return false;
    }
    return true;
  }

  friend bool operator==(const ValueGrid& a, const ValueGrid& b) {
    return a.points_ == b.points_ && a.widths_ == b.widths_;
  }

 private:
  static std::vector<double> forward_gaps(const std::vector<double>& pts) {
    std::vector<double> w(pts.size(), 1.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) w[i] = pts[i + 1] - pts[i];
    if (pts.size() >= 2) w.back() = w[pts.size() - 2];
    return w;
  }

  void validate() const {
    if (points_.empty()) throw Error(ErrorCode::InvalidGrid, "grid has no points");
    if (widths_.size() != points_.size()) {
      throw Error(ErrorCode::DimensionMismatch, "grid widths and points differ in length");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i]) || points_[i] < 0.0) {
        throw Error(ErrorCode::InvalidGrid, "grid points must be finite and nonnegative");
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw Error(ErrorCode::InvalidGrid, "grid points must be strictly increasing");
      }
      if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
        throw Error(ErrorCode::InvalidGrid, "grid widths must be positive");
      }
    }
  }

  std::vector<double> points_;
  std::vector<double> widths_;
};

/// A distribution over the points of a grid.
struct DiscreteDist {
  ValueGrid grid;
  std::vector<double> pmf;

  static DiscreteDist make(ValueGrid grid, std::vector<double> pmf) {
    if (pmf.size() != grid.size()) {
      throw Error(ErrorCode::DimensionMismatch, "pmf length differs from grid size");
    }
    double total = 0.0;
    for (double m : pmf) {
      if (!(m >= 0.0)) throw Error(ErrorCode::NegativeMass, "pmf entries must be >= 0");
      total += m;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::SumNotOne, "pmf sums to " + std::to_string(total));
    }
    return DiscreteDist{std::move(grid), std::move(pmf)};
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (pmf[i] > 0.0) idx.push_back(i);
    }
    return idx;
  }

  /// Pr[v >= grid[i]].
  double tail_from(std::size_t i) const {
    double acc = 0.0;
    for (std::size_t j = pmf.size(); j-- > i;) acc += pmf[j];
    return acc;
  }

  double mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) acc += pmf[i] * grid[i];
    return acc;
  }
};

/// One mass-positive (value, signal) cell.
struct Cell {
  std::size_t t = 0;
  std::size_t s = 0;
  double mass = 0.0;
};

struct ColumnEntry {
  std::size_t t = 0;
  double mass = 0.0;
};

/// Joint distribution of (value, seller signal) on a finite grid.
///
/// Storage is sparse: only mass-positive cells are kept, grouped by signal
/// with increasing value index inside each signal. Every mechanism in the
/// library is aligned with `cells()`; zero-mass cells implicitly carry x = p = 0.
class SignalPricingInstance {
 public:
  SignalPricingInstance() = default;

  /// `pmf` is row-major over (value, signal): pmf[t * num_signals + s].
  static SignalPricingInstance build(ValueGrid grid, std::vector<std::string> signals,
                                     std::span<const double> pmf, MassMode mode = MassMode::Mass) {
    const std::size_t T = grid.size();
    const std::size_t S = signals.size();
    if (S == 0 || pmf.size() != T * S) {
      throw Error(ErrorCode::DimensionMismatch,
                  "pmf has " + std::to_string(pmf.size()) + " entries, expected " +
                      std::to_string(T) + " x " + std::to_string(S));
    }
    std::vector<std::vector<ColumnEntry>> columns(S);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t s = 0; s < S; ++s) {
        const double m = pmf[t * S + s];
        if (!(m >= 0.0)) throw Error(ErrorCode::NegativeMass, "negative or NaN mass");
        if (m > 0.0) columns[s].push_back({t, m});
      }
    }
    return from_columns(std::move(grid), std::move(signals), std::move(columns), mode);
  }

  static SignalPricingInstance from_columns(ValueGrid grid, std::vector<std::string> signals,
                                            std::vector<std::vector<ColumnEntry>> columns,
                                            MassMode mode = MassMode::Mass) {
    if (signals.empty() || columns.size() != signals.size()) {
      throw Error(ErrorCode::DimensionMismatch, "one column per signal required");
    }
    if (mode == MassMode::Quadrature && !grid.cells_disjoint()) {
      throw Error(ErrorCode::InvalidGrid, "quadrature cells overlap");
    }
    SignalPricingInstance inst;
    inst.grid_ = std::move(grid);
    inst.signals_ = std::move(signals);
    inst.mode_ = mode;
    const std::size_t T = inst.grid_.size();
    const std::size_t S = inst.signals_.size();
    inst.col_start_.assign(S + 1, 0);
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      auto& col = columns[s];
      std::sort(col.begin(), col.end(),
                [](const ColumnEntry& a, const ColumnEntry& b) { return a.t < b.t; });
      inst.col_start_[s] = inst.cells_.size();
      for (std::size_t k = 0; k < col.size(); ++k) {
        const auto& e = col[k];
        if (e.t >= T) throw Error(ErrorCode::DimensionMismatch, "value index out of range");
        if (k > 0 && col[k - 1].t == e.t) {
          throw Error(ErrorCode::DimensionMismatch, "duplicate cell in column");
        }
        if (!(e.mass >= 0.0)) throw Error(ErrorCode::NegativeMass, "negative or NaN mass");
        if (e.mass == 0.0) continue;
        inst.cells_.push_back({e.t, s, e.mass});
        total += e.mass;
      }
    }
    inst.col_start_[S] = inst.cells_.size();
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw Error(ErrorCode::SumNotOne, "masses sum to " + std::to_string(total));
    }
    if (std::abs(total - 1.0) > 1e-12) {
      for (auto& c : inst.cells_) c.mass /= total;
    }
    inst.finish_indices(T, S);
    return inst;
  }

  const ValueGrid& grid() const { return grid_; }
  const std::vector<std::string>& signals() const { return signals_; }
  MassMode mode() const { return mode_; }
  std::size_t num_values() const { return grid_.size(); }
  std::size_t num_signals() const { return signals_.size(); }
  int mixture_k() const { return mixture_k_; }

  std::span<const Cell> cells() const { return cells_; }
  std::span<const Cell> column(std::size_t s) const {
    return std::span<const Cell>(cells_).subspan(col_start_[s], col_start_[s + 1] - col_start_[s]);
  }
  std::size_t column_offset(std::size_t s) const { return col_start_[s]; }

  /// Indices into cells() of the cells with value index t.
  const std::vector<std::size_t>& cells_of_value(std::size_t t) const { return by_value_[t]; }

  std::optional<std::size_t> cell_index(std::size_t t, std::size_t s) const {
    auto col = column(s);
    auto it = std::lower_bound(col.begin(), col.end(), t,
                               [](const Cell& c, std::size_t v) { return c.t < v; });
    if (it == col.end() || it->t != t) return std::nullopt;
    return col_start_[s] + static_cast<std::size_t>(it - col.begin());
  }

  double mass(std::size_t t, std::size_t s) const {
    auto idx = cell_index(t, s);
    return idx ? cells_[*idx].mass : 0.0;
  }

  double signal_mass(std::size_t s) const { return signal_mass_[s]; }
  double value_mass(std::size_t t) const { return value_mass_[t]; }
  const std::vector<double>& signal_marginal() const { return signal_mass_; }
  const std::vector<double>& value_marginal() const { return value_mass_; }

  /// Row-major dense copy of the pmf.
  std::vector<double> dense_pmf() const {
    std::vector<double> out(num_values() * num_signals(), 0.0);
    for (const auto& c : cells_) out[c.t * num_signals() + c.s] = c.mass;
    return out;
  }

  SignalPricingInstance with_mode(MassMode mode) const {
    if (mode == MassMode::Quadrature && !grid_.cells_disjoint()) {
      throw Error(ErrorCode::InvalidGrid, "quadrature cells overlap");
    }
    SignalPricingInstance copy = *this;
    copy.mode_ = mode;
    return copy;
  }

  SignalPricingInstance with_mixture_k(int k) const {
    SignalPricingInstance copy = *this;
    copy.mixture_k_ = k;
    return copy;
  }

 private:
  void finish_indices(std::size_t T, std::size_t S) {
    signal_mass_.assign(S, 0.0);
    value_mass_.assign(T, 0.0);
    by_value_.assign(T, {});
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const auto& c = cells_[i];
      signal_mass_[c.s] += c.mass;
      value_mass_[c.t] += c.mass;
      by_value_[c.t].push_back(i);
    }
  }

  ValueGrid grid_;
  std::vector<std::string> signals_;
  MassMode mode_ = MassMode::Mass;
  std::vector<Cell> cells_;
  std::vector<std::size_t> col_start_;
  std::vector<std::vector<std::size_t>> by_value_;
  std::vector<double> signal_mass_;
  std::vector<double> value_mass_;
  int mixture_k_ = 1;
};

inline std::string format_value_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Equal revenue distribution truncated at H: F(v) = 1 - 1/v on [1, H) plus an atom 1/H at H,
/// with each grid point carrying the mass of [t_i, t_{i+1}).
inline DiscreteDist erd_grid(double H, std::size_t n_points,
                             GridSpacing spacing = GridSpacing::Geometric) {
  if (!(H > 1.0) || !std::isfinite(H)) throw Error(ErrorCode::InvalidH, "H must exceed 1");
  if (n_points < 2) throw Error(ErrorCode::InvalidParams, "need at least 2 grid points");
  ValueGrid grid = spacing == GridSpacing::Geometric ? ValueGrid::geometric(1.0, H, n_points)
                                                     : ValueGrid::linear(1.0, H, n_points);
  std::vector<double> pmf(n_points);
  for (std::size_t i = 0; i + 1 < n_points; ++i) pmf[i] = 1.0 / grid[i] - 1.0 / grid[i + 1];
  pmf.back() = 1.0 / H;
  return DiscreteDist{std::move(grid), std::move(pmf)};
}

inline constexpr const char* kUninformativeSignal = "*";

/// Value ~ ER(H); the signal equals the value with probability eps and is "*" otherwise.
/// Signal 0 is "*", signal j + 1 reveals value index j.
inline SignalPricingInstance example1_instance(double H, double eps, std::size_t n_points,
                                               GridSpacing spacing = GridSpacing::Geometric,
                                               MassMode mode = MassMode::Mass) {
  if (!(H > std::exp(1.0)) || !std::isfinite(H)) {
    throw Error(ErrorCode::InvalidParams, "example1_instance needs H > e");
  }
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidParams, "eps must lie in (0, 1)");
  DiscreteDist er = erd_grid(H, n_points, spacing);
  const std::size_t T = er.grid.size();
  std::vector<std::string> signals;
  signals.reserve(T + 1);
  signals.emplace_back(kUninformativeSignal);
  for (std::size_t t = 0; t < T; ++t) signals.push_back(format_value_label(er.grid[t]));
  std::vector<std::vector<ColumnEntry>> cols(T + 1);
  for (std::size_t t = 0; t < T; ++t) {
    cols[0].push_back({t, (1.0 - eps) * er.pmf[t]});
    cols[t + 1].push_back({t, eps * er.pmf[t]});
  }
  return SignalPricingInstance::from_columns(std::move(er.grid), std::move(signals),
                                             std::move(cols), mode);
}

inline bool is_example1_shaped(const SignalPricingInstance& inst) {
  const std::size_t T = inst.num_values();
  if (inst.num_signals() != T + 1 || inst.signals()[0] != kUninformativeSignal) return false;
  for (std::size_t j = 0; j < T; ++j) {
    for (const auto& c : inst.column(j + 1)) {
      if (c.t != j) return false;
    }
  }
  return inst.grid().front() >= 1.0 && inst.grid().back() > std::exp(1.0);
}

/// Layout of the interleaved-support instance with m levels: value index 2(k-1) + b holds
/// 3k + b, signal index s has bit (k-1) equal to s_k.
struct InterleavedLayout {
  int levels = 0;

  std::size_t num_values() const { return 2 * static_cast<std::size_t>(levels); }
  std::size_t num_signals() const { return std::size_t{1} << levels; }
  static double value_of(int level, int bit) { return 3.0 * level + bit; }
  static std::size_t value_index(int level, int bit) {
    return 2 * static_cast<std::size_t>(level - 1) + static_cast<std::size_t>(bit);
  }
  static int bit_of(std::size_t signal, int level) {
    return static_cast<int>((signal >> (level - 1)) & 1U);
  }
  std::string signal_name(std::size_t signal) const {
    std::string name(static_cast<std::size_t>(levels), '0');
    for (int k = 1; k <= levels; ++k) name[k - 1] = bit_of(signal, k) ? '1' : '0';
    return name;
  }
  /// The support {3k + s_k} of a signal, increasing.
  std::vector<double> support(std::size_t signal) const {
    std::vector<double> out;
    for (int k = 1; k <= levels; ++k) out.push_back(value_of(k, bit_of(signal, k)));
    return out;
  }
  /// The raw discrete equal-revenue weights on a support: 1/t_i - 1/t_{i+1}, and 1/t_top.
  static std::vector<double> raw_weights(const std::vector<double>& supp) {
    std::vector<double> w(supp.size());
    for (std::size_t i = 0; i + 1 < supp.size(); ++i) w[i] = 1.0 / supp[i] - 1.0 / supp[i + 1];
    w.back() = 1.0 / supp.back();
    return w;
  }
  /// Normalizer of the raw joint weights sum_s 2^-m sum_i raw(t_i | s) = E_s[1 / t_1(s)].
  static double raw_total() { return 0.5 * (1.0 / 3.0 + 1.0 / 4.0); }
};

inline constexpr int kMaxInterleavedLevels = 16;

/// Interleaved-support instance. Given signal s the value follows the discrete equal revenue
/// distribution on {3k + s_k}. The joint pmf is proportional to 2^-m times the raw
/// equal-revenue weights, so the conditionals are the normalized equal-revenue pmfs and
/// Pr[s] is proportional to 1 / t_1(s).
inline SignalPricingInstance example2_instance(int m_levels) {
  if (m_levels < 2 || m_levels > kMaxInterleavedLevels) {
    throw Error(ErrorCode::TooManyLevels, "m_levels must lie in [2, 16]");
  }
  InterleavedLayout layout{m_levels};
  std::vector<double> pts;
  for (int k = 1; k <= m_levels; ++k) {
    pts.push_back(InterleavedLayout::value_of(k, 0));
    pts.push_back(InterleavedLayout::value_of(k, 1));
  }
  const std::size_t S = layout.num_signals();
  const double scale = std::ldexp(1.0, -m_levels) / InterleavedLayout::raw_total();
  std::vector<std::string> names(S);
  std::vector<std::vector<ColumnEntry>> cols(S);
  for (std::size_t s = 0; s < S; ++s) {
    names[s] = layout.signal_name(s);
    const auto supp = layout.support(s);
    const auto w = InterleavedLayout::raw_weights(supp);
    for (int k = 1; k <= m_levels; ++k) {
      cols[s].push_back({InterleavedLayout::value_index(k, InterleavedLayout::bit_of(s, k)),
                         scale * w[static_cast<std::size_t>(k - 1)]});
    }
  }
  return SignalPricingInstance::from_columns(ValueGrid(std::move(pts)), std::move(names),
                                             std::move(cols), MassMode::Mass);
}

inline std::optional<int> interleaved_levels(const SignalPricingInstance& inst) {
  const std::size_t T = inst.num_values();
  if (T < 4 || T % 2 != 0) return std::nullopt;
  const int m = static_cast<int>(T / 2);
  if (m > kMaxInterleavedLevels || inst.num_signals() != (std::size_t{1} << m)) return std::nullopt;
  for (int k = 1; k <= m; ++k) {
    for (int b = 0; b < 2; ++b) {
      if (inst.grid()[InterleavedLayout::value_index(k, b)] != InterleavedLayout::value_of(k, b)) {
        return std::nullopt;
      }
    }
  }
  for (std::size_t s = 0; s < inst.num_signals(); ++s) {
    auto col = inst.column(s);
    if (col.size() != static_cast<std::size_t>(m)) return std::nullopt;
    for (int k = 1; k <= m; ++k) {
      if (col[static_cast<std::size_t>(k - 1)].t !=
          InterleavedLayout::value_index(k, InterleavedLayout::bit_of(s, k))) {
        return std::nullopt;
      }
    }
  }
  return m;
}

/// Distribution of the value given signal s.
inline DiscreteDist conditional(const SignalPricingInstance& inst, std::size_t s) {
  if (s >= inst.num_signals()) throw Error(ErrorCode::DimensionMismatch, "signal out of range");
  const double fs = inst.signal_mass(s);
  if (!(fs > 0.0)) throw Error(ErrorCode::ZeroMassSignal, "signal " + inst.signals()[s]);
  std::vector<double> pmf(inst.num_values(), 0.0);
  for (const auto& c : inst.column(s)) pmf[c.t] = c.mass / fs;
  return DiscreteDist{inst.grid(), std::move(pmf)};
}

inline std::vector<double> marginal_signal(const SignalPricingInstance& inst) {
  return inst.signal_marginal();
}

inline DiscreteDist value_distribution(const SignalPricingInstance& inst) {
  return DiscreteDist{inst.grid(), inst.value_marginal()};
}

/// Discrete virtual values with the forward-gap convention
///   phi(t_i) = t_i - Pr[v > t_i] * (t_next - t_i) / pmf(t_i),   phi(t_top) = t_top,
/// where t_next is the next support point. Entries off the support are 0.
inline std::vector<double> virtual_values(const DiscreteDist& dist) {
  const std::size_t n = dist.pmf.size();
  std::vector<double> phi(n, 0.0);
  double tail = 0.0;  // mass strictly above the current point
  std::optional<std::size_t> next;
  for (std::size_t i = n; i-- > 0;) {
    const double p = dist.pmf[i];
    if (!(p > 0.0)) continue;
    const double t = dist.grid[i];
    phi[i] = next ? t - tail * (dist.grid[*next] - t) / p : t;
    tail += p;
    next = i;
  }
  return phi;
}

struct RegularityReport {
  std::vector<double> virtuals;
  bool is_monotone = true;
  std::optional<std::size_t> first_violation_index;
  bool support_contiguous = true;

  bool regular() const { return is_monotone && support_contiguous; }
};

/// Absolute slack of the monotonicity test, scaled by the value magnitude.
inline double monotone_slack(double value) { return 1e-12 * std::max(1.0, std::abs(value)); }

inline RegularityReport regularity_audit(const DiscreteDist& dist) {
  RegularityReport rep;
  rep.virtuals = virtual_values(dist);
  const auto supp = dist.support();
  for (std::size_t k = 1; k < supp.size(); ++k) {
    if (supp[k] != supp[k - 1] + 1) rep.support_contiguous = false;
    const double prev = rep.virtuals[supp[k - 1]];
    const double cur = rep.virtuals[supp[k]];
    if (cur < prev - monotone_slack(dist.grid[supp[k]]) && rep.is_monotone) {
      rep.is_monotone = false;
      rep.first_violation_index = supp[k];
    }
  }
  return rep;
}

/// One report per signal; zero-mass signals get an empty (vacuously regular) report.
inline std::vector<RegularityReport> joint_regularity_audit(const SignalPricingInstance& inst) {
  std::vector<RegularityReport> out(inst.num_signals());
  for (std::size_t s = 0; s < inst.num_signals(); ++s) {
    if (inst.signal_mass(s) > 0.0) out[s] = regularity_audit(conditional(inst, s));
  }
  return out;
}

inline bool is_jointly_regular(const SignalPricingInstance& inst) {
  const auto reps = joint_regularity_audit(inst);
  return std::all_of(reps.begin(), reps.end(), [](const auto& r) { return r.regular(); });
}

/// Pointwise mixture of instances on a common grid and signal set. The mixture tag k adds
/// up the tags of the components with positive weight.
inline SignalPricingInstance mixture_instance(std::span<const SignalPricingInstance> parts,
                                              std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw Error(ErrorCode::IncompatibleShapes, "one weight per component required");
  }
  const auto& first = parts.front();
  double wsum = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(parts[i].grid() == first.grid()) || parts[i].signals() != first.signals()) {
      throw Error(ErrorCode::IncompatibleShapes, "components differ in grid or signal set");
    }
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::IncompatibleShapes, "negative weight");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::IncompatibleShapes, "weights must sum to 1");
  }
  const std::size_t S = first.num_signals();
  std::vector<double> pmf(first.num_values() * S, 0.0);
  int k = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (weights[i] == 0.0) continue;
    k += parts[i].mixture_k();
    for (const auto& c : parts[i].cells()) pmf[c.t * S + c.s] += weights[i] * c.mass;
  }
  return SignalPricingInstance::build(first.grid(), first.signals(), pmf, first.mode())
      .with_mixture_k(k);
}

/// Numerical rank of the matrix of signal distributions given each mass-positive value,
/// Pr[s | t]. Full row rank is the genericity condition behind full surplus extraction.
inline std::size_t conditional_rank(const SignalPricingInstance& inst, double tol = 1e-10) {
  const std::size_t S = inst.num_signals();
  std::vector<std::vector<double>> rows;
  for (std::size_t t = 0; t < inst.num_values(); ++t) {
    const double ft = inst.value_mass(t);
    if (!(ft > 0.0)) continue;
    std::vector<double> r(S, 0.0);
    for (std::size_t ci : inst.cells_of_value(t)) r[inst.cells()[ci].s] = inst.cells()[ci].mass / ft;
    rows.push_back(std::move(r));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < S && rank < rows.size(); ++col) {
    std::size_t best = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][col]) > std::abs(rows[best][col])) best = r;
    }
    if (std::abs(rows[best][col]) <= tol) continue;
    std::swap(rows[best], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < S; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

}  // namespace sigrev
