#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sigrev/core_model.hpp"
#include "sigrev/mechanisms.hpp"
#include "sigrev/multi_bidder.hpp"
#include "sigrev/simplex.hpp"

namespace sigrev {

enum class LpStatus { Optimal, Infeasible, IterationLimit };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

struct LpOptions {
  /// Limit on the number of mass-positive (agent, cell) pairs.
  std::size_t max_cells = 5000;
  /// Row-generation tolerance on rows scaled to value units.
  double row_tol = 1e-10;
  std::size_t max_rounds = 500;
  /// Forces x_i = 0 outside the profiles where bidder i is the highest (ties to lowest index).
  bool highest_only = false;
  lp::SimplexOptions simplex{};
};

enum class RowKind : std::uint8_t { Bic, Dsic, InterimIr, NonNegative, Feasibility };

struct RowDual {
  RowKind kind = RowKind::Bic;
  std::size_t agent = 0;
  std::size_t a = 0;  ///< type (Bic, InterimIr), cell (Dsic, NonNegative) or profile (Feasibility)
  std::size_t b = 0;  ///< reported type (Bic, Dsic)
  double value = 0.0;
};

struct LpStats {
  std::size_t rounds = 0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  long pivots = 0;
  std::size_t rebuilds = 0;
  double max_row_violation = 0.0;
};

namespace detail {

struct AgentCell {
  std::size_t type = 0;
  std::size_t ctx = 0;
  double mass = 0.0;
  bool allowed = true;  ///< false forces x = 0
};

struct Agent {
  std::vector<double> types;
  std::size_t n_ctx = 0;
  std::vector<AgentCell> cells;
};

struct Program {
  std::vector<Agent> agents;
  /// Cells sharing one feasibility row (sum of x <= 1): pairs (agent, cell).
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> coupling;
};

struct ProgramSolution {
  LpStatus status = LpStatus::Optimal;
  std::vector<std::vector<double>> x;  ///< per agent per cell
  std::vector<std::vector<double>> p;
  double objective = 0.0;
  std::vector<RowDual> duals;
  LpStats stats;
};

class ProgramLp {
 public:
  ProgramLp(const Program& prog, const ConstraintMode& mode, const LpOptions& opts)
      : prog_(prog), mode_(mode), opts_(opts) {
    index_columns();
    index_lookups();
  }

  ProgramSolution run() {
    ProgramSolution out;
    build_solver();
    seed_rows();
    std::size_t rounds = 0;
    std::vector<double> y;
    bool rebuilt = false;
    while (true) {
      auto st = solver_->solve();
      out.stats.pivots += solver_->iterations() - pivots_before_;
      pivots_before_ = solver_->iterations();
      if (st != lp::SimplexStatus::Optimal) {
        if (!rebuilt) {
          rebuild();
          rebuilt = true;
          ++out.stats.rebuilds;
          continue;
        }
        if (st == lp::SimplexStatus::Infeasible) {
          out.status = LpStatus::Infeasible;
          return out;
        }
        if (st == lp::SimplexStatus::IterationLimit) {
          out.status = LpStatus::IterationLimit;
          return out;
        }
        throw Error(ErrorCode::SolverFailure, "relaxation reported unbounded");
      }
      y = solver_->primal();
      ++rounds;
      auto violated = scan(y);
      if (violated.empty()) break;
      if (rounds >= opts_.max_rounds) {
        out.status = LpStatus::IterationLimit;
        break;
      }
      drop_loose();
      std::size_t fresh = 0;
      bool drift = false;
      std::unordered_map<std::uint64_t, int> groups;
      for (const auto& v : violated) {
        if (present_.count(v.key)) {
          drift = true;
          continue;
        }
        if (fresh >= add_limit()) continue;
        // One incentive row per deviating type (or cell) per round.
        const RowDual r = decode(v.key);
        if (r.kind == RowKind::Bic || r.kind == RowKind::Dsic) {
          if (++groups[make_key(r.kind, r.agent, r.a, 0)] > kPerTypeRows) continue;
        }
        add_candidate(v.key);
        ++fresh;
      }
      if (fresh == 0) {
        if (drift && !rebuilt) {
          rebuild();
          rebuilt = true;
          ++out.stats.rebuilds;
          continue;
        }
        break;
      }
    }
    out.stats.rounds = rounds;
    out.stats.rows = solver_->num_rows();
    out.stats.columns = ncols_;
    out.stats.max_row_violation = 0.0;
    for (const auto& v : scan(y)) out.stats.max_row_violation = std::max(out.stats.max_row_violation, v.violation);
    extract(y, out);
    const auto d = solver_->row_duals();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!solver_->row_alive(r)) continue;
      RowDual rd = decode(rows_[r]);
      rd.value = d[r];
      out.duals.push_back(rd);
    }
    return out;
  }

 private:
  struct Violation {
    std::uint64_t key;
    double violation;
  };

  // Candidate keys: kind in the top byte, then agent (2 bits) and two 26-bit fields.
  static std::uint64_t make_key(RowKind k, std::size_t agent, std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(k) << 56) | (static_cast<std::uint64_t>(agent) << 52) |
           (static_cast<std::uint64_t>(a) << 26) | static_cast<std::uint64_t>(b);
  }
  static RowDual decode(std::uint64_t key) {
    RowDual r;
    r.kind = static_cast<RowKind>(key >> 56);
    r.agent = static_cast<std::size_t>((key >> 52) & 0xF);
    r.a = static_cast<std::size_t>((key >> 26) & 0x3FFFFFF);
    r.b = static_cast<std::size_t>(key & 0x3FFFFFF);
    return r;
  }

  bool expost() const { return mode_.ir == IrMode::ExPost; }
  bool split_payment() const { return !expost() && mode_.payments == PaymentMode::Free; }

  std::size_t add_limit() const { return std::max<std::size_t>(200, ncols_ / 4); }

  void index_columns() {
    const std::size_t per = split_payment() ? 3 : 2;
    col_base_.resize(prog_.agents.size());
    std::size_t c = 0;
    for (std::size_t a = 0; a < prog_.agents.size(); ++a) {
      col_base_[a] = c;
      c += per * prog_.agents[a].cells.size();
    }
    ncols_ = c;
    per_cell_ = per;
    cost_.assign(ncols_, 0.0);
    upper_.assign(ncols_, 0.0);
    double cmax = 0.0;
    for (std::size_t a = 0; a < prog_.agents.size(); ++a) {
      const auto& ag = prog_.agents[a];
      for (std::size_t k = 0; k < ag.cells.size(); ++k) {
        const auto& cell = ag.cells[k];
        const double t = ag.types[cell.type];
        const double kap = value_scale(t);
        const double m = cell.mass;
        upper_[xcol(a, k)] = cell.allowed ? 1.0 : 0.0;
        if (expost()) {
          // p = t x - kap u
          cost_[xcol(a, k)] = m * t;
          cost_[pcol(a, k)] = -m * kap;
          upper_[pcol(a, k)] = mode_.payments == PaymentMode::NonNegative
                                   ? (cell.allowed ? t / kap : 0.0)
                                   : lp::BoundedSimplex<double>::kInf;
        } else {
          cost_[pcol(a, k)] = m * kap;
          upper_[pcol(a, k)] = lp::BoundedSimplex<double>::kInf;
          if (split_payment()) {
            cost_[qcol(a, k)] = -m * kap;
            upper_[qcol(a, k)] = lp::BoundedSimplex<double>::kInf;
          }
        }
      }
    }
    for (double v : cost_) cmax = std::max(cmax, std::abs(v));
    cost_scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;
    for (double& v : cost_) v *= cost_scale_;
  }

  void index_lookups() {
    const std::size_t A = prog_.agents.size();
    lookup_.resize(A);
    by_type_.resize(A);
    by_ctx_.resize(A);
    fmass_.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      const auto& ag = prog_.agents[a];
      const std::size_t T = ag.types.size();
      lookup_[a].assign(T * ag.n_ctx, kNone);
      by_type_[a].assign(T, {});
      by_ctx_[a].assign(ag.n_ctx, {});
      fmass_[a].assign(T, 0.0);
      for (std::size_t k = 0; k < ag.cells.size(); ++k) {
        const auto& c = ag.cells[k];
        lookup_[a][c.type * ag.n_ctx + c.ctx] = k;
        by_type_[a][c.type].push_back(k);
        by_ctx_[a][c.ctx].push_back(k);
        fmass_[a][c.type] += c.mass;
      }
      for (auto& v : by_ctx_[a]) {
        std::sort(v.begin(), v.end(),
                  [&](std::size_t l, std::size_t r) { return ag.cells[l].type < ag.cells[r].type; });
      }
      // Types that share a context with type t, for Bayesian deviations.
      std::vector<std::size_t> positive;
      for (std::size_t t = 0; t < T; ++t) {
        if (fmass_[a][t] > 0.0) positive.push_back(t);
      }
      positive_types_.push_back(positive);
    }
  }

  std::size_t xcol(std::size_t a, std::size_t k) const { return col_base_[a] + per_cell_ * k; }
  std::size_t pcol(std::size_t a, std::size_t k) const { return col_base_[a] + per_cell_ * k + 1; }
  std::size_t qcol(std::size_t a, std::size_t k) const { return col_base_[a] + per_cell_ * k + 2; }

  std::size_t cell_at(std::size_t a, std::size_t type, std::size_t ctx) const {
    return lookup_[a][type * prog_.agents[a].n_ctx + ctx];
  }

  double kappa(std::size_t a, std::size_t k) const {
    return value_scale(prog_.agents[a].types[prog_.agents[a].cells[k].type]);
  }

  /// Adds w * (tdev * x_k - p_k) in terms of the columns.
  void add_util(std::size_t a, std::size_t k, double tdev, double w) {
    const double t = prog_.agents[a].types[prog_.agents[a].cells[k].type];
    const double kap = kappa(a, k);
    if (expost()) {
      if (tdev != t) push(xcol(a, k), w * (tdev - t));
      push(pcol(a, k), w * kap);
    } else {
      push(xcol(a, k), w * tdev);
      push(pcol(a, k), -w * kap);
      if (split_payment()) push(qcol(a, k), w * kap);
    }
  }

  /// Value of tdev * x_k - p_k at y.
  double util_at(const std::vector<double>& y, std::size_t a, std::size_t k, double tdev) const {
    const double t = prog_.agents[a].types[prog_.agents[a].cells[k].type];
    const double kap = kappa(a, k);
    if (expost()) return (tdev - t) * y[xcol(a, k)] + kap * y[pcol(a, k)];
    double p = kap * y[pcol(a, k)];
    if (split_payment()) p -= kap * y[qcol(a, k)];
    return tdev * y[xcol(a, k)] - p;
  }

  void push(std::size_t col, double v) {
    if (v != 0.0) buf_.emplace_back(col, v);
  }

  /// Fills buf_ with the row "expr <= rhs" of a candidate; returns rhs.
  double build_row(std::uint64_t key) {
    buf_.clear();
    const RowDual r = decode(key);
    const auto& ag = prog_.agents[r.agent];
    switch (r.kind) {
      case RowKind::Bic: {
        const double tv = ag.types[r.a];
        const double w0 = 1.0 / (fmass_[r.agent][r.a] * std::max(value_scale(tv), value_scale(ag.types[r.b])));
        for (std::size_t k : by_type_[r.agent][r.a]) {
          const auto& c = ag.cells[k];
          const std::size_t d = cell_at(r.agent, r.b, c.ctx);
          if (d != kNone) add_util(r.agent, d, tv, c.mass * w0);
          add_util(r.agent, k, tv, -c.mass * w0);
        }
        return 0.0;
      }
      case RowKind::Dsic: {
        const auto& c = ag.cells[r.a];
        const double tv = ag.types[c.type];
        const bool outside = r.b == kOutside;
        const double w0 = 1.0 / std::max(value_scale(tv), value_scale(outside ? tv : ag.types[r.b]));
        const std::size_t d = outside ? kNone : cell_at(r.agent, r.b, c.ctx);
        if (d != kNone) add_util(r.agent, d, tv, w0);
        add_util(r.agent, r.a, tv, -w0);
        return 0.0;
      }
      case RowKind::InterimIr: {
        const double tv = ag.types[r.a];
        const double w0 = 1.0 / (fmass_[r.agent][r.a] * value_scale(tv));
        for (std::size_t k : by_type_[r.agent][r.a]) add_util(r.agent, k, tv, -ag.cells[k].mass * w0);
        return 0.0;
      }
      case RowKind::NonNegative: {
        // -p / kap <= 0
        const double t = ag.types[ag.cells[r.a].type];
        const double kap = kappa(r.agent, r.a);
        push(xcol(r.agent, r.a), -t / kap);
        push(pcol(r.agent, r.a), 1.0);
        return 0.0;
      }
      case RowKind::Feasibility: {
        for (const auto& [a, k] : prog_.coupling[r.a]) push(xcol(a, k), 1.0);
        return 1.0;
      }
    }
    return 0.0;
  }

  double row_value(std::uint64_t key, const std::vector<double>& y) {
    const RowDual r = decode(key);
    const auto& ag = prog_.agents[r.agent];
    switch (r.kind) {
      case RowKind::Bic: {
        const double tv = ag.types[r.a];
        const double w0 = 1.0 / (fmass_[r.agent][r.a] * std::max(value_scale(tv), value_scale(ag.types[r.b])));
        double acc = 0.0;
        for (std::size_t k : by_type_[r.agent][r.a]) {
          const auto& c = ag.cells[k];
          const std::size_t d = cell_at(r.agent, r.b, c.ctx);
          if (d != kNone) acc += c.mass * util_at(y, r.agent, d, tv);
          acc -= c.mass * util_at(y, r.agent, k, tv);
        }
        return acc * w0;
      }
      default: {
        const double rhs = build_row(key);
        double acc = -rhs;
        for (const auto& [c, v] : buf_) acc += v * y[c];
        return acc;
      }
    }
  }

  void build_solver() {
    solver_ = std::make_unique<lp::BoundedSimplex<double>>(cost_, upper_, opts_.simplex);
    pivots_before_ = 0;
  }

  void add_candidate(std::uint64_t key) {
    const double rhs = build_row(key);
    // merge duplicate columns
    std::sort(buf_.begin(), buf_.end());
    idx_.clear();
    val_.clear();
    double vmax = 0.0;
    for (std::size_t i = 0; i < buf_.size(); ++i) {
      if (!idx_.empty() && idx_.back() == buf_[i].first) {
        val_.back() += buf_[i].second;
      } else {
        idx_.push_back(buf_[i].first);
        val_.push_back(buf_[i].second);
      }
    }
    for (double v : val_) vmax = std::max(vmax, std::abs(v));
    double scale = 1.0;
    if (rhs == 0.0 && vmax > 0.0) scale = 1.0 / vmax;
    for (double& v : val_) v *= scale;
    solver_->add_row(idx_, val_, lp::RowSense::LessEqual, rhs * scale);
    rows_.push_back(key);
    present_.insert(key);
  }

  /// Rows with a clearly positive slack leave the tableau; a row dropped too often stays.
  void drop_loose() {
    const auto dropped = solver_->drop_loose_rows(kDropSlack, [&](std::size_t id) {
      const RowDual r = decode(rows_[id]);
      if (r.kind == RowKind::Feasibility || r.kind == RowKind::InterimIr) return true;
      const auto it = drops_.find(rows_[id]);
      return it != drops_.end() && it->second >= kMaxDrops;
    });
    for (std::size_t id : dropped) {
      present_.erase(rows_[id]);
      ++drops_[rows_[id]];
    }
  }

  void rebuild() {
    std::vector<std::uint64_t> keys;
    for (std::size_t id = 0; id < rows_.size(); ++id) {
      if (solver_->row_alive(id)) keys.push_back(rows_[id]);
    }
    rows_.clear();
    present_.clear();
    build_solver();
    for (auto k : keys) add_candidate(k);
  }

  template <class F>
  void for_each_candidate(F&& f) const {
    const std::size_t A = prog_.agents.size();
    for (std::size_t a = 0; a < A; ++a) {
      const auto& ag = prog_.agents[a];
      if (mode_.ic == IcMode::Bayesian) {
        for (std::size_t t : positive_types_[a]) {
          for (std::size_t r : positive_types_[a]) {
            if (r != t) f(make_key(RowKind::Bic, a, t, r));
          }
        }
      } else {
        for (std::size_t ctx = 0; ctx < ag.n_ctx; ++ctx) {
          const auto& col = by_ctx_[a][ctx];
          for (std::size_t k : col) {
            for (std::size_t d : col) {
              if (d != k) f(make_key(RowKind::Dsic, a, k, ag.cells[d].type));
            }
          }
        }
      }
      if (!expost()) {
        for (std::size_t t : positive_types_[a]) f(make_key(RowKind::InterimIr, a, t, 0));
        if (mode_.ic == IcMode::DominantStrategy) {
          // A report outside the context column yields zero utility.
          for (std::size_t k = 0; k < ag.cells.size(); ++k) {
            if (by_ctx_[a][ag.cells[k].ctx].size() < ag.types.size()) {
              f(make_key(RowKind::Dsic, a, k, kOutside));
            }
          }
        }
      } else if (mode_.payments == PaymentMode::NonNegative) {
        for (std::size_t k = 0; k < ag.cells.size(); ++k) f(make_key(RowKind::NonNegative, a, k, 0));
      }
    }
    for (std::size_t g = 0; g < prog_.coupling.size(); ++g) {
      if (prog_.coupling[g].size() > 1) f(make_key(RowKind::Feasibility, 0, g, 0));
    }
  }

  void seed_rows() {
    for_each_candidate([&](std::uint64_t key) {
      const RowDual r = decode(key);
      bool seed = false;
      if (r.kind == RowKind::InterimIr) seed = true;
      if (r.kind == RowKind::Bic) {
        const auto& pos = positive_types_[r.agent];
        const auto it = std::lower_bound(pos.begin(), pos.end(), r.a);
        const auto jt = std::lower_bound(pos.begin(), pos.end(), r.b);
        seed = std::abs(static_cast<long>(it - pos.begin()) - static_cast<long>(jt - pos.begin())) == 1;
      }
      if (r.kind == RowKind::Dsic && r.b != kOutside) {
        const auto& ag = prog_.agents[r.agent];
        const auto& col = by_ctx_[r.agent][ag.cells[r.a].ctx];
        const auto pos = [&](std::size_t type) {
          return std::find_if(col.begin(), col.end(),
                              [&](std::size_t k) { return ag.cells[k].type == type; }) -
                 col.begin();
        };
        seed = std::abs(pos(ag.cells[r.a].type) - pos(r.b)) == 1;
      }
      if (seed) add_candidate(key);
    });
  }

  std::vector<Violation> scan(const std::vector<double>& y) {
    std::vector<Violation> out;
    for_each_candidate([&](std::uint64_t key) {
      const double v = row_value(key, y);
      if (v > opts_.row_tol) out.push_back({key, v});
    });
    std::sort(out.begin(), out.end(),
              [](const Violation& l, const Violation& r) { return l.violation > r.violation; });
    return out;
  }

  void extract(const std::vector<double>& y, ProgramSolution& out) const {
    const std::size_t A = prog_.agents.size();
    out.x.resize(A);
    out.p.resize(A);
    long double obj = 0.0L;
    for (std::size_t a = 0; a < A; ++a) {
      const auto& ag = prog_.agents[a];
      out.x[a].resize(ag.cells.size());
      out.p[a].resize(ag.cells.size());
      for (std::size_t k = 0; k < ag.cells.size(); ++k) {
        const double t = ag.types[ag.cells[k].type];
        const double kap = kappa(a, k);
        const double x = std::clamp(y[xcol(a, k)], 0.0, 1.0);
        double p;
        if (expost()) {
          p = t * x - kap * y[pcol(a, k)];
        } else {
          p = kap * y[pcol(a, k)];
          if (split_payment()) p -= kap * y[qcol(a, k)];
        }
        out.x[a][k] = x;
        out.p[a][k] = p;
        obj += static_cast<long double>(ag.cells[k].mass) * p;
      }
    }
    out.objective = static_cast<double>(obj);
  }

 public:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  static constexpr std::size_t kOutside = 0x3FFFFFF;

 private:
  const Program& prog_;
  ConstraintMode mode_;
  LpOptions opts_;
  std::size_t ncols_ = 0;
  std::size_t per_cell_ = 2;
  std::vector<std::size_t> col_base_;
  std::vector<double> cost_;
  std::vector<double> upper_;
  double cost_scale_ = 1.0;
  std::vector<std::vector<std::size_t>> lookup_;
  std::vector<std::vector<std::vector<std::size_t>>> by_type_;
  std::vector<std::vector<std::vector<std::size_t>>> by_ctx_;
  std::vector<std::vector<double>> fmass_;
  std::vector<std::vector<std::size_t>> positive_types_;
  std::unique_ptr<lp::BoundedSimplex<double>> solver_;
  long pivots_before_ = 0;
  std::vector<std::uint64_t> rows_;
  std::unordered_set<std::uint64_t> present_;
  std::unordered_map<std::uint64_t, int> drops_;
  static constexpr double kDropSlack = 1e-6;
  static constexpr int kMaxDrops = 3;
  static constexpr int kPerTypeRows = 1000;
  std::vector<std::pair<std::size_t, double>> buf_;
  std::vector<std::size_t> idx_;
  std::vector<double> val_;
};

}  // namespace detail

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Mechanism mechanism;
  double objective = 0.0;
  std::vector<RowDual> certificate;
  LpStats stats;
};

/// Revenue-optimal single-buyer mechanism with private signals under `mode`.
inline LpSolution solve_single_buyer(const SignalPricingInstance& inst, const ConstraintMode& mode,
                                     const LpOptions& opts = {}) {
  const auto cells = inst.cells();
  if (cells.size() > opts.max_cells) {
    throw Error(ErrorCode::SizeCapExceeded,
                std::to_string(cells.size()) + " positive cells exceed the cap of " +
                    std::to_string(opts.max_cells));
  }
  detail::Program prog;
  detail::Agent ag;
  ag.types = inst.grid().points();
  ag.n_ctx = inst.num_signals();
  ag.cells.reserve(cells.size());
  for (const auto& c : cells) ag.cells.push_back({c.t, c.s, c.mass, true});
  prog.agents.push_back(std::move(ag));
  detail::ProgramLp lp(prog, mode, opts);
  auto sol = lp.run();
  LpSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.certificate = std::move(sol.duals);
  out.stats = sol.stats;
  if (!sol.x.empty()) out.mechanism = Mechanism{std::move(sol.x[0]), std::move(sol.p[0])};
  return out;
}

struct MultiLpSolution {
  LpStatus status = LpStatus::Optimal;
  MultiMechanism mechanism;
  double objective = 0.0;
  std::vector<RowDual> certificate;
  LpStats stats;
};

inline MultiLpSolution solve_multi_bidder(const MultiBidderInstance& inst, const ConstraintMode& mode,
                                          const LpOptions& opts = {}) {
  const std::size_t n = inst.num_bidders();
  const auto entries = inst.entries();
  if (entries.size() * n > opts.max_cells) {
    throw Error(ErrorCode::SizeCapExceeded,
                std::to_string(entries.size() * n) + " bidder-profile pairs exceed the cap of " +
                    std::to_string(opts.max_cells));
  }
  detail::Program prog;
  prog.agents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& ag = prog.agents[i];
    ag.types = inst.grid(i).points();
    ag.n_ctx = inst.num_contexts(i);
    ag.cells.reserve(entries.size());
  }
  prog.coupling.resize(n > 1 ? entries.size() : 0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::size_t w = highest_bidder(inst, entries[e].t);
    for (std::size_t i = 0; i < n; ++i) {
      const bool allowed = !opts.highest_only || i == w;
      prog.agents[i].cells.push_back(
          {entries[e].t[i], inst.context_of(i, entries[e].t), entries[e].mass, allowed});
      if (n > 1) prog.coupling[e].emplace_back(i, e);
    }
  }
  detail::ProgramLp lp(prog, mode, opts);
  auto sol = lp.run();
  MultiLpSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.certificate = std::move(sol.duals);
  out.stats = sol.stats;
  out.mechanism = MultiMechanism::zero(inst);
  if (!sol.x.empty()) {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      for (std::size_t i = 0; i < n; ++i) {
        out.mechanism.x[e * n + i] = sol.x[i][e];
        out.mechanism.p[e * n + i] = sol.p[i][e];
      }
    }
  }
  return out;
}

}  // namespace sigrev
