#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sigrev/core_model.hpp"
#include "sigrev/multi_bidder.hpp"

namespace sigrev {

/// Portable uniform draws: std::mt19937_64 is fully specified, the std distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 eng_;
};

inline constexpr double kRandomGridLo = 1.0;
inline constexpr double kRandomGridHi = 10.0;

enum class HazardFamily { Exponential, Uniform, LinearHazard };

/// A conditional value law described on the continuous range, independent of the grid size.
struct HazardLaw {
  HazardFamily family = HazardFamily::Uniform;
  double lo = kRandomGridLo;
  double hi = kRandomGridHi;
  double rate = 1.0;   ///< exponential rate, or hazard at lo for the linear family
  double slope = 0.0;  ///< hazard slope for the linear family

  /// Pmf on `grid` restricted to the grid points in [lo, hi]. Discrete hazards are
  /// nondecreasing and the top support point takes the remaining mass, so the forward-gap
  /// virtual value is nondecreasing on a uniformly spaced grid.
  std::vector<double> pmf_on(const ValueGrid& grid) const {
    const std::size_t n = grid.size();
    std::size_t a = n, b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (grid[i] >= lo - 1e-12 && grid[i] <= hi + 1e-12) {
        a = std::min(a, i);
        b = i;
      }
    }
    if (a == n || b <= a) {
      // Too narrow for the grid: two adjacent points around lo.
      a = std::min<std::size_t>(a == n ? 0 : a, n - 2);
      b = a + 1;
    }
    std::vector<double> pmf(n, 0.0);
    double survive = 1.0;
    for (std::size_t i = a; i <= b; ++i) {
      double h = 1.0;
      if (i < b) {
        const double gap = grid[i + 1] - grid[i];
        switch (family) {
          case HazardFamily::Exponential: h = -std::expm1(-rate * gap); break;
          case HazardFamily::Uniform: h = 1.0 / static_cast<double>(b - i + 1); break;
          case HazardFamily::LinearHazard:
            h = -std::expm1(-(rate + slope * (grid[i] - grid[a])) * gap);
            break;
        }
      }
      pmf[i] = survive * h;
      survive -= pmf[i];
    }
    pmf[b] += std::max(survive, 0.0);
    return pmf;
  }
};

inline HazardLaw random_hazard_law(Rng& rng) {
  HazardLaw law;
  const double width = rng.uniform(2.0, kRandomGridHi - kRandomGridLo);
  law.lo = rng.uniform(kRandomGridLo, kRandomGridHi - width);
  law.hi = law.lo + width;
  switch (rng.below(3)) {
    case 0:
      law.family = HazardFamily::Exponential;
      law.rate = rng.uniform(0.05, 1.5);
      break;
    case 1: law.family = HazardFamily::Uniform; break;
    default:
      law.family = HazardFamily::LinearHazard;
      law.rate = rng.uniform(0.02, 0.5);
      law.slope = rng.uniform(0.02, 0.6);
      break;
  }
  return law;
}

inline void require_joint_regularity(const SignalPricingInstance& inst) {
  if (!is_jointly_regular(inst)) {
    throw Error(ErrorCode::InvalidParams, "generator produced an irregular conditional");
  }
}

/// Jointly regular instance on the uniform grid over [1, 10] in quadrature mode. The laws and
/// signal weights depend on the seed and the signal count only, so the same seed at a finer grid
/// discretizes the same continuous instance.
inline SignalPricingInstance random_regular_instance(std::uint64_t seed, std::size_t n_values,
                                                     std::size_t n_signals) {
  if (n_values < 2 || n_signals < 1) throw Error(ErrorCode::InvalidParams, "need >= 2 values, >= 1 signal");
  Rng rng(seed);
  const ValueGrid grid = ValueGrid::linear(kRandomGridLo, kRandomGridHi, n_values);
  std::vector<double> weight(n_signals);
  std::vector<HazardLaw> laws(n_signals);
  double wsum = 0.0;
  for (std::size_t s = 0; s < n_signals; ++s) {
    weight[s] = 0.2 + rng.exponential();
    wsum += weight[s];
    laws[s] = random_hazard_law(rng);
  }
  std::vector<std::string> names(n_signals);
  std::vector<std::vector<ColumnEntry>> cols(n_signals);
  for (std::size_t s = 0; s < n_signals; ++s) {
    names[s] = "s" + std::to_string(s);
    const auto pmf = laws[s].pmf_on(grid);
    for (std::size_t t = 0; t < n_values; ++t) {
      if (pmf[t] > 0.0) cols[s].push_back({t, weight[s] / wsum * pmf[t]});
    }
  }
  auto inst = SignalPricingInstance::from_columns(grid, std::move(names), std::move(cols),
                                                  MassMode::Quadrature);
  require_joint_regularity(inst);
  return inst;
}

/// Two-component mixture of independent regular draws with a random weight; tagged k = 2.
inline SignalPricingInstance random_mixture_instance(std::uint64_t seed, std::size_t n_values,
                                                     std::size_t n_signals) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  const std::vector<SignalPricingInstance> parts{
      random_regular_instance(seed * 2 + 1, n_values, n_signals),
      random_regular_instance(seed * 2 + 2, n_values, n_signals)};
  const double w = rng.uniform(0.2, 0.8);
  const std::vector<double> weights{w, 1.0 - w};
  return mixture_instance(parts, weights);
}

/// Two bidders on the uniform grid over [1, n]: pmf proportional to
/// exp(-(a i^2 + b j^2 + 2 c i j + d i + e j)) with a, b > 0 and c^2 < a b. The pmf is
/// log-concave in each coordinate, so every conditional has nondecreasing hazard.
inline MultiBidderInstance random_regular_two_bidder(std::uint64_t seed, std::size_t n1,
                                                     std::size_t n2) {
  Rng rng(seed);
  const double a = rng.uniform(0.002, 0.05);
  const double b = rng.uniform(0.002, 0.05);
  const double c = rng.uniform(-0.9, 0.9) * std::sqrt(a * b);
  const double d = rng.uniform(-0.3, 0.3);
  const double e = rng.uniform(-0.3, 0.3);
  std::vector<double> pmf(n1 * n2);
  double sum = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double x = static_cast<double>(i), y = static_cast<double>(j);
      pmf[i * n2 + j] = std::exp(-(a * x * x + b * y * y + 2 * c * x * y + d * x + e * y));
      sum += pmf[i * n2 + j];
    }
  }
  for (double& m : pmf) m /= sum;
  std::vector<ValueGrid> grids{ValueGrid::linear(1.0, static_cast<double>(n1), n1),
                               ValueGrid::linear(1.0, static_cast<double>(n2), n2)};
  return MultiBidderInstance::build(std::move(grids), pmf, MassMode::Quadrature);
}

/// Two bidders with arbitrary positive-or-zero masses on random increasing grids.
inline MultiBidderInstance random_two_bidder(std::uint64_t seed, std::size_t n1, std::size_t n2) {
  Rng rng(seed);
  auto random_grid = [&](std::size_t n) {
    std::vector<double> pts(n);
    double v = rng.uniform(0.5, 2.0);
    for (auto& p : pts) {
      p = v;
      v += rng.uniform(0.1, 2.0);
    }
    return ValueGrid(std::move(pts));
  };
  std::vector<ValueGrid> grids{random_grid(n1), random_grid(n2)};
  std::vector<double> pmf(n1 * n2);
  double sum = 0.0;
  for (auto& m : pmf) {
    m = rng.uniform() < 0.2 ? 0.0 : rng.exponential();
    sum += m;
  }
  if (sum == 0.0) {
    pmf[0] = 1.0;
    sum = 1.0;
  }
  for (auto& m : pmf) m /= sum;
  return MultiBidderInstance::build(std::move(grids), pmf, MassMode::Quadrature);
}

/// Three values {1, 2, 3} and three signals with all masses positive; redrawn until the matrix of
/// conditional signal distributions has full rank.
inline SignalPricingInstance random_generic_3x3(std::uint64_t seed) {
  Rng rng(seed);
  while (true) {
    std::vector<double> pmf(9);
    double sum = 0.0;
    for (auto& m : pmf) {
      m = 0.05 + rng.exponential();
      sum += m;
    }
    for (auto& m : pmf) m /= sum;
    auto inst = SignalPricingInstance::build(ValueGrid({1.0, 2.0, 3.0}), {"a", "b", "c"}, pmf);
    if (conditional_rank(inst, 1e-6) == 3) return inst;
  }
}

}  // namespace sigrev
