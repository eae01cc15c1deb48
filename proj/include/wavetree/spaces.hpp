#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wavetree/coefficients.hpp"
#include "wavetree/dyadic.hpp"
#include "wavetree/noise.hpp"

namespace wavetree {

//! A scan of some functional over a grid, together with its supremum.
struct SpaceStatistic {
  std::vector<double> grid;    // strictly increasing
  std::vector<double> values;  // one value per grid point
  double sup = 0.0;
};

//! Ascending grid lambda0 * 2^(-i/4), i = points-1 .. 0.
inline std::vector<double> geometric_lambda_grid(double lambda0 = 0.5,
                                                 int points = 60) {
  if (!(lambda0 > 0.0) || points < 1) {
    throw std::invalid_argument("geometric_lambda_grid: bad parameters");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(points - 1 - i)] =
        lambda0 * std::exp2(-0.25 * i);
  }
  return grid;
}

namespace detail {

inline void check_grid(const std::vector<double>& grid, bool below_one) {
  if (grid.empty()) {
    throw std::invalid_argument("statistic grid must be non-empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (below_one && !(grid[i] < 1.0))) {
      throw std::invalid_argument("statistic grid values out of range");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("statistic grid must be strictly increasing");
    }
  }
}

inline std::vector<double> level_tail_energies(const CoefficientField& f) {
  // tails[J] = energy of detail levels >= J, J = 0 .. max_level
  const int L = f.max_level();
  std::vector<double> tails(static_cast<std::size_t>(L) + 1, 0.0);
  for (int j = L - 1; j >= 0; --j) {
    double e = 0.0;
    for (double v : f.level_values(j)) e += v * v;
    tails[static_cast<std::size_t>(j)] =
        e + tails[static_cast<std::size_t>(j) + 1];
  }
  return tails;
}

}  // namespace detail

//! Energy of the small detail coefficients: sum of beta^2 over |beta| <= t.
inline double weak_energy_below(const CoefficientField& f, double t) {
  double sum = 0.0;
  for (int j = 0; j < f.max_level(); ++j) {
    for (double v : f.level_values(j)) {
      if (std::abs(v) <= t) sum += v * v;
    }
  }
  return sum;
}

//! Energy of detail coefficients in scope whose whole subtree stays small:
//! sum of beta_jk^2 over j < max_scale(lambda) with subtree max <= lambda/2.
//! Levels past the stored depth are zero, so the effective cutoff is
//! min(max_scale, stored depth).
inline double tree_weak_energy(const CoefficientField& f, double lambda,
                               double eta) {
  const int cut = std::min(max_scale(lambda, eta), f.max_level());
  const CoefficientField m = subtree_abs_max(f, cut);
  double sum = 0.0;
  for (int j = 0; j < cut; ++j) {
    auto vals = f.level_values(j);
    auto mx = m.level_values(j);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (mx[k] <= lambda / 2.0) sum += vals[k] * vals[k];
    }
  }
  return sum;
}

//! Smoothness scan: value at J is 2^(2Js) * (energy of levels >= J).
inline SpaceStatistic besov_stat(const CoefficientField& f, double s) {
  if (!(s > 0.0)) {
    throw std::invalid_argument("besov_stat: s must be positive");
  }
  const auto tails = detail::level_tail_energies(f);
  SpaceStatistic st;
  for (int J = 0; J <= f.max_level(); ++J) {
    st.grid.push_back(static_cast<double>(J));
    st.values.push_back(std::exp2(2.0 * J * s) *
                        tails[static_cast<std::size_t>(J)]);
  }
  st.sup = *std::max_element(st.values.begin(), st.values.end());
  return st;
}

//! Sparsity scan: value at lambda is lambda^(r-2) * weak_energy_below(lambda).
inline SpaceStatistic weak_besov_stat(const CoefficientField& f, double r,
                                      const std::vector<double>& grid) {
  if (!(r > 0.0) || !(r < 2.0)) {
    throw std::invalid_argument("weak_besov_stat: r must be in (0, 2)");
  }
  detail::check_grid(grid, /*below_one=*/false);
  SpaceStatistic st;
  st.grid = grid;
  for (double lam : grid) {
    st.values.push_back(std::pow(lam, r - 2.0) * weak_energy_below(f, lam));
  }
  st.sup = *std::max_element(st.values.begin(), st.values.end());
  return st;
}

//! Tree variant: value at lambda is lambda^(r-2) * tree_weak_energy(lambda).
//! Grid values must lie in (0, 1) so the scope cutoff is defined.
inline SpaceStatistic tree_weak_besov_stat(const CoefficientField& f, double r,
                                           double eta,
                                           const std::vector<double>& grid) {
  if (!(r > 0.0) || !(r < 2.0)) {
    throw std::invalid_argument("tree_weak_besov_stat: r must be in (0, 2)");
  }
  detail::check_grid(grid, /*below_one=*/true);
  SpaceStatistic st;
  st.grid = grid;
  for (double lam : grid) {
    st.values.push_back(std::pow(lam, r - 2.0) * tree_weak_energy(f, lam, eta));
  }
  st.sup = *std::max_element(st.values.begin(), st.values.end());
  return st;
}

//! Logarithm-tempered smoothness scan over J >= 1: value at J is
//! J^-1 * 2^(2Ju) * (energy of levels >= J).
inline SpaceStatistic hybrid_besov_stat(const CoefficientField& f, double u) {
  if (!(u > 0.0)) {
    throw std::invalid_argument("hybrid_besov_stat: u must be positive");
  }
  const auto tails = detail::level_tail_energies(f);
  SpaceStatistic st;
  for (int J = 1; J <= f.max_level(); ++J) {
    st.grid.push_back(static_cast<double>(J));
    st.values.push_back(std::exp2(2.0 * J * u) / J *
                        tails[static_cast<std::size_t>(J)]);
  }
  if (st.values.empty()) {
    // depth-1 field: scan starts and ends at J = 1 = max_level, tail is 0
    st.grid.push_back(1.0);
    st.values.push_back(0.0);
  }
  st.sup = *std::max_element(st.values.begin(), st.values.end());
  return st;
}

//! Number of coefficients in scope whose subtree maximum exceeds lambda/2,
//! i.e. the size of the tree rule's kept set when applied to f itself.
inline std::int64_t sparsity_count(const CoefficientField& f, double lambda,
                                   double eta) {
  const int cut = std::min(max_scale(lambda, eta), f.max_level());
  const CoefficientField m = subtree_abs_max(f, cut);
  std::int64_t count = 0;
  for (int j = 0; j < cut; ++j) {
    for (double v : m.level_values(j)) {
      if (v > lambda / 2.0) ++count;
    }
  }
  return count;
}

//! Parameters of the structured test signals: per-level population growth
//! (m, alpha) and even/odd magnitude exponents (alpha1, alpha2).
struct HFunctionParams {
  int m = 0;
  double alpha = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int max_level = 1;
};

//! Nonzero count at level j: min(floor((m*j + 1) * 2^(j*alpha)), 2^j).
inline std::int64_t h_level_count(const HFunctionParams& p, int j) {
  if (j < 0) throw std::invalid_argument("h_level_count: negative level");
  const double raw =
      std::floor((static_cast<double>(p.m) * j + 1.0) * std::exp2(j * p.alpha));
  const auto cap = CoefficientField::slots(j);
  if (raw >= static_cast<double>(cap)) return cap;
  return static_cast<std::int64_t>(raw);
}

//! Builds the signal: at level j, h_level_count(j) coefficients of magnitude
//! 2^(-alpha1*j) (even levels) or 2^(-alpha2*j) (odd levels). Supports are
//! nested: every nonzero node's parent is nonzero, children of nonzero
//! parents fill first (all left children, then right children left to right,
//! then leftmost free slots).
inline CoefficientField make_h_function(const HFunctionParams& p) {
  if (p.m < 0 || !(p.alpha > 0.0) || !(p.alpha <= 1.0) || !(p.alpha1 > 0.0) ||
      !(p.alpha2 > 0.0) || p.max_level < 1) {
    throw std::invalid_argument("make_h_function: invalid parameters");
  }
  CoefficientField f(p.max_level);
  std::vector<std::int64_t> prev;
  for (int j = 0; j < p.max_level; ++j) {
    const std::int64_t n = h_level_count(p, j);
    std::vector<std::int64_t> pos;
    pos.reserve(static_cast<std::size_t>(n));
    if (j == 0) {
      for (std::int64_t k = 0; k < n; ++k) pos.push_back(k);
    } else {
      if (n < static_cast<std::int64_t>(prev.size())) {
        // would orphan a parent: counts are non-decreasing for alpha > 0,
        // so this indicates an internal error rather than bad input
        throw std::logic_error("make_h_function: level population shrank");
      }
      for (std::int64_t q : prev) pos.push_back(2 * q);
      std::int64_t rem = n - static_cast<std::int64_t>(prev.size());
      for (std::int64_t q : prev) {
        if (rem == 0) break;
        pos.push_back(2 * q + 1);
        --rem;
      }
      if (rem > 0) {
        std::vector<char> used(
            static_cast<std::size_t>(CoefficientField::slots(j)), 0);
        for (std::int64_t q : pos) used[static_cast<std::size_t>(q)] = 1;
        for (std::int64_t k = 0; rem > 0; ++k) {
          if (!used[static_cast<std::size_t>(k)]) {
            pos.push_back(k);
            --rem;
          }
        }
      }
      std::sort(pos.begin(), pos.end());
    }
    const double mag = (j % 2 == 0) ? std::exp2(-p.alpha1 * j)
                                    : std::exp2(-p.alpha2 * j);
    for (std::int64_t k : pos) f.set(j, k, mag);
    prev = std::move(pos);
  }
  return f;
}

}  // namespace wavetree
