#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "wavetree/coefficients.hpp"

namespace wavetree {

//! Threshold m * eps * sqrt(ln(1/eps)) for noise level eps in (0, 1/2).
inline double threshold_level(double epsilon, double m) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::invalid_argument("threshold_level: epsilon must be in (0, 1/2)");
  }
  if (!(m > 0.0)) {
    throw std::invalid_argument("threshold_level: m must be positive");
  }
  return m * epsilon * std::sqrt(std::log(1.0 / epsilon));
}

//! Smallest j >= 1 with 2^j >= lambda^(-2*eta), i.e. 2^-j <= lambda^(2*eta).
//! Requires lambda in (0, 1). Exact powers are snapped before the ceiling so
//! e.g. lambda = 1/2, eta = 1 gives 2 rather than 3.
inline int max_scale(double lambda, double eta) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("max_scale: lambda must be in (0, 1)");
  }
  if (!(eta >= 1.0)) {
    throw std::invalid_argument("max_scale: eta must be >= 1");
  }
  const double v = -2.0 * eta * std::log2(lambda);
  const double r = std::round(v);
  int j;
  if (std::abs(v - r) < 1e-9) {
    j = static_cast<int>(r);
  } else {
    j = static_cast<int>(std::ceil(v));
  }
  return j < 1 ? 1 : j;
}

//! Default calibration constants for the two rules.
inline double default_m_tree(double eta) { return 4.0 * std::sqrt(3.0 * eta); }
inline double default_m_hard(double eta) { return 4.0 * std::sqrt(2.0 * eta); }

//! Noise level, threshold constant and scope exponent for one experiment.
//! Built either from a noise level eps (threshold derived) or directly from
//! a threshold value (no eps available, e.g. when thresholding given data).
class NoiseConfig {
 public:
  static NoiseConfig from_epsilon(double epsilon, double m, double eta) {
    check_eta(eta);
    NoiseConfig cfg;
    cfg.epsilon_ = epsilon;
    cfg.m_ = m;
    cfg.eta_ = eta;
    cfg.lambda_ = threshold_level(epsilon, m);  // validates epsilon, m
    return cfg;
  }

  static NoiseConfig from_lambda(double lambda, double eta) {
    if (!(lambda > 0.0)) {
      throw std::invalid_argument("from_lambda: lambda must be positive");
    }
    check_eta(eta);
    NoiseConfig cfg;
    cfg.eta_ = eta;
    cfg.lambda_ = lambda;
    return cfg;
  }

  bool has_epsilon() const { return !std::isnan(epsilon_); }

  double epsilon() const {
    if (!has_epsilon()) {
      throw std::logic_error("NoiseConfig: epsilon not set");
    }
    return epsilon_;
  }

  double m() const {
    if (!has_epsilon()) {
      throw std::logic_error("NoiseConfig: m not set");
    }
    return m_;
  }

  double eta() const { return eta_; }
  double threshold() const { return lambda_; }

  //! True when the threshold is so large that no detail level is observed;
  //! estimators then return the scaling coefficient alone.
  bool degenerate() const { return lambda_ >= 1.0; }

  //! Number of detail levels in scope: max_scale of the threshold,
  //! or 0 in the degenerate case.
  int cutoff_level() const {
    return degenerate() ? 0 : max_scale(lambda_, eta_);
  }

 private:
  static void check_eta(double eta) {
    if (!(eta >= 1.0)) {
      throw std::invalid_argument("NoiseConfig: eta must be >= 1");
    }
  }

  double epsilon_ = std::numeric_limits<double>::quiet_NaN();
  double m_ = std::numeric_limits<double>::quiet_NaN();
  double eta_ = 1.0;
  double lambda_ = 0.0;
};

//! Deterministic per-replicate generator: same (seed, index) always yields
//! the same stream, and distinct indices decorrelate.
inline std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace detail {

// Truth plus eps * N(0,1) on levels -1 .. depth-1, one draw per slot in a
// fixed order (level-major, positions ascending) so a shallower observation
// consumes a prefix of the same stream.
inline CoefficientField observe_depth(const CoefficientField& truth,
                                      double epsilon, int depth,
                                      std::mt19937_64& rng) {
  if (truth.max_level() < depth) {
    throw std::invalid_argument("observe: truth has fewer levels than scope");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  CoefficientField out(depth);
  for (int j = -1; j < depth; ++j) {
    auto src = truth.level_values(j);
    auto dst = out.level_values(j);
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = src[k] + epsilon * normal(rng);
    }
  }
  return out;
}

}  // namespace detail

//! Noisy observation of the truth over all levels the estimator will see.
inline CoefficientField observe(const CoefficientField& truth,
                                const NoiseConfig& config,
                                std::mt19937_64& rng) {
  if (config.degenerate()) {
    throw std::invalid_argument("observe: threshold >= 1, nothing in scope");
  }
  return detail::observe_depth(truth, config.epsilon(), config.cutoff_level(),
                               rng);
}

}  // namespace wavetree
