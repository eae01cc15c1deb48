#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wavetree/coefficients.hpp"
#include "wavetree/estimators.hpp"
#include "wavetree/noise.hpp"
#include "wavetree/spaces.hpp"

namespace wavetree {

enum class Rule { hard, tree };

inline Rule rule_from_name(std::string_view name) {
  if (name == "hard") return Rule::hard;
  if (name == "tree") return Rule::tree;
  throw std::invalid_argument("unknown rule: " + std::string(name));
}

inline EstimateResult run_rule(Rule rule, const CoefficientField& y,
                               const NoiseConfig& config) {
  return rule == Rule::tree ? hard_tree(y, config) : hard_threshold(y, config);
}

//! Monte Carlo estimate of the l2 risk against a fixed truth. The loss per
//! replicate splits into the in-scope estimation error and the deterministic
//! energy of the truth beyond the scope cutoff; mean is their sum.
struct McRisk {
  double mean = 0.0;
  double standard_error = 0.0;
  double estimation_mean = 0.0;
  double truncation_energy = 0.0;
};

///! Loss of a truncated estimate against a deeper truth: in-scope squared
//! distance plus the truth's energy beyond the estimate's depth. This is the
//! exact per-replicate quantity the Monte Carlo harness averages.
inline double replicate_loss(const CoefficientField& estimate,
                             const CoefficientField& truth) {
  if (truth.max_level() < estimate.max_level()) {
    throw std::invalid_argument("replicate_loss: estimate deeper than truth");
  }
  return squared_distance(estimate, truth.truncated(estimate.max_level())) +
         tail_energy(truth, estimate.max_level());
}

inline McRisk mc_risk(const CoefficientField& truth, Rule rule,
                      const NoiseConfig& config, int replicates,
                      std::uint64_t seed) {
  if (replicates < 1) {
    throw std::invalid_argument("mc_risk: need at least one replicate");
  }
  const int depth = config.cutoff_level();
  if (truth.max_level() < depth) {
    throw std::invalid_argument("mc_risk: truth shallower than scope");
  }
  const CoefficientField truth_in_scope = truth.truncated(depth);
  const double truncation = tail_energy(truth, depth);

  std::vector<double> losses(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    auto rng = replicate_rng(seed, static_cast<std::uint64_t>(r));
    const CoefficientField y = observe(truth, config, rng);
    const EstimateResult est = run_rule(rule, y, config);
    losses[static_cast<std::size_t>(r)] =
        squared_distance(est.estimate, truth_in_scope);
  }
  double sum = 0.0;
  for (double v : losses) sum += v;
  const double est_mean = sum / replicates;

  double se = 0.0;
  if (replicates > 1) {
    double ss = 0.0;
    for (double v : losses) ss += (v - est_mean) * (v - est_mean);
    se = std::sqrt(ss / (replicates - 1)) /
         std::sqrt(static_cast<double>(replicates));
  }
  return {est_mean + truncation, se, est_mean, truncation};
}

struct RiskPoint {
  double epsilon = 0.0;
  double lambda = 0.0;
  int j_lambda = 0;
  double risk = 0.0;
  double standard_error = 0.0;
  double estimation_mean = 0.0;
  double truncation_energy = 0.0;
};

struct RiskCurve {
  std::vector<RiskPoint> points;  // epsilon descending
};

namespace detail {

// distinct deterministic seed per grid point
inline std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  return seed + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL;
}

}  // namespace detail

//! Risk across a grid of noise levels (sorted descending internally).
inline RiskCurve risk_curve(const CoefficientField& truth, Rule rule,
                            std::vector<double> epsilons, double m, double eta,
                            int replicates, std::uint64_t seed) {
  if (epsilons.empty()) {
    throw std::invalid_argument("risk_curve: empty epsilon grid");
  }
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  RiskCurve curve;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const NoiseConfig cfg = NoiseConfig::from_epsilon(epsilons[i], m, eta);
    const McRisk r =
        mc_risk(truth, rule, cfg, replicates, detail::point_seed(seed, i));
    curve.points.push_back({epsilons[i], cfg.threshold(), cfg.cutoff_level(),
                            r.mean, r.standard_error, r.estimation_mean,
                            r.truncation_energy});
  }
  return curve;
}

//! Least-squares slope of ln(risk) against ln(lambda). Points with
//! non-positive risk are excluded; at least four must remain.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  int points_excluded = 0;
};

inline RateFit rate_fit(const RiskCurve& curve) {
  std::vector<double> x, y;
  int excluded = 0;
  for (const auto& p : curve.points) {
    if (p.risk > 0.0) {
      x.push_back(std::log(p.lambda));
      y.push_back(std::log(p.risk));
    } else {
      ++excluded;
    }
  }
  const std::size_t n = x.size();
  if (n < 4) {
    throw std::invalid_argument("rate_fit: fewer than four usable points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double r2 = 1.0;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - (intercept + slope * x[i]);
      ss_res += e * e;
    }
    r2 = 1.0 - ss_res / syy;
  }
  return {slope, intercept, r2, static_cast<int>(n), excluded};
}

//! One grid point of a paired comparison of the two rules.
struct CompareRow {
  double epsilon = 0.0;
  double lambda_tree = 0.0;
  double lambda_hard = 0.0;
  int j_lambda_tree = 0;
  int j_lambda_hard = 0;
  double risk_tree = 0.0;
  double se_tree = 0.0;
  double risk_hard = 0.0;
  double se_hard = 0.0;
  double ratio = 0.0;
  std::int64_t inclusion_violations = 0;  // checked when thresholds coincide
};

//! Runs both rules on the same noisy observations (per-replicate paired
//! draws; the shallower scope sees a prefix of the deeper one). When the two
//! configurations share a threshold, every hard-kept coefficient must also
//! be tree-kept; violations of that inclusion are counted.
inline std::vector<CompareRow> compare_rules(const CoefficientField& truth,
                                             std::vector<double> epsilons,
                                             double m_tree, double m_hard,
                                             double eta, int replicates,
                                             std::uint64_t seed) {
  if (epsilons.empty()) {
    throw std::invalid_argument("compare_rules: empty epsilon grid");
  }
  if (replicates < 1) {
    throw std::invalid_argument("compare_rules: need at least one replicate");
  }
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    const NoiseConfig cfg_tree = NoiseConfig::from_epsilon(eps, m_tree, eta);
    const NoiseConfig cfg_hard = NoiseConfig::from_epsilon(eps, m_hard, eta);
    const int depth_tree = cfg_tree.cutoff_level();
    const int depth_hard = cfg_hard.cutoff_level();
    const int depth = std::max(depth_tree, depth_hard);
    if (truth.max_level() < depth) {
      throw std::invalid_argument("compare_rules: truth shallower than scope");
    }
    const bool same_threshold = cfg_tree.threshold() == cfg_hard.threshold();
    const CoefficientField truth_tree = truth.truncated(depth_tree);
    const CoefficientField truth_hard = truth.truncated(depth_hard);
    const double trunc_tree = tail_energy(truth, depth_tree);
    const double trunc_hard = tail_energy(truth, depth_hard);
    const std::uint64_t point_seed = detail::point_seed(seed, i);

    std::vector<double> loss_tree(static_cast<std::size_t>(replicates));
    std::vector<double> loss_hard(static_cast<std::size_t>(replicates));
    std::int64_t violations = 0;
    for (int r = 0; r < replicates; ++r) {
      auto rng = replicate_rng(point_seed, static_cast<std::uint64_t>(r));
      const CoefficientField y =
          detail::observe_depth(truth, eps, depth, rng);
      const EstimateResult et = hard_tree(y.truncated(depth_tree), cfg_tree);
      const EstimateResult eh =
          hard_threshold(y.truncated(depth_hard), cfg_hard);
      loss_tree[static_cast<std::size_t>(r)] =
          squared_distance(et.estimate, truth_tree);
      loss_hard[static_cast<std::size_t>(r)] =
          squared_distance(eh.estimate, truth_hard);
      if (same_threshold) {
        const int d = std::min(depth_tree, depth_hard);
        for (int j = 0; j < d; ++j) {
          for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
            if (eh.mask.kept(j, k) && !et.mask.kept(j, k)) ++violations;
          }
        }
      }
    }
    auto summarize = [replicates](const std::vector<double>& losses,
                                  double trunc, double& mean, double& se) {
      double sum = 0.0;
      for (double v : losses) sum += v;
      const double est_mean = sum / replicates;
      se = 0.0;
      if (replicates > 1) {
        double ss = 0.0;
        for (double v : losses) ss += (v - est_mean) * (v - est_mean);
        se = std::sqrt(ss / (replicates - 1)) /
             std::sqrt(static_cast<double>(replicates));
      }
      mean = est_mean + trunc;
    };
    CompareRow row;
    row.epsilon = eps;
    row.lambda_tree = cfg_tree.threshold();
    row.lambda_hard = cfg_hard.threshold();
    row.j_lambda_tree = depth_tree;
    row.j_lambda_hard = depth_hard;
    summarize(loss_tree, trunc_tree, row.risk_tree, row.se_tree);
    summarize(loss_hard, trunc_hard, row.risk_hard, row.se_hard);
    row.ratio = row.risk_tree / row.risk_hard;
    row.inclusion_violations = violations;
    rows.push_back(row);
  }
  return rows;
}

//! One row of a separation experiment: statistics of the structured signal
//! at increasing depths, with the step-to-step growth factor.
struct EmbeddingRow {
  int max_level = 0;
  double stat_a = 0.0;  // the statistic that should blow up
  double stat_b = 0.0;  // the statistic that should stay bounded
  double growth_a = 0.0;
  double growth_b = 0.0;
};

//! Signal whose plain sparsity scan diverges while the tree-restricted scan
///! stays bounded: magnitudes alternate between slow and fast decay, and the
//! tree condition rules the slow-decay levels out of the small-energy sums.
//! Requires 0 < s < 1 and eta > 1.
inline std::vector<EmbeddingRow> weak_tree_separation(
    double s, double eta, const std::vector<int>& levels,
    const std::vector<double>& grid) {
  if (!(s > 0.0) || !(s < 1.0)) {
    throw std::invalid_argument("weak_tree_separation: s must be in (0, 1)");
  }
  if (!(eta > 1.0)) {
    throw std::invalid_argument("weak_tree_separation: eta must be > 1");
  }
  if (levels.empty()) {
    throw std::invalid_argument("weak_tree_separation: empty level list");
  }
  const double r = 2.0 / (1.0 + 2.0 * s);
  HFunctionParams p;
  p.m = 1;
  p.alpha = 1.0 / (eta * (1.0 + 2.0 * s));
  p.alpha1 = 1.0;
  p.alpha2 = 1.0 / (2.0 * eta);
  std::vector<EmbeddingRow> rows;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || (i > 0 && levels[i] <= levels[i - 1])) {
      throw std::invalid_argument("weak_tree_separation: bad level list");
    }
    p.max_level = levels[i];
    const CoefficientField f = make_h_function(p);
    EmbeddingRow row;
    row.max_level = levels[i];
    row.stat_a = weak_besov_stat(f, r, grid).sup;
    row.stat_b = tree_weak_besov_stat(f, r, eta, grid).sup;
    if (i > 0) {
      row.growth_a = row.stat_a / rows.back().stat_a;
      row.growth_b = row.stat_b / rows.back().stat_b;
    }
    rows.push_back(row);
  }
  return rows;
}

//! Signal separating two scope exponents through the smoothness scan: at the
//! larger eta's critical exponent the scan stays bounded, at the smaller
//! one it diverges. Requires 0 < s < 1 and 1 <= eta1 < eta2.
inline std::vector<EmbeddingRow> besov_scale_separation(
    double s, double eta1, double eta2, const std::vector<int>& levels) {
  if (!(s > 0.0) || !(s < 1.0)) {
    throw std::invalid_argument("besov_scale_separation: s must be in (0, 1)");
  }
  if (!(eta1 >= 1.0) || !(eta2 > eta1)) {
    throw std::invalid_argument(
        "besov_scale_separation: need 1 <= eta1 < eta2");
  }
  if (levels.empty()) {
    throw std::invalid_argument("besov_scale_separation: empty level list");
  }
  const double u1 = s / (eta1 * (1.0 + 2.0 * s));
  const double u2 = s / (eta2 * (1.0 + 2.0 * s));
  HFunctionParams p;
  p.m = 0;
  p.alpha = 1.0 / (eta2 * (1.0 + 2.0 * s));
  p.alpha1 = 1.0 / (2.0 * eta2);
  p.alpha2 = p.alpha1;
  std::vector<EmbeddingRow> rows;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || (i > 0 && levels[i] <= levels[i - 1])) {
      throw std::invalid_argument("besov_scale_separation: bad level list");
    }
    p.max_level = levels[i];
    const CoefficientField f = make_h_function(p);
    EmbeddingRow row;
    row.max_level = levels[i];
    row.stat_a = besov_stat(f, u1).sup;  // diverging scan
    row.stat_b = besov_stat(f, u2).sup;  // bounded scan
    if (i > 0) {
      row.growth_a = row.stat_a / rows.back().stat_a;
      row.growth_b = row.stat_b / rows.back().stat_b;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wavetree
