#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wavetree/coefficients.hpp"
#include "wavetree/csv.hpp"
#include "wavetree/dyadic.hpp"
#include "wavetree/noise.hpp"
#include "wavetree/wavelet.hpp"

namespace wavetree {

//! Keep/kill decisions for detail levels 0 .. cutoff_level-1. The scaling
//! coefficient is always kept and is not part of the mask.
class KeepMask {
 public:
  explicit KeepMask(int cutoff_level) {
    if (cutoff_level < 0) {
      throw std::invalid_argument("KeepMask: cutoff_level must be >= 0");
    }
    kept_.resize(static_cast<std::size_t>(cutoff_level));
    for (int j = 0; j < cutoff_level; ++j) {
      kept_[static_cast<std::size_t>(j)].assign(
          static_cast<std::size_t>(CoefficientField::slots(j)), 0);
    }
  }

  int cutoff_level() const { return static_cast<int>(kept_.size()); }

  bool kept(int level, std::int64_t position) const {
    check(level, position);
    return kept_[static_cast<std::size_t>(level)]
                [static_cast<std::size_t>(position)] != 0;
  }
  bool kept(DyadicNode node) const { return kept(node.level, node.position); }

  void set(int level, std::int64_t position, bool value) {
    check(level, position);
    kept_[static_cast<std::size_t>(level)][static_cast<std::size_t>(position)] =
        value ? 1 : 0;
  }
  void set(DyadicNode node, bool value) {
    set(node.level, node.position, value);
  }

  std::int64_t count_kept() const {
    std::int64_t n = 0;
    for (const auto& lv : kept_) {
      for (auto b : lv) n += b;
    }
    return n;
  }

  std::int64_t size() const {
    return cutoff_level() == 0
               ? 0
               : (std::int64_t{1} << cutoff_level()) - 1;
  }

  friend bool operator==(const KeepMask&, const KeepMask&) = default;

 private:
  void check(int level, std::int64_t position) const {
    if (level < 0 || level >= cutoff_level() || position < 0 ||
        position >= CoefficientField::slots(level)) {
      throw std::out_of_range("KeepMask: index out of range");
    }
  }

  std::vector<std::vector<std::uint8_t>> kept_;
};

struct EstimateResult {
  CoefficientField estimate;
  KeepMask mask;
  double lambda = 0.0;
  int j_lambda = 0;
};

namespace detail {

// Shared prelude: scope depth and input check. A degenerate config (lambda
// >= 1) yields depth 0, i.e. the scaling coefficient alone survives.
inline int estimator_depth(const CoefficientField& y,
                           const NoiseConfig& config) {
  const int depth = config.cutoff_level();
  if (y.max_level() < depth) {
    throw std::invalid_argument("estimator: observation shallower than scope");
  }
  return depth;
}

}  // namespace detail

//! Restriction of y to the masked coefficients (scaling always kept).
inline CoefficientField apply_mask(const CoefficientField& y,
                                   const KeepMask& mask) {
  const int depth = mask.cutoff_level();
  if (y.max_level() < depth) {
    throw std::invalid_argument("apply_mask: observation shallower than mask");
  }
  CoefficientField out(depth);
  out.set(-1, 0, y.at(-1, 0));
  for (int j = 0; j < depth; ++j) {
    auto src = y.level_values(j);
    auto dst = out.level_values(j);
    for (std::size_t k = 0; k < dst.size(); ++k) {
      if (mask.kept(j, static_cast<std::int64_t>(k))) dst[k] = src[k];
    }
  }
  return out;
}

//! Classical term-by-term rule: keep a detail coefficient iff its magnitude
//! strictly exceeds the threshold.
inline EstimateResult hard_threshold(const CoefficientField& y,
                                     const NoiseConfig& config) {
  const int depth = detail::estimator_depth(y, config);
  const double lam = config.threshold();
  KeepMask mask(depth);
  for (int j = 0; j < depth; ++j) {
    auto vals = y.level_values(j);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (std::abs(vals[k]) > lam) {
        mask.set(j, static_cast<std::int64_t>(k), true);
      }
    }
  }
  return {apply_mask(y, mask), mask, lam, depth};
}

//! Tree rule: keep a coefficient iff some member of its scope (itself or a
//! descendant above the cutoff) strictly exceeds the threshold. Implemented
//! by thresholding and then completing every ancestor chain, which marks
//! exactly those coefficients.
inline EstimateResult hard_tree(const CoefficientField& y,
                                const NoiseConfig& config) {
  const int depth = detail::estimator_depth(y, config);
  const double lam = config.threshold();
  KeepMask mask(depth);
  for (int j = 0; j < depth; ++j) {
    auto vals = y.level_values(j);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (std::abs(vals[k]) > lam) {
        DyadicNode node{j, static_cast<std::int64_t>(k)};
        // climb until an already-marked ancestor: everything above it is
        // marked too, so the chain is complete
        while (!mask.kept(node)) {
          mask.set(node, true);
          if (node.level == 0) break;
          node = node.parent();
        }
      }
    }
  }
  return {apply_mask(y, mask), mask, lam, depth};
}

//! Penalized selection cost of a mask: each kept slot pays lambda^2, each
//! killed slot pays the squared scope maximum of the observation.
inline double penalized_cost(const KeepMask& mask, const CoefficientField& y,
                             const NoiseConfig& config) {
  const int depth = config.cutoff_level();
  if (mask.cutoff_level() != depth) {
    throw std::invalid_argument("penalized_cost: mask depth mismatch");
  }
  if (y.max_level() < depth) {
    throw std::invalid_argument("penalized_cost: observation too shallow");
  }
  const double lam = config.threshold();
  const CoefficientField scope_max = subtree_abs_max(y, depth);
  double cost = 0.0;
  for (int j = 0; j < depth; ++j) {
    auto mx = scope_max.level_values(j);
    for (std::size_t k = 0; k < mx.size(); ++k) {
      if (mask.kept(j, static_cast<std::int64_t>(k))) {
        cost += lam * lam;
      } else {
        cost += mx[k] * mx[k];
      }
    }
  }
  return cost;
}

//! Exhaustive minimizer of the penalized cost over all 2^D masks, D being
//! the number of detail slots in scope. Ties resolve to the first minimizer
//! in enumeration order (slots level-major, code bits from slot 0 upward).
inline KeepMask brute_force_argmin(const CoefficientField& y,
                                   const NoiseConfig& config) {
  const int depth = detail::estimator_depth(y, config);
  const std::int64_t d = KeepMask(depth).size();
  if (d > 20) {
    throw std::invalid_argument(
        "brute_force_argmin: more than 20 slots in scope");
  }
  std::vector<DyadicNode> order;
  for (int j = 0; j < depth; ++j) {
    for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
      order.push_back({j, k});
    }
  }
  KeepMask best(depth);
  double best_cost = penalized_cost(best, y, config);
  for (std::uint64_t code = 1; code < (std::uint64_t{1} << d); ++code) {
    KeepMask mask(depth);
    for (std::size_t b = 0; b < order.size(); ++b) {
      if (code & (std::uint64_t{1} << b)) mask.set(order[b], true);
    }
    const double cost = penalized_cost(mask, y, config);
    if (cost < best_cost) {
      best_cost = cost;
      best = mask;
    }
  }
  return best;
}

//! Keep-mask CSV: one row per detail slot in scope, kept flag 0/1.
inline std::string mask_to_csv(const KeepMask& mask) {
  std::string out = "level,position,kept\n";
  for (int j = 0; j < mask.cutoff_level(); ++j) {
    for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
      out += std::to_string(j);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += mask.kept(j, k) ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

inline KeepMask mask_from_csv(std::string_view text) {
  struct Row {
    int level;
    std::int64_t position;
    bool kept;
  };
  std::vector<Row> rows;
  int cutoff = 0;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (lineno == 1 && line.find("level") != std::string_view::npos) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw std::runtime_error("mask csv: expected 3 columns at line " +
                               std::to_string(lineno));
    }
    const std::int64_t flag = parse_int(fields[2]);
    if (flag != 0 && flag != 1) {
      throw std::runtime_error("mask csv: kept flag must be 0 or 1 at line " +
                               std::to_string(lineno));
    }
    Row r{static_cast<int>(parse_int(fields[0])), parse_int(fields[1]),
          flag == 1};
    if (r.level < 0 || r.position < 0 ||
        r.position >= CoefficientField::slots(r.level)) {
      throw std::runtime_error("mask csv: index out of range at line " +
                               std::to_string(lineno));
    }
    cutoff = std::max(cutoff, r.level + 1);
    rows.push_back(r);
  }
  KeepMask mask(cutoff);
  for (const auto& r : rows) mask.set(r.level, r.position, r.kept);
  return mask;
}

inline void write_mask_csv(const std::filesystem::path& path,
                           const KeepMask& mask) {
  write_file_atomic(path, mask_to_csv(mask));
}

inline KeepMask read_mask_csv(const std::filesystem::path& path) {
  return mask_from_csv(read_file(path));
}

//! Pointwise adaptive reconstruction on the dyadic grid t_i = i * 2^-j_lambda
//! (Haar only). At each t the finest level j is selected whose subtree
//! maximum along t's chain stays at or below the threshold, and the partial
//! sum up to that level is evaluated at t.
inline std::vector<double> lepski_haar(const CoefficientField& y,
                                       const NoiseConfig& config,
                                       const WaveletBasis& basis) {
  if (basis.family() != WaveletFamily::haar) {
    throw std::invalid_argument("lepski_haar: only the Haar basis is allowed");
  }
  const int depth = detail::estimator_depth(y, config);
  const double lam = config.threshold();
  const std::size_t n = std::size_t{1} << depth;
  const CoefficientField scope_max = subtree_abs_max(y, depth);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // chain of dyadic intervals containing t_i, coarse to fine
    double value = y.at(-1, 0);
    for (int j = 0; j < depth; ++j) {
      const std::int64_t k = static_cast<std::int64_t>(i >> (depth - j));
      if (scope_max.at(j, k) <= lam) break;  // j is admissible: stop here
      // t_i lies in the left half of interval (j, k) iff the next finer
      // bit of i is 0; the step function contributes +/- 2^(j/2)
      const bool left = ((i >> (depth - j - 1)) & 1) == 0;
      const double psi = std::exp2(0.5 * j) * (left ? 1.0 : -1.0);
      value += y.at(j, k) * psi;
    }
    out[i] = value;
  }
  return out;
}

}  // namespace wavetree
