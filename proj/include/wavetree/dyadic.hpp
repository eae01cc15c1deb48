#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wavetree/coefficients.hpp"
#include "wavetree/noise.hpp"

namespace wavetree {

//! Node (j, k) of the dyadic tree: level j >= 0, position k in [0, 2^j).
struct DyadicNode {
  int level = 0;
  std::int64_t position = 0;

  DyadicNode parent() const {
    if (level < 1) {
      throw std::logic_error("DyadicNode::parent: level 0 has no parent");
    }
    return {level - 1, position / 2};
  }
  DyadicNode left_child() const { return {level + 1, 2 * position}; }
  DyadicNode right_child() const { return {level + 1, 2 * position + 1}; }

  friend bool operator==(const DyadicNode&, const DyadicNode&) = default;
};

inline void check_node(const DyadicNode& node) {
  if (node.level < 0 || node.position < 0 ||
      node.position >= CoefficientField::slots(node.level)) {
    throw std::invalid_argument("invalid dyadic node");
  }
}

//! Descendants of a root node (root included) at levels below a cutoff:
//! at level j' the positions are [k * 2^(j'-j), (k+1) * 2^(j'-j)).
//! Members are enumerated lazily, level-major, positions ascending.
class TreeScope {
 public:
  TreeScope(DyadicNode root, int cutoff_level)
      : root_(root), cutoff_(cutoff_level) {
    check_node(root);
    if (root.level >= cutoff_level) {
      throw std::invalid_argument("TreeScope: root level at or beyond cutoff");
    }
  }

  DyadicNode root() const { return root_; }
  int cutoff_level() const { return cutoff_; }

  std::int64_t first_position(int level) const {
    return root_.position << (level - root_.level);
  }
  std::int64_t last_position(int level) const {
    return ((root_.position + 1) << (level - root_.level)) - 1;
  }
  std::int64_t count_at(int level) const {
    return std::int64_t{1} << (level - root_.level);
  }

  class iterator {
   public:
    iterator(const TreeScope* scope, int level)
        : scope_(scope), node_{level, 0} {
      if (level < scope_->cutoff_) {
        node_.position = scope_->first_position(level);
      }
    }

    DyadicNode operator*() const { return node_; }

    iterator& operator++() {
      if (node_.position < scope_->last_position(node_.level)) {
        ++node_.position;
      } else {
        ++node_.level;
        if (node_.level < scope_->cutoff_) {
          node_.position = scope_->first_position(node_.level);
        } else {
          node_.position = 0;
        }
      }
      return *this;
    }

    friend bool operator==(const iterator& a, const iterator& b) {
      return a.node_.level == b.node_.level &&
             (a.node_.level >= a.scope_->cutoff_level() ||
              a.node_.position == b.node_.position);
    }

   private:
    const TreeScope* scope_;
    DyadicNode node_;
  };

  iterator begin() const { return iterator(this, root_.level); }
  iterator end() const { return iterator(this, cutoff_); }

 private:
  DyadicNode root_;
  int cutoff_;
};

//! Scope of a node for a given threshold: descendants down to max_scale.
inline TreeScope scope(DyadicNode root, double lambda, double eta) {
  return TreeScope(root, max_scale(lambda, eta));
}

//! Chain from the node up to level 0, node itself first.
inline std::vector<DyadicNode> ancestors(DyadicNode node) {
  check_node(node);
  std::vector<DyadicNode> chain;
  chain.reserve(static_cast<std::size_t>(node.level) + 1);
  chain.push_back(node);
  while (chain.back().level > 0) chain.push_back(chain.back().parent());
  return chain;
}

//! Largest |coefficient| over the scope of root. Stops early once the
//! running maximum exceeds early_exit_above (the exact maximum is then not
//! needed by any caller, only the comparison's outcome).
inline double tree_max(const CoefficientField& field, DyadicNode root,
                       double lambda, double eta,
                       double early_exit_above =
                           std::numeric_limits<double>::infinity()) {
  TreeScope sc = scope(root, lambda, eta);
  if (field.max_level() < sc.cutoff_level()) {
    throw std::invalid_argument("tree_max: field shallower than scope");
  }
  double best = 0.0;
  for (int j = root.level; j < sc.cutoff_level(); ++j) {
    auto vals = field.level_values(j);
    const std::int64_t lo = sc.first_position(j);
    const std::int64_t hi = sc.last_position(j);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double a = std::abs(vals[static_cast<std::size_t>(k)]);
      if (a > best) {
        best = a;
        if (best > early_exit_above) return best;
      }
    }
  }
  return best;
}

//! All subtree maxima at once: result (j, k) holds the largest |coefficient|
//! over descendants of (j, k) below cutoff_level, computed bottom-up.
//! The scaling slot of the result is unused (zero).
inline CoefficientField subtree_abs_max(const CoefficientField& field,
                                        int cutoff_level) {
  if (cutoff_level < 0 || cutoff_level > field.max_level()) {
    throw std::invalid_argument("subtree_abs_max: bad cutoff_level");
  }
  CoefficientField out(cutoff_level);
  for (int j = cutoff_level - 1; j >= 0; --j) {
    auto src = field.level_values(j);
    auto dst = out.level_values(j);
    for (std::size_t k = 0; k < dst.size(); ++k) {
      double m = std::abs(src[k]);
      if (j + 1 < cutoff_level) {
        auto below = out.level_values(j + 1);
        m = std::max(m, std::max(below[2 * k], below[2 * k + 1]));
      }
      dst[k] = m;
    }
  }
  return out;
}

}  // namespace wavetree
