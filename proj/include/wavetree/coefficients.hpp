#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavetree {

// Index of a single coefficient. Level -1 holds scaling coefficients,
// levels j >= 0 hold detail coefficients (2^j slots under periodization).
struct CoefIndex {
  int level = -1;
  std::int64_t position = 0;

  friend bool operator==(const CoefIndex&, const CoefIndex&) = default;
};

//! Doubly-indexed coefficient array over levels -1 .. max_level-1.
//! Values are plain doubles; the container is dense (one slot per index).
class CoefficientField {
 public:
  explicit CoefficientField(int max_level) {
    if (max_level < 0) {
      throw std::invalid_argument("CoefficientField: max_level must be >= 0");
    }
    levels_.resize(static_cast<std::size_t>(max_level) + 1);
    levels_[0].assign(1, 0.0);  // scaling level
    for (int j = 0; j < max_level; ++j) {
      levels_[static_cast<std::size_t>(j) + 1].assign(
          static_cast<std::size_t>(slots(j)), 0.0);
    }
  }

  //! Slot count per level: 1 at level -1, 2^j at detail level j.
  static std::int64_t slots(int level) {
    if (level < -1 || level >= 62) {
      throw std::invalid_argument("slots: level out of range");
    }
    return level == -1 ? 1 : (std::int64_t{1} << level);
  }

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }

  double at(int level, std::int64_t position) const {
    check_index(level, position);
    return levels_[static_cast<std::size_t>(level + 1)]
                  [static_cast<std::size_t>(position)];
  }

  void set(int level, std::int64_t position, double value) {
    check_index(level, position);
    levels_[static_cast<std::size_t>(level + 1)]
           [static_cast<std::size_t>(position)] = value;
  }

  std::span<const double> level_values(int level) const {
    check_level(level);
    return levels_[static_cast<std::size_t>(level + 1)];
  }

  std::span<double> level_values(int level) {
    check_level(level);
    return levels_[static_cast<std::size_t>(level + 1)];
  }

  //! Zero-extended copy with new_max_level >= max_level().
  CoefficientField padded(int new_max_level) const {
    if (new_max_level < max_level()) {
      throw std::invalid_argument("padded: new_max_level shrinks the field");
    }
    CoefficientField out(new_max_level);
    for (int j = -1; j < max_level(); ++j) {
      auto src = level_values(j);
      auto dst = out.level_values(j);
      std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
  }

  //! Copy keeping only levels below new_max_level.
  CoefficientField truncated(int new_max_level) const {
    if (new_max_level < 0 || new_max_level > max_level()) {
      throw std::invalid_argument("truncated: bad new_max_level");
    }
    CoefficientField out(new_max_level);
    for (int j = -1; j < new_max_level; ++j) {
      auto src = level_values(j);
      auto dst = out.level_values(j);
      std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
  }

  CoefficientField scaled(double c) const {
    CoefficientField out = *this;
    for (auto& lv : out.levels_) {
      for (auto& v : lv) v *= c;
    }
    return out;
  }

  friend CoefficientField operator-(const CoefficientField& a,
                                    const CoefficientField& b) {
    if (a.max_level() != b.max_level()) {
      throw std::invalid_argument("field subtraction: layout mismatch");
    }
    CoefficientField out = a;
    for (std::size_t j = 0; j < out.levels_.size(); ++j) {
      for (std::size_t k = 0; k < out.levels_[j].size(); ++k) {
        out.levels_[j][k] -= b.levels_[j][k];
      }
    }
    return out;
  }

  friend bool operator==(const CoefficientField&,
                         const CoefficientField&) = default;

 private:
  void check_level(int level) const {
    if (level < -1 || level >= max_level()) {
      throw std::out_of_range("coefficient level out of range: " +
                              std::to_string(level));
    }
  }
  void check_index(int level, std::int64_t position) const {
    check_level(level);
    if (position < 0 || position >= slots(level)) {
      throw std::out_of_range("coefficient position out of range");
    }
  }

  // levels_[0] is level -1, levels_[j+1] is detail level j
  std::vector<std::vector<double>> levels_;
};

inline CoefficientField zero_field(int max_level) {
  return CoefficientField(max_level);
}

//! Energy of levels >= from_level: sum of squared coefficients.
inline double tail_energy(const CoefficientField& field, int from_level) {
  if (from_level < -1) {
    throw std::invalid_argument("tail_energy: from_level must be >= -1");
  }
  double sum = 0.0;
  for (int j = from_level; j < field.max_level(); ++j) {
    for (double v : field.level_values(j)) sum += v * v;
  }
  return sum;
}

inline double squared_norm(const CoefficientField& field) {
  return tail_energy(field, -1);
}

//! Squared l2 distance between two fields of identical layout.
inline double squared_distance(const CoefficientField& a,
                               const CoefficientField& b) {
  if (a.max_level() != b.max_level()) {
    throw std::invalid_argument("squared_distance: layout mismatch");
  }
  double sum = 0.0;
  for (int j = -1; j < a.max_level(); ++j) {
    auto va = a.level_values(j);
    auto vb = b.level_values(j);
    for (std::size_t k = 0; k < va.size(); ++k) {
      const double d = va[k] - vb[k];
      sum += d * d;
    }
  }
  return sum;
}

}  // namespace wavetree
