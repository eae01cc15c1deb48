#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavetree/coefficients.hpp"

namespace wavetree {

enum class WaveletFamily { haar, daubechies };

namespace detail {

// Daubechies extremal-phase lowpass filters, N vanishing moments, 2N taps.
// Generated by spectral factorization at 60-digit precision, rounded to
// nearest double; db1 is the Haar pair.
inline const std::vector<std::vector<double>>& daubechies_lowpass_table() {
  static const std::vector<std::vector<double>> table = {
      {0.70710678118654752,
       0.70710678118654752},  // db1
      {0.48296291314453414,
       0.83651630373780791,
       0.22414386804201338,
       -0.12940952255126038},  // db2
      {0.33267055295008262,
       0.80689150931109258,
       0.45987750211849157,
       -0.13501102001025459,
       -0.085441273882026662,
       0.035226291885709537},  // db3
      {0.23037781330889650,
       0.71484657055291565,
       0.63088076792985891,
       -0.027983769416859854,
       -0.18703481171909308,
       0.030841381835560764,
       0.032883011666885200,
       -0.010597401785069032},  // db4
      {0.16010239797419291,
       0.60382926979718967,
       0.72430852843777293,
       0.13842814590132073,
       -0.24229488706638203,
       -0.032244869584638375,
       0.077571493840045714,
       -0.0062414902127982743,
       -0.012580751999081999,
       0.0033357252854737713},  // db5
      {0.11154074335010946,
       0.49462389039845309,
       0.75113390802109535,
       0.31525035170919763,
       -0.22626469396543982,
       -0.12976686756726194,
       0.097501605587323049,
       0.027522865530305729,
       -0.031582039317486030,
       0.00055384220116149614,
       0.0047772575109455106,
       -0.0010773010853084796},  // db6
      {0.077852054085009179,
       0.39653931948191731,
       0.72913209084623512,
       0.46978228740519312,
       -0.14390600392856498,
       -0.22403618499387498,
       0.071309219266830265,
       0.080612609151083072,
       -0.038029936935014414,
       -0.016574541630666881,
       0.012550998556099841,
       0.00042957797292136652,
       -0.0018016407040474909,
       0.00035371379997452025},  // db7
      {0.054415842243104010,
       0.31287159091429997,
       0.67563073629728981,
       0.58535468365420671,
       -0.015829105256349306,
       -0.28401554296154693,
       0.00047248457391328277,
       0.12874742662047846,
       -0.017369301001807546,
       -0.044088253930794752,
       0.013981027917398282,
       0.0087460940474057767,
       -0.0048703529934515743,
       -0.00039174037337694705,
       0.00067544940645056937,
       -0.00011747678412476953},  // db8
      {0.038077947363878347,
       0.24383467461259035,
       0.60482312369011111,
       0.65728807805130054,
       0.13319738582500758,
       -0.29327378327917491,
       -0.096840783222976461,
       0.14854074933810638,
       0.030725681479333379,
       -0.067632829061329974,
       0.00025094711483145196,
       0.022361662123679097,
       -0.0047232047577513973,
       -0.0042815036824634298,
       0.0018476468830562265,
       0.00023038576352319597,
       -0.00025196318894271014,
       3.9347320316271599e-5},  // db9
      {0.026670057900555554,
       0.18817680007769149,
       0.52720118893172559,
       0.68845903945360357,
       0.28117234366057746,
       -0.24984642432731538,
       -0.19594627437737704,
       0.12736934033579326,
       0.093057364603572351,
       -0.071394147166397087,
       -0.029457536821875813,
       0.033212674059341002,
       0.0036065535669561697,
       -0.010733175483330575,
       0.0013953517470529012,
       0.0019924052951850561,
       -0.00068585669495971163,
       -0.00011646685512928545,
       9.3588670320069591e-5,
       -1.3264202894521245e-5},  // db10
  };
  return table;
}

}  // namespace detail

//! Orthonormal wavelet filter pair used by the periodized transform.
class WaveletBasis {
 public:
  static WaveletBasis haar() {
    return WaveletBasis(WaveletFamily::haar, 1, "haar");
  }

  static WaveletBasis daubechies(int vanishing_moments) {
    if (vanishing_moments < 1 || vanishing_moments > 10) {
      throw std::invalid_argument(
          "daubechies: vanishing moments must be in 1..10");
    }
    return WaveletBasis(WaveletFamily::daubechies, vanishing_moments,
                        "db" + std::to_string(vanishing_moments));
  }

  //! Accepts "haar" or "dbN" with N in 1..10.
  static WaveletBasis from_name(std::string_view name) {
    if (name == "haar") return haar();
    if (name.size() >= 3 && name.substr(0, 2) == "db") {
      int n = 0;
      bool ok = true;
      for (char c : name.substr(2)) {
        if (c < '0' || c > '9') {
          ok = false;
          break;
        }
        n = n * 10 + (c - '0');
      }
      if (ok && n >= 1 && n <= 10) return daubechies(n);
    }
    throw std::invalid_argument("unknown basis name: " + std::string(name));
  }

  WaveletFamily family() const { return family_; }
  int vanishing_moments() const { return vanishing_moments_; }
  const std::string& name() const { return name_; }
  std::span<const double> lowpass() const { return lowpass_; }
  std::span<const double> highpass() const { return highpass_; }
  std::size_t filter_length() const { return lowpass_.size(); }

 private:
  WaveletBasis(WaveletFamily family, int vm, std::string name)
      : family_(family), vanishing_moments_(vm), name_(std::move(name)) {
    lowpass_ = detail::daubechies_lowpass_table()[vm - 1];
    // Quadrature mirror: g_i = (-1)^i h_{L-1-i}. For Haar this makes the
    // detail at the finest step (even - odd)/sqrt(2).
    const std::size_t L = lowpass_.size();
    highpass_.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      highpass_[i] = sign * lowpass_[L - 1 - i];
    }
  }

  WaveletFamily family_;
  int vanishing_moments_;
  std::string name_;
  std::vector<double> lowpass_;
  std::vector<double> highpass_;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) {
  return n > 0 && (n & (n - 1)) == 0;
}

inline int log2_exact(std::size_t n) {
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

// One analysis step with circular (periodized) indexing. len must be even.
inline void analysis_step(std::span<const double> work, std::size_t len,
                          const WaveletBasis& basis, std::span<double> approx,
                          std::span<double> detail_out) {
  const auto h = basis.lowpass();
  const auto g = basis.highpass();
  const std::size_t half = len / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double x = work[(2 * k + i) % len];
      a += h[i] * x;
      d += g[i] * x;
    }
    approx[k] = a;
    detail_out[k] = d;
  }
}

inline void synthesis_step(std::span<const double> approx,
                           std::span<const double> detail_in, std::size_t len,
                           const WaveletBasis& basis, std::span<double> out) {
  const auto h = basis.lowpass();
  const auto g = basis.highpass();
  for (std::size_t i = 0; i < len; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < len / 2; ++k) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      const std::size_t idx = (2 * k + i) % len;
      out[idx] += h[i] * approx[k] + g[i] * detail_in[k];
    }
  }
}

}  // namespace detail

//! Full periodized decomposition of a power-of-two sample vector, scaled so
//! the coefficient field's squared norm equals the mean-square sample energy.
inline CoefficientField analyze(std::span<const double> samples,
                                const WaveletBasis& basis) {
  const std::size_t n = samples.size();
  if (!detail::is_power_of_two(n)) {
    throw std::invalid_argument("analyze: sample count must be a power of two");
  }
  if (n > 1 && n < basis.filter_length()) {
    throw std::invalid_argument(
        "analyze: sample count shorter than the filter");
  }
  const int max_level = detail::log2_exact(n);
  CoefficientField field(max_level);

  std::vector<double> work(samples.begin(), samples.end());
  std::vector<double> approx(n / 2), det(n / 2);
  std::size_t len = n;
  int level = max_level - 1;
  while (len > 1) {
    detail::analysis_step(work, len, basis, approx, det);
    auto dst = field.level_values(level);
    std::copy(det.begin(), det.begin() + static_cast<std::ptrdiff_t>(len / 2),
              dst.begin());
    std::copy(approx.begin(),
              approx.begin() + static_cast<std::ptrdiff_t>(len / 2),
              work.begin());
    len /= 2;
    --level;
  }
  field.set(-1, 0, work[0]);

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = -1; j < max_level; ++j) {
    for (auto& v : field.level_values(j)) v *= scale;
  }
  return field;
}

//! Inverse of analyze: reconstructs the 2^max_level sample vector.
inline std::vector<double> synthesize(const CoefficientField& field,
                                      const WaveletBasis& basis) {
  const int max_level = field.max_level();
  const std::size_t n = std::size_t{1} << max_level;
  if (n > 1 && n < basis.filter_length()) {
    throw std::invalid_argument(
        "synthesize: field too shallow for the filter");
  }
  const double scale = std::sqrt(static_cast<double>(n));

  std::vector<double> work(n, 0.0);
  work[0] = field.at(-1, 0) * scale;
  std::vector<double> approx(n), det(n), next(n);
  std::size_t len = 1;
  for (int level = 0; level < max_level; ++level) {
    auto dv = field.level_values(level);
    for (std::size_t k = 0; k < len; ++k) {
      approx[k] = work[k];
      det[k] = dv[k] * scale;
    }
    detail::synthesis_step(approx, det, 2 * len, basis, next);
    std::copy(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(2 * len),
              work.begin());
    len *= 2;
  }
  work.resize(n);
  return work;
}

}  // namespace wavetree
