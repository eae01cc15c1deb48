#pragma once

// Umbrella header: tree-structured wavelet thresholding toolkit.

#include "wavetree/coefficients.hpp"
#include "wavetree/csv.hpp"
#include "wavetree/dyadic.hpp"
#include "wavetree/estimators.hpp"
#include "wavetree/noise.hpp"
#include "wavetree/risk.hpp"
#include "wavetree/spaces.hpp"
#include "wavetree/wavelet.hpp"
