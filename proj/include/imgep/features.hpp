#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "imgep/grid.hpp"

namespace imgep::features {

inline constexpr double kVolumeEpsilon = 1e-5;
inline constexpr int kGrayLevels = 32;
inline constexpr int kHaralickCount = 13;
inline constexpr int kBehaviorDims = 9;

using HuMoments = std::array<double, 7>;
using HaralickVector = std::array<double, kHaralickCount>;

// Hu's seven invariants of the grid viewed as a mass density (no transform).
// A grid with total mass <= kVolumeEpsilon yields all zeros.
HuMoments hu_moments_raw(const Grid2D& obs);

// sign(h) * log10(1 + |h| / 1e-30): zero at zero, monotone, compresses magnitude.
double signed_log(double h);

// hu_moments_raw() passed through signed_log().
HuMoments hu_moments(const Grid2D& obs);

// Fraction of cells strictly above eps.
double volume(const Grid2D& obs, double eps = kVolumeEpsilon);

double mean_pixel(const Grid2D& obs);

// Haralick features 1-13 from symmetric normalized GLCMs at distance 1 over the
// four offsets 0/45/90/135 degrees (wrapping), averaged. Values are clipped to
// [0, 1] and quantized to 32 levels.
//
// Order: ASM, contrast, correlation, sum of squares variance, inverse difference
// moment, sum average, sum variance, sum entropy, entropy, difference variance,
// difference entropy, IMC1, IMC2. Entropies use log2. Degenerate (zero-variance)
// correlation is reported as 1, degenerate IMC1 as 0.
HaralickVector haralick13(const Grid2D& obs);

// Haralick features of a single precomputed co-occurrence matrix (levels x levels,
// row-major, need not be normalized). Exposed for tests.
HaralickVector haralick_from_glcm(const std::vector<double>& glcm, int levels);

// Symmetric normalized co-occurrence matrix for a single offset.
std::vector<double> glcm(const Grid2D& obs, int dx, int dy, int levels = kGrayLevels);

struct Tamura {
    double coarseness = 0.0;
    double contrast = 0.0;
    double directionality = 0.0;
};

// Coarseness: mean best window size 2^k over k = 1..5 (largest averaged-window
// difference, horizontal or vertical). Contrast: sigma / kurtosis^(1/4), 0 for a
// constant image. Directionality: 1 - normalized second moment of a 16-bin
// edge-orientation histogram around its peak, in [0, 1]; 0 when no edges.
Tamura tamura_features(const Grid2D& obs);

// 7 signed-log Hu invariants, mean pixel value, volume.
struct BehaviorVector {
    HuMoments hu{};
    double mean_pixel = 0.0;
    double volume = 0.0;

    std::array<double, kBehaviorDims> to_array() const;
    static BehaviorVector from_array(const std::array<double, kBehaviorDims>& values);
};

BehaviorVector behavior(const Grid2D& obs);

struct ConstraintFeatures {
    double volume = 0.0;
    double mean_pixel = 0.0;
    double tamura_coarseness = 0.0;
    double tamura_contrast = 0.0;
    double tamura_directionality = 0.0;

    // Throws UnknownFeature for names outside the five fields above.
    double get(std::string_view name) const;
    static const std::array<std::string_view, 5>& names();
};

ConstraintFeatures constraint_features(const Grid2D& obs);

}  // namespace imgep::features
