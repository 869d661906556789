#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"

#include <span>
#include <variant>
#include <vector>

namespace defence {

/// Parameters of one oriented Gabor filter
///   g(x, y) = exp(-(x'^2 + gamma^2 y'^2) / (2 sigma^2)) cos(2 pi x' / lambda + psi)
/// with x' = x cos(theta) + y sin(theta), y' = -x sin(theta) + y cos(theta).
/// Image coordinates: x grows to the right, y grows downwards.
struct GaborParams {
    double wavelength = 4.0;       ///< lambda, pixels, > 1
    double orientation_deg = 0.0;  ///< theta, normalized into [0, 360)
    double phase = 0.0;            ///< psi, radians
    double sigma = 4.0;            ///< envelope standard deviation, pixels
    double aspect = 0.5;           ///< gamma, spatial aspect ratio

    /// Throws InvalidArgument on out-of-range values; returns a copy with the
    /// orientation wrapped into [0, 360).
    GaborParams validated() const;
};

/// Raw samples of the Gabor function on a square grid of side
/// 2 * ceil(3 sigma / min(1, gamma)) + 1. No DC correction.
Kernel2D gabor_kernel(const GaborParams& p);

/// Kernel minus its tap mean, so constant regions respond with zero.
Kernel2D zero_mean(const Kernel2D& k);

struct OtsuThreshold {};
struct FixedThreshold {
    double value;  ///< on the normalized response scale [0, 1]
};
using ThresholdRule = std::variant<OtsuThreshold, FixedThreshold>;

struct GaborDetectOptions {
    std::vector<double> thetas_deg{45.0, 225.0};
    GaborParams base{};
    ThresholdRule threshold = OtsuThreshold{};
    int dilate_iters = 1;
    /// Split the pixels around strong responses into two intensity classes and
    /// keep the minority class as fence. Disable to get the raw thresholded
    /// response band.
    bool refine_by_intensity = true;
};

/// Per-pixel max over orientations of |gray * zero_mean(gabor_kernel(theta))|,
/// each orientation scaled by 1 / (255 * sum|taps|) so values lie in [0, 1].
ImagePlane gabor_response(const ImagePlane& gray, std::span<const double> thetas_deg,
                          const GaborParams& base);

/// Otsu's threshold over a `bins`-bin histogram spanning [lo, hi]. Returns the
/// upper edge of the last bin of the lower class; returns `hi` when the
/// histogram has no between-class variance (single populated bin).
double otsu_threshold(std::span<const double> values, double lo, double hi, int bins = 256);

FenceMask detect_fence_gabor(const ImagePlane& gray, const GaborDetectOptions& opts);

}  // namespace defence
