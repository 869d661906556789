#pragma once

#include "defence/image.hpp"

namespace defence {

/// Reported in place of +inf when the two images are identical.
inline constexpr double kPsnrCapDb = 120.0;

/// 10 log10(255^2 / MSE), capped at kPsnrCapDb.
double psnr(const ImagePlane& ref, const ImagePlane& test);

/// Mean SSIM over all positions where an 11x11 Gaussian window (sigma 1.5)
/// fits entirely inside the image. K1 = 0.01, K2 = 0.03, dynamic range 255.
double ssim(const ImagePlane& ref, const ImagePlane& test);

double mean_squared_error(const ImagePlane& ref, const ImagePlane& test);

}  // namespace defence
