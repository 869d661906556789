#include "defence/metrics.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace defence {

namespace {

constexpr double kDynamicRange = 255.0;
constexpr double kSsimSigma = 1.5;
constexpr int kSsimWindow = 11;

void require_same_shape(const ImagePlane& a, const ImagePlane& b) {
    if (!a.same_shape(b)) {
        throw InvalidArgument("image dimensions differ: " + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                              "x" + std::to_string(b.height()));
    }
}

// Separable 'valid' filtering: output is (w - n + 1) x (h - n + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& taps) {
    const int n = static_cast<int>(taps.size());
    const int ow = w - n + 1;
    const int oh = h - n + 1;
    std::vector<double> rows(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * src[static_cast<std::size_t>(y) * w + x + k];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

}  // namespace

double mean_squared_error(const ImagePlane& ref, const ImagePlane& test) {
    require_same_shape(ref, test);
    const auto a = ref.values();
    const auto b = test.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const ImagePlane& ref, const ImagePlane& test) {
    const double mse = mean_squared_error(ref, test);
    if (mse == 0.0) return kPsnrCapDb;
    return std::min(kPsnrCapDb, 10.0 * std::log10(kDynamicRange * kDynamicRange / mse));
}

double ssim(const ImagePlane& ref, const ImagePlane& test) {
    require_same_shape(ref, test);
    if (ref.width() < kSsimWindow || ref.height() < kSsimWindow) {
        throw InvalidArgument("SSIM needs images of at least 11x11 pixels");
    }
    const int w = ref.width();
    const int h = ref.height();
    const auto taps = gaussian_taps(kSsimSigma);

    const std::vector<double>& x = ref.vector();
    const std::vector<double>& y = test.vector();
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h, taps);
    const auto my = filter_valid(y, w, h, taps);
    const auto sxx = filter_valid(xx, w, h, taps);
    const auto syy = filter_valid(yy, w, h, taps);
    const auto sxy = filter_valid(xy, w, h, taps);

    const double c1 = (0.01 * kDynamicRange) * (0.01 * kDynamicRange);
    const double c2 = (0.03 * kDynamicRange) * (0.03 * kDynamicRange);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        acc += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return acc / static_cast<double>(mx.size());
}

}  // namespace defence
