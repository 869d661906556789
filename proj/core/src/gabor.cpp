#include "defence/gabor.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace defence {

namespace {

double normalized_threshold(const ImagePlane& response, const ThresholdRule& rule) {
    if (const auto* fixed = std::get_if<FixedThreshold>(&rule)) return fixed->value;
    return otsu_threshold(response.values(), 0.0, 1.0);
}

}  // namespace

GaborParams GaborParams::validated() const {
    if (!(wavelength > 1.0) || !std::isfinite(wavelength)) {
        throw InvalidArgument("gabor wavelength must be > 1, got " + std::to_string(wavelength));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gabor sigma must be > 0, got " + std::to_string(sigma));
    }
    if (!(aspect > 0.0) || !std::isfinite(aspect)) {
        throw InvalidArgument("gabor aspect ratio must be > 0, got " + std::to_string(aspect));
    }
    if (!std::isfinite(orientation_deg) || !std::isfinite(phase)) {
        throw InvalidArgument("gabor orientation and phase must be finite");
    }
    GaborParams out = *this;
    out.orientation_deg = std::fmod(orientation_deg, 360.0);
    if (out.orientation_deg < 0.0) out.orientation_deg += 360.0;
    return out;
}

Kernel2D gabor_kernel(const GaborParams& params) {
    const GaborParams p = params.validated();
    const int r = static_cast<int>(std::ceil(3.0 * p.sigma / std::min(1.0, p.aspect)));
    const int n = 2 * r + 1;
    const double theta = p.orientation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    std::vector<double> taps(static_cast<std::size_t>(n) * n);
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double xp = x * c + y * s;
            const double yp = -x * s + y * c;
            const double envelope =
                std::exp(-(xp * xp + p.aspect * p.aspect * yp * yp) / (2.0 * p.sigma * p.sigma));
            taps[static_cast<std::size_t>(y + r) * n + (x + r)] =
                envelope * std::cos(2.0 * std::numbers::pi * xp / p.wavelength + p.phase);
        }
    }
    return Kernel2D(n, n, std::move(taps));
}

Kernel2D zero_mean(const Kernel2D& k) {
    const double mean = k.sum() / static_cast<double>(k.taps().size());
    std::vector<double> taps(k.taps().begin(), k.taps().end());
    for (auto& t : taps) t -= mean;
    return Kernel2D(k.width(), k.height(), std::move(taps));
}

ImagePlane gabor_response(const ImagePlane& gray, std::span<const double> thetas_deg,
                          const GaborParams& base) {
    if (thetas_deg.empty()) throw InvalidArgument("at least one gabor orientation is required");
    ImagePlane fused(gray.width(), gray.height());
    for (double theta : thetas_deg) {
        GaborParams p = base;
        p.orientation_deg = theta;
        const Kernel2D k = zero_mean(gabor_kernel(p));
        double l1 = 0.0;
        for (double t : k.taps()) l1 += std::abs(t);
        const double scale = 1.0 / (255.0 * l1);
        const ImagePlane r = convolve(gray, k);
        auto out = fused.values();
        const auto in = r.values();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], std::abs(in[i]) * scale);
    }
    return fused;
}

double otsu_threshold(std::span<const double> values, double lo, double hi, int bins) {
    if (bins < 2 || !(hi > lo)) throw InvalidArgument("otsu needs bins >= 2 and hi > lo");
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    const double width = (hi - lo) / bins;
    for (double v : values) {
        const int b = std::clamp(static_cast<int>((v - lo) / width), 0, bins - 1);
        hist[static_cast<std::size_t>(b)] += 1.0;
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int b = 0; b < bins; ++b) sum_all += b * hist[static_cast<std::size_t>(b)];

    double w0 = 0.0;
    double sum0 = 0.0;
    double best = 0.0;
    int best_bin = -1;
    for (int b = 0; b < bins - 1; ++b) {
        w0 += hist[static_cast<std::size_t>(b)];
        sum0 += b * hist[static_cast<std::size_t>(b)];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_bin = b;
        }
    }
    if (best_bin < 0) return hi;
    return lo + (best_bin + 1) * width;
}

FenceMask detect_fence_gabor(const ImagePlane& gray, const GaborDetectOptions& opts) {
    if (opts.thetas_deg.empty()) throw InvalidArgument("at least one gabor orientation is required");
    if (opts.dilate_iters < 0) throw InvalidArgument("dilation iterations must be non-negative");
    const ImagePlane response = gabor_response(gray, opts.thetas_deg, opts.base.validated());
    const double t = normalized_threshold(response, opts.threshold);

    const int w = gray.width();
    const int h = gray.height();
    FenceMask candidates(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (response(x, y) > t) candidates.set_fence(x, y);
        }
    }
    if (!opts.refine_by_intensity || candidates.fence_count() == 0) {
        return dilate(candidates, opts.dilate_iters);
    }

    // The band of strong response straddles the fence and the ringing on both
    // sides of it. Split the band by intensity; fences are assumed thinner
    // than the openings between them, so the smaller class is the fence.
    const FenceMask band = dilate(candidates, 2);
    std::vector<double> band_values;
    band_values.reserve(band.fence_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (band.fence(x, y)) band_values.push_back(gray(x, y));
        }
    }
    const double split = otsu_threshold(band_values, 0.0, 255.0);
    if (split >= 255.0) return dilate(band, opts.dilate_iters);  // flat band, nothing to split
    const auto dark = static_cast<std::size_t>(
        std::count_if(band_values.begin(), band_values.end(), [&](double v) { return v <= split; }));
    const bool fence_is_dark = dark <= band_values.size() - dark;

    FenceMask refined(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!band.fence(x, y)) continue;
            const bool is_dark = gray(x, y) <= split;
            if (is_dark == fence_is_dark) refined.set_fence(x, y);
        }
    }
    return dilate(refined, opts.dilate_iters);
}

}  // namespace defence
