#pragma once

#include <defence/fence_mask.hpp>
#include <defence/image.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace defence::support {

inline ImagePlane random_plane(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 255.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ImagePlane p(w, h);
    for (double& v : p.values()) v = u(rng);
    return p;
}

/// Smooth band-limited texture defined for any real (x, y), so translated
/// copies can be evaluated exactly.
class Texture {
public:
    explicit Texture(std::uint64_t seed, int waves = 14) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> wavelength(7.0, 32.0);
        for (int i = 0; i < waves; ++i) {
            const double a = angle(rng);
            const double k = 2.0 * std::numbers::pi / wavelength(rng);
            waves_.push_back({k * std::cos(a), k * std::sin(a), angle(rng)});
        }
    }

    double operator()(double x, double y) const {
        double s = 0.0;
        for (const auto& w : waves_) s += std::sin(w.kx * x + w.ky * y + w.phase);
        return 128.0 + 90.0 * s / std::sqrt(static_cast<double>(waves_.size()) * 0.5) / 2.5;
    }

    /// Image with img(p) = texture(p - shift).
    ImagePlane render(int w, int h, double dx = 0.0, double dy = 0.0) const {
        ImagePlane p(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) p(x, y) = std::clamp((*this)(x - dx, y - dy), 0.0, 255.0);
        }
        return p;
    }

private:
    struct Wave {
        double kx, ky, phase;
    };
    std::vector<Wave> waves_;
};

/// Direct replicate-boundary convolution out(p) = sum_q k(q) img(p - q).
inline ImagePlane brute_convolve(const ImagePlane& img, const Kernel2D& k) {
    ImagePlane out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int dy = -k.radius_y(); dy <= k.radius_y(); ++dy) {
                for (int dx = -k.radius_x(); dx <= k.radius_x(); ++dx) {
                    const int sx = std::clamp(x - dx, 0, img.width() - 1);
                    const int sy = std::clamp(y - dy, 0, img.height() - 1);
                    acc += k.at(dx, dy) * img(sx, sy);
                }
            }
            out(x, y) = acc;
        }
    }
    return out;
}

/// SSIM computed window by window with explicitly evaluated Gaussian weights.
inline double naive_ssim(const ImagePlane& a, const ImagePlane& b) {
    constexpr int kSide = 11;
    constexpr double kSigma = 1.5;
    double wts[kSide][kSide];
    double total = 0.0;
    for (int j = 0; j < kSide; ++j) {
        for (int i = 0; i < kSide; ++i) {
            const double dx = i - 5, dy = j - 5;
            wts[j][i] = std::exp(-(dx * dx + dy * dy) / (2 * kSigma * kSigma));
            total += wts[j][i];
        }
    }
    const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double sum = 0.0;
    int count = 0;
    for (int y = 0; y + kSide <= a.height(); ++y) {
        for (int x = 0; x + kSide <= a.width(); ++x) {
            double ma = 0, mb = 0;
            for (int j = 0; j < kSide; ++j) {
                for (int i = 0; i < kSide; ++i) {
                    ma += wts[j][i] / total * a(x + i, y + j);
                    mb += wts[j][i] / total * b(x + i, y + j);
                }
            }
            double va = 0, vb = 0, cov = 0;
            for (int j = 0; j < kSide; ++j) {
                for (int i = 0; i < kSide; ++i) {
                    const double w = wts[j][i] / total;
                    va += w * (a(x + i, y + j) - ma) * (a(x + i, y + j) - ma);
                    vb += w * (b(x + i, y + j) - mb) * (b(x + i, y + j) - mb);
                    cov += w * (a(x + i, y + j) - ma) * (b(x + i, y + j) - mb);
                }
            }
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return sum / count;
}

/// Bars of `width` px every `period` px. Vertical bars when `vertical`.
inline FenceMask stripe_truth(int w, int h, int period, int width, bool vertical, int offset = 0) {
    FenceMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int c = ((vertical ? x : y) - offset) % period;
            if ((c + period) % period < width) m.set_fence(x, y);
        }
    }
    return m;
}

/// Paints fence pixels of `truth` with `fence` over the background.
inline ImagePlane paint(const FenceMask& truth, const ImagePlane& background, double fence) {
    ImagePlane out = background;
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            if (truth.fence(x, y)) out(x, y) = fence;
        }
    }
    return out;
}

inline double mean_endpoint_error(const ImagePlane& u, const ImagePlane& v, double tu, double tv, int border) {
    double s = 0.0;
    int n = 0;
    for (int y = border; y < u.height() - border; ++y) {
        for (int x = border; x < u.width() - border; ++x) {
            s += std::hypot(u(x, y) - tu, v(x, y) - tv);
            ++n;
        }
    }
    return s / n;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("defence_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace defence::support
