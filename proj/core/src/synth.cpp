#include "defence/synth.hpp"

#include "defence/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace defence {

void SynthConfig::validate(int width, int height) const {
    if (shifts.empty()) throw InvalidArgument("synth: at least one shift is required");
    if (shifts.front().dx != 0.0 || shifts.front().dy != 0.0) {
        throw InvalidArgument("synth: the first shift must be (0,0), the reference frame");
    }
    for (const auto& s : shifts) {
        if (!std::isfinite(s.dx) || !std::isfinite(s.dy)) throw InvalidArgument("synth: non-finite shift");
        if (std::abs(s.dx) >= width || std::abs(s.dy) >= height) {
            throw InvalidArgument("synth: a shift moves the image fully out of frame");
        }
    }
    if (fence_width < 0 || fence_period < 1 || fence_width >= fence_period) {
        throw InvalidArgument("synth: need 0 <= fence width < fence period");
    }
    if (fence_width > 0 && fence_angles.empty()) throw InvalidArgument("synth: no fence angles");
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("synth: noise sigma must be >= 0");
}

FenceMask synth_fence(int width, int height, const SynthConfig& cfg) {
    FenceMask mask(width, height);
    if (cfg.fence_width == 0) return mask;
    const double period = cfg.fence_period;
    for (double angle : cfg.fence_angles) {
        const double rad = angle * std::numbers::pi / 180.0;
        double nx = -std::sin(rad);
        double ny = std::cos(rad);
        // Normals point into the image so the offset counts from the top-left corner.
        if (nx + ny < -1e-12) {
            nx = -nx;
            ny = -ny;
        }
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                // Rounded so axis-aligned bars cover exactly fence_width rows.
                const double t = std::round((x * nx + y * ny - cfg.fence_offset) * 1e9) / 1e9;
                if (t - period * std::floor(t / period) < cfg.fence_width) mask.set_fence(x, y);
            }
        }
    }
    return mask;
}

SynthResult synth_generate(const ColorImage& source, const SynthConfig& cfg) {
    const int w = source.width();
    const int h = source.height();
    cfg.validate(w, h);
    const FenceMask fence = synth_fence(w, h, cfg);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);

    SynthResult out{{}, {}, source};
    for (const auto& s : cfg.shifts) {
        const bool integral = s.dx == std::floor(s.dx) && s.dy == std::floor(s.dy);
        ColorImage frame(w, h);
        for (std::size_t c = 0; c < 3; ++c) {
            const ImagePlane& src = source.channel(c);
            ImagePlane& dst = frame.channel(c);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double sx = x - s.dx;
                    const double sy = y - s.dy;
                    if (sx < 0.0 || sy < 0.0 || sx > w - 1 || sy > h - 1) continue;
                    dst(x, y) = integral ? src(static_cast<int>(sx), static_cast<int>(sy))
                                         : sample_bilinear(src, sx, sy);
                }
            }
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (fence.fence(x, y)) dst(x, y) = cfg.fence_color;
                }
            }
            if (cfg.noise_sigma > 0.0) {
                for (double& v : dst.values()) v += noise(rng);
            }
        }
        out.frames.push_back(std::move(frame));
        out.masks.push_back(fence);
    }
    return out;
}

}  // namespace defence
