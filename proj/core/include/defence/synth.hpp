#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"
#include "defence/motion.hpp"

#include <cstdint>
#include <vector>

namespace defence {

struct SynthConfig {
    /// Scene translation per frame; the first entry is the reference (0, 0).
    /// Frame m shows source(p - shift_m).
    std::vector<GlobalShift> shifts{{0, 0}, {-8, -8}, {8, 8}, {15, 15}};
    int fence_width = 7;
    int fence_period = 48;
    /// Bar directions in degrees; 0 runs along x, 90 along y.
    std::vector<double> fence_angles{0.0, 90.0};
    /// Distance of the first bar from the origin, along each bar normal.
    double fence_offset = 24.0;
    double fence_color = 128.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;

    void validate(int width, int height) const;
};

struct SynthResult {
    std::vector<ColorImage> frames;
    std::vector<FenceMask> masks;  ///< exactly the overlaid fence pixels
    ColorImage truth;
};

/// Fence pattern in frame coordinates; identical for every frame.
FenceMask synth_fence(int width, int height, const SynthConfig& cfg);

/// Translates the source (integer shifts copy, fractional shifts sample
/// bilinearly, uncovered pixels are 0), overlays the fence and adds noise.
SynthResult synth_generate(const ColorImage& source, const SynthConfig& cfg);

}  // namespace defence
