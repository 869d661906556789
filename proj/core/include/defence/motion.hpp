#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace defence {

/// Dense displacement field. For a flow estimated from `ref` to `tgt`,
/// ref(p) ~ tgt(p + (u(p), v(p))).
struct FlowField {
    ImagePlane u;
    ImagePlane v;

    static FlowField zeros(int width, int height);
    static FlowField constant(int width, int height, double du, double dv);

    int width() const noexcept { return u.width(); }
    int height() const noexcept { return u.height(); }
};

/// Global translation of `tgt` relative to `ref`: tgt(p) ~ ref(p - (dx, dy)).
struct GlobalShift {
    double dx = 0.0;
    double dy = 0.0;
};

/// Flow that makes `warp_forward` move a reference-geometry image by `shift`,
/// i.e. out(p) = x(p - shift).
FlowField flow_for_shift(const GlobalShift& shift, int width, int height);

/// Gaussian smoothing ahead of flow estimation; sigma == 0 is the identity.
ImagePlane presmooth(const ImagePlane& img, double sigma);

/// Integer search over [-radius, radius]^2 minimizing the mean squared
/// difference over pixels valid in both frames, refined per axis with a
/// parabola through the neighbors of the minimum.
GlobalShift estimate_global_shift(const ImagePlane& ref, const ImagePlane& tgt,
                                  const FenceMask& ref_valid, const FenceMask& tgt_valid,
                                  int radius);

/// Same mask applied to both frames.
GlobalShift estimate_global_shift(const ImagePlane& ref, const ImagePlane& tgt,
                                  const FenceMask& valid, int radius);

struct FlowParams {
    int levels = 0;               ///< 0 = as many as keep the coarsest side >= 16 px
    double scale_factor = 0.5;
    double alpha = 15.0;          ///< smoothness weight (enters squared)
    int iters = 100;              ///< Jacobi iterations per warp
    int warps = 3;                ///< re-linearizations per pyramid level
    double presmooth_sigma = 1.5;
};

/// Coarse-to-fine Horn-Schunck on pre-smoothed inputs.
FlowField estimate_flow(const ImagePlane& ref, const ImagePlane& tgt, const FlowParams& params = {});

/// Largest pyramid depth whose coarsest level keeps both sides >= 16 px.
int max_pyramid_levels(int width, int height, double scale_factor);

/// Bilinear gather taps of out(p) = x(p + flow(p)). Samples outside
/// [0, w-1] x [0, h-1] are invalid and produce 0.
class BilinearWarp {
public:
    explicit BilinearWarp(const FlowField& flow);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    void forward(std::span<const double> x, std::span<double> out) const;
    void adjoint(std::span<const double> y, std::span<double> out) const;

    /// Valid where the sample position fell inside the domain.
    const FenceMask& in_bounds() const noexcept { return in_bounds_; }

private:
    struct Taps {
        std::array<std::uint32_t, 4> index;
        std::array<double, 4> weight;
    };
    int width_;
    int height_;
    std::vector<Taps> taps_;
    FenceMask in_bounds_;
};

struct WarpResult {
    ImagePlane image;
    FenceMask in_bounds;
};

/// out(p) = bilinear sample of x at p + flow(p); 0 outside the domain.
WarpResult warp_forward(const ImagePlane& x, const FlowField& flow);

/// Exact transpose of `warp_forward`: every sample scatters back to its 4 sources.
ImagePlane warp_adjoint(const ImagePlane& y, const FlowField& flow);

}  // namespace defence
