#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"
#include "defence/motion.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace defence {

/// Matrix-free linear map R^domain -> R^range with its transpose.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual std::size_t domain_size() const = 0;
    virtual std::size_t range_size() const = 0;

    /// y = A x. `y` must have range_size() entries.
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    /// x = A^T y. `x` must have domain_size() entries.
    virtual void apply_adjoint(std::span<const double> y, std::span<double> x) const = 0;

    std::vector<double> operator()(std::span<const double> x) const;
    std::vector<double> adjoint(std::span<const double> y) const;
};

/// Diagonal 0/1 projection onto the valid pixels of a mask.
class MaskOperator final : public LinearOperator {
public:
    explicit MaskOperator(FenceMask mask);
    std::size_t domain_size() const override { return mask_.size(); }
    std::size_t range_size() const override { return mask_.size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

private:
    FenceMask mask_;
};

/// Replicate-boundary convolution with a fixed kernel; the adjoint scatters
/// through the same clamped indices, so it is exact at the borders too.
class ConvolutionOperator final : public LinearOperator {
public:
    ConvolutionOperator(int width, int height, Kernel2D kernel);
    std::size_t domain_size() const override { return static_cast<std::size_t>(width_) * height_; }
    std::size_t range_size() const override { return domain_size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

private:
    int width_;
    int height_;
    Kernel2D kernel_;
};

/// Bilinear backward warp out(p) = x(p + flow(p)).
class WarpOperator final : public LinearOperator {
public:
    explicit WarpOperator(const FlowField& flow);
    std::size_t domain_size() const override {
        return static_cast<std::size_t>(warp_.width()) * warp_.height();
    }
    std::size_t range_size() const override { return domain_size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;
    const FenceMask& in_bounds() const noexcept { return warp_.in_bounds(); }

private:
    BilinearWarp warp_;
};

/// Forward differences, zero on the last column (x part) and last row (y
/// part). The range stacks gx then gy, 2N entries.
class GradientOperator final : public LinearOperator {
public:
    GradientOperator(int width, int height);
    std::size_t domain_size() const override { return static_cast<std::size_t>(width_) * height_; }
    std::size_t range_size() const override { return 2 * domain_size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

private:
    int width_;
    int height_;
};

/// Product A_0 A_1 ... A_{n-1}; the last factor is applied first.
class ComposedOperator final : public LinearOperator {
public:
    explicit ComposedOperator(std::vector<std::shared_ptr<const LinearOperator>> factors);
    std::size_t domain_size() const override { return factors_.back()->domain_size(); }
    std::size_t range_size() const override { return factors_.front()->range_size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

private:
    std::vector<std::shared_ptr<const LinearOperator>> factors_;
};

struct Gradient {
    ImagePlane gx;
    ImagePlane gy;
};

Gradient grad(const ImagePlane& x);
/// Negative divergence: exact transpose of `grad`.
ImagePlane grad_adjoint(const ImagePlane& gx, const ImagePlane& gy);

/// One observed frame channel and the operators that produced it.
struct FrameObservation {
    ImagePlane y;
    FenceMask mask;
    FlowField flow;                 ///< latent -> frame geometry, see flow_for_shift
    std::optional<Kernel2D> psf;    ///< empty means identity blur
};

/// A = O H W with O the AND of the frame mask and the warp's in-bounds map.
class DegradationOperator final : public LinearOperator {
public:
    explicit DegradationOperator(const FrameObservation& obs);
    std::size_t domain_size() const override { return static_cast<std::size_t>(width_) * height_; }
    std::size_t range_size() const override { return domain_size(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    void apply_adjoint(std::span<const double> y, std::span<double> x) const override;

    const FenceMask& effective_mask() const noexcept { return mask_; }

private:
    int width_;
    int height_;
    BilinearWarp warp_;
    std::optional<ConvolutionOperator> blur_;
    FenceMask mask_;
    mutable std::vector<double> scratch_;
};

ImagePlane apply_forward(const FrameObservation& obs, const ImagePlane& x);
ImagePlane apply_adjoint(const FrameObservation& obs, const ImagePlane& r);

}  // namespace defence
