#include "defence/operators.hpp"

#include "defence/error.hpp"

#include <algorithm>

namespace defence {

namespace {

void require_size(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n) throw InvalidArgument(std::string(what) + ": vector length mismatch");
}

void require_size(std::span<double> v, std::size_t n, const char* what) {
    if (v.size() != n) throw InvalidArgument(std::string(what) + ": vector length mismatch");
}

}  // namespace

std::vector<double> LinearOperator::operator()(std::span<const double> x) const {
    std::vector<double> y(range_size());
    apply(x, y);
    return y;
}

std::vector<double> LinearOperator::adjoint(std::span<const double> y) const {
    std::vector<double> x(domain_size());
    apply_adjoint(y, x);
    return x;
}

MaskOperator::MaskOperator(FenceMask mask) : mask_(std::move(mask)) {}

void MaskOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x, mask_.size(), "mask operator");
    require_size(y, mask_.size(), "mask operator");
    const auto bits = mask_.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) y[i] = bits[i] ? x[i] : 0.0;
}

void MaskOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    apply(y, x);
}

ConvolutionOperator::ConvolutionOperator(int width, int height, Kernel2D kernel)
    : width_(width), height_(height), kernel_(std::move(kernel)) {
    if (width < 1 || height < 1) throw InvalidArgument("convolution operator needs a non-empty domain");
}

void ConvolutionOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x, domain_size(), "convolution operator");
    require_size(y, range_size(), "convolution operator");
    const int rx = kernel_.radius_x();
    const int ry = kernel_.radius_y();
    for (int py = 0; py < height_; ++py) {
        for (int px = 0; px < width_; ++px) {
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                const int sy = std::clamp(py - dy, 0, height_ - 1);
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int sx = std::clamp(px - dx, 0, width_ - 1);
                    acc += kernel_.at(dx, dy) * x[static_cast<std::size_t>(sy) * width_ + sx];
                }
            }
            y[static_cast<std::size_t>(py) * width_ + px] = acc;
        }
    }
}

void ConvolutionOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    require_size(y, range_size(), "convolution operator");
    require_size(x, domain_size(), "convolution operator");
    std::fill(x.begin(), x.end(), 0.0);
    const int rx = kernel_.radius_x();
    const int ry = kernel_.radius_y();
    for (int py = 0; py < height_; ++py) {
        for (int px = 0; px < width_; ++px) {
            const double v = y[static_cast<std::size_t>(py) * width_ + px];
            for (int dy = -ry; dy <= ry; ++dy) {
                const int sy = std::clamp(py - dy, 0, height_ - 1);
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int sx = std::clamp(px - dx, 0, width_ - 1);
                    x[static_cast<std::size_t>(sy) * width_ + sx] += kernel_.at(dx, dy) * v;
                }
            }
        }
    }
}

WarpOperator::WarpOperator(const FlowField& flow) : warp_(flow) {}

void WarpOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x, domain_size(), "warp operator");
    require_size(y, range_size(), "warp operator");
    warp_.forward(x, y);
}

void WarpOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    require_size(y, range_size(), "warp operator");
    require_size(x, domain_size(), "warp operator");
    warp_.adjoint(y, x);
}

GradientOperator::GradientOperator(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("gradient operator needs a non-empty domain");
}

void GradientOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = domain_size();
    require_size(x, n, "gradient operator");
    require_size(y, 2 * n, "gradient operator");
    const std::size_t w = static_cast<std::size_t>(width_);
    for (int py = 0; py < height_; ++py) {
        for (int px = 0; px < width_; ++px) {
            const std::size_t i = py * w + px;
            y[i] = px + 1 < width_ ? x[i + 1] - x[i] : 0.0;
            y[n + i] = py + 1 < height_ ? x[i + w] - x[i] : 0.0;
        }
    }
}

void GradientOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    const std::size_t n = domain_size();
    require_size(y, 2 * n, "gradient operator");
    require_size(x, n, "gradient operator");
    const std::size_t w = static_cast<std::size_t>(width_);
    std::fill(x.begin(), x.end(), 0.0);
    for (int py = 0; py < height_; ++py) {
        for (int px = 0; px < width_; ++px) {
            const std::size_t i = py * w + px;
            if (px + 1 < width_) {
                x[i + 1] += y[i];
                x[i] -= y[i];
            }
            if (py + 1 < height_) {
                x[i + w] += y[n + i];
                x[i] -= y[n + i];
            }
        }
    }
}

ComposedOperator::ComposedOperator(std::vector<std::shared_ptr<const LinearOperator>> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) throw InvalidArgument("composition needs at least one factor");
    for (std::size_t i = 0; i + 1 < factors_.size(); ++i) {
        if (factors_[i]->domain_size() != factors_[i + 1]->range_size()) {
            throw InvalidArgument("composed operators have incompatible sizes");
        }
    }
}

void ComposedOperator::apply(std::span<const double> x, std::span<double> y) const {
    std::vector<double> cur(x.begin(), x.end());
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) cur = (**it)(cur);
    require_size(y, cur.size(), "composed operator");
    std::copy(cur.begin(), cur.end(), y.begin());
}

void ComposedOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    std::vector<double> cur(y.begin(), y.end());
    for (const auto& f : factors_) cur = f->adjoint(cur);
    require_size(x, cur.size(), "composed operator");
    std::copy(cur.begin(), cur.end(), x.begin());
}

Gradient grad(const ImagePlane& x) {
    const GradientOperator op(x.width(), x.height());
    std::vector<double> g(op.range_size());
    op.apply(x.values(), g);
    const std::size_t n = x.size();
    return {ImagePlane(x.width(), x.height(), std::vector<double>(g.begin(), g.begin() + n)),
            ImagePlane(x.width(), x.height(), std::vector<double>(g.begin() + n, g.end()))};
}

ImagePlane grad_adjoint(const ImagePlane& gx, const ImagePlane& gy) {
    if (!gx.same_shape(gy)) throw InvalidArgument("gradient components differ in size");
    const GradientOperator op(gx.width(), gx.height());
    std::vector<double> g(gx.vector());
    g.insert(g.end(), gy.vector().begin(), gy.vector().end());
    ImagePlane out(gx.width(), gx.height());
    op.apply_adjoint(g, out.values());
    return out;
}

DegradationOperator::DegradationOperator(const FrameObservation& obs)
    : width_(obs.y.width()),
      height_(obs.y.height()),
      warp_(obs.flow),
      mask_(obs.mask.intersect(warp_.in_bounds())) {
    if (obs.mask.width() != width_ || obs.mask.height() != height_ || obs.flow.width() != width_ ||
        obs.flow.height() != height_) {
        throw InvalidArgument("observation: frame, mask and flow dimensions differ");
    }
    if (obs.psf) blur_.emplace(width_, height_, *obs.psf);
    scratch_.resize(domain_size());
}

void DegradationOperator::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x, domain_size(), "degradation operator");
    require_size(y, range_size(), "degradation operator");
    if (blur_) {
        warp_.forward(x, scratch_);
        blur_->apply(scratch_, y);
    } else {
        warp_.forward(x, y);
    }
    const auto bits = mask_.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) y[i] = 0.0;
    }
}

void DegradationOperator::apply_adjoint(std::span<const double> y, std::span<double> x) const {
    require_size(y, range_size(), "degradation operator");
    require_size(x, domain_size(), "degradation operator");
    const auto bits = mask_.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) scratch_[i] = bits[i] ? y[i] : 0.0;
    if (blur_) {
        std::vector<double> tmp(domain_size());
        blur_->apply_adjoint(scratch_, tmp);
        warp_.adjoint(tmp, x);
    } else {
        warp_.adjoint(scratch_, x);
    }
}

ImagePlane apply_forward(const FrameObservation& obs, const ImagePlane& x) {
    const DegradationOperator op(obs);
    if (x.width() != obs.y.width() || x.height() != obs.y.height()) {
        throw InvalidArgument("apply_forward: image and observation dimensions differ");
    }
    ImagePlane out(x.width(), x.height());
    op.apply(x.values(), out.values());
    return out;
}

ImagePlane apply_adjoint(const FrameObservation& obs, const ImagePlane& r) {
    const DegradationOperator op(obs);
    if (r.width() != obs.y.width() || r.height() != obs.y.height()) {
        throw InvalidArgument("apply_adjoint: image and observation dimensions differ");
    }
    ImagePlane out(r.width(), r.height());
    op.apply_adjoint(r.values(), out.values());
    return out;
}

}  // namespace defence
