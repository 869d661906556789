#include "defence/motion.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace defence {

namespace {

constexpr int kMinPyramidSide = 16;
constexpr double kBoundsTolerance = 1e-9;

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
    if (!a.same_shape(b)) throw InvalidArgument(std::string(what) + ": image dimensions differ");
}

// Mean of the 4-neighbourhood with edge replication.
void neighbour_mean(const ImagePlane& src, ImagePlane& dst) {
    const int w = src.width();
    const int h = src.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            dst(x, y) = 0.25 * (src.clamped(x - 1, y) + src.clamped(x + 1, y) + src.clamped(x, y - 1) +
                                src.clamped(x, y + 1));
        }
    }
}

ImagePlane gradient_x(const ImagePlane& img) {
    ImagePlane g(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) g(x, y) = 0.5 * (img.clamped(x + 1, y) - img.clamped(x - 1, y));
    }
    return g;
}

ImagePlane gradient_y(const ImagePlane& img) {
    ImagePlane g(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) g(x, y) = 0.5 * (img.clamped(x, y + 1) - img.clamped(x, y - 1));
    }
    return g;
}

ImagePlane downsample(const ImagePlane& img, int width, int height) {
    // Anti-alias before decimation.
    return resize_bilinear(gaussian_blur(img, 1.0), width, height);
}

// One pyramid level: refine (u, v) in place.
void horn_schunck_level(const ImagePlane& ref, const ImagePlane& tgt, FlowField& flow,
                        const FlowParams& p) {
    const int w = ref.width();
    const int h = ref.height();
    const double alpha2 = p.alpha * p.alpha;
    const ImagePlane ref_gx = gradient_x(ref);
    const ImagePlane ref_gy = gradient_y(ref);
    const ImagePlane tgt_gx = gradient_x(tgt);
    const ImagePlane tgt_gy = gradient_y(tgt);

    ImagePlane ix(w, h), iy(w, h), it(w, h);
    ImagePlane mean_u(w, h), mean_v(w, h);
    for (int warp = 0; warp < p.warps; ++warp) {
        const ImagePlane u0 = flow.u;
        const ImagePlane v0 = flow.v;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double sx = x + u0(x, y);
                const double sy = y + v0(x, y);
                ix(x, y) = 0.5 * (ref_gx(x, y) + sample_bilinear(tgt_gx, sx, sy));
                iy(x, y) = 0.5 * (ref_gy(x, y) + sample_bilinear(tgt_gy, sx, sy));
                it(x, y) = sample_bilinear(tgt, sx, sy) - ref(x, y);
            }
        }
        for (int iter = 0; iter < p.iters; ++iter) {
            neighbour_mean(flow.u, mean_u);
            neighbour_mean(flow.v, mean_v);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double gx = ix(x, y);
                    const double gy = iy(x, y);
                    const double du = mean_u(x, y) - u0(x, y);
                    const double dv = mean_v(x, y) - v0(x, y);
                    const double r = (it(x, y) + gx * du + gy * dv) / (alpha2 + gx * gx + gy * gy);
                    flow.u(x, y) = mean_u(x, y) - gx * r;
                    flow.v(x, y) = mean_v(x, y) - gy * r;
                }
            }
        }
    }
}

double mean_sq_diff(const ImagePlane& ref, const ImagePlane& tgt, const FenceMask& ref_valid,
                    const FenceMask& tgt_valid, int dx, int dy, std::size_t& count) {
    const int w = ref.width();
    const int h = ref.height();
    double acc = 0.0;
    count = 0;
    for (int y = std::max(0, dy); y < std::min(h, h + dy); ++y) {
        for (int x = std::max(0, dx); x < std::min(w, w + dx); ++x) {
            if (!tgt_valid.valid(x, y) || !ref_valid.valid(x - dx, y - dy)) continue;
            const double d = tgt(x, y) - ref(x - dx, y - dy);
            acc += d * d;
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

double parabola_offset(double minus, double centre, double plus) {
    const double denom = minus - 2.0 * centre + plus;
    if (!(denom > 0.0)) return 0.0;
    return std::clamp(0.5 * (minus - plus) / denom, -0.5, 0.5);
}

}  // namespace

FlowField FlowField::zeros(int width, int height) {
    return FlowField{ImagePlane(width, height), ImagePlane(width, height)};
}

FlowField FlowField::constant(int width, int height, double du, double dv) {
    return FlowField{ImagePlane(width, height, du), ImagePlane(width, height, dv)};
}

FlowField flow_for_shift(const GlobalShift& shift, int width, int height) {
    return FlowField::constant(width, height, -shift.dx, -shift.dy);
}

ImagePlane presmooth(const ImagePlane& img, double sigma) {
    if (sigma < 0.0 || !std::isfinite(sigma)) throw InvalidArgument("presmooth sigma must be >= 0");
    return gaussian_blur(img, sigma);
}

GlobalShift estimate_global_shift(const ImagePlane& ref, const ImagePlane& tgt,
                                  const FenceMask& ref_valid, const FenceMask& tgt_valid,
                                  int radius) {
    require_same_shape(ref, tgt, "global shift");
    if (radius < 1) throw InvalidArgument("shift search radius must be >= 1");
    if (ref_valid.width() != ref.width() || ref_valid.height() != ref.height() ||
        !ref_valid.same_shape(tgt_valid)) {
        throw InvalidArgument("global shift: mask dimensions do not match the frames");
    }
    const int side = 2 * radius + 1;
    const double missing = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cost(static_cast<std::size_t>(side) * side, missing);
    double best = std::numeric_limits<double>::infinity();
    int best_dx = 0;
    int best_dy = 0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            std::size_t count = 0;
            const double c = mean_sq_diff(ref, tgt, ref_valid, tgt_valid, dx, dy, count);
            if (count == 0) continue;
            cost[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] = c;
            // Strict comparison keeps the first minimum in scan order.
            if (c < best) {
                best = c;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }
    if (!std::isfinite(best)) {
        throw EstimationFailure("global shift: no overlapping valid pixels at any shift");
    }
    auto at = [&](int dx, int dy) {
        if (std::abs(dx) > radius || std::abs(dy) > radius) return missing;
        return cost[static_cast<std::size_t>(dy + radius) * side + (dx + radius)];
    };
    GlobalShift s{static_cast<double>(best_dx), static_cast<double>(best_dy)};
    if (best == 0.0) return s;  // exact match, nothing to refine
    const double l = at(best_dx - 1, best_dy), r = at(best_dx + 1, best_dy);
    if (std::isfinite(l) && std::isfinite(r)) s.dx += parabola_offset(l, best, r);
    const double u = at(best_dx, best_dy - 1), d = at(best_dx, best_dy + 1);
    if (std::isfinite(u) && std::isfinite(d)) s.dy += parabola_offset(u, best, d);
    return s;
}

GlobalShift estimate_global_shift(const ImagePlane& ref, const ImagePlane& tgt,
                                  const FenceMask& valid, int radius) {
    return estimate_global_shift(ref, tgt, valid, valid, radius);
}

int max_pyramid_levels(int width, int height, double scale_factor) {
    int levels = 0;
    double w = width;
    double h = height;
    while (std::lround(w) >= kMinPyramidSide && std::lround(h) >= kMinPyramidSide) {
        ++levels;
        w *= scale_factor;
        h *= scale_factor;
    }
    return levels;
}

FlowField estimate_flow(const ImagePlane& ref, const ImagePlane& tgt, const FlowParams& p) {
    require_same_shape(ref, tgt, "flow");
    if (!(p.scale_factor > 0.0 && p.scale_factor < 1.0)) {
        throw InvalidArgument("pyramid scale factor must lie in (0, 1)");
    }
    if (!(p.alpha > 0.0) || p.iters < 1 || p.warps < 1 || p.levels < 0) {
        throw InvalidArgument("flow parameters out of range");
    }
    const int possible = max_pyramid_levels(ref.width(), ref.height(), p.scale_factor);
    if (possible < 1) {
        throw InvalidArgument("image " + std::to_string(ref.width()) + "x" +
                              std::to_string(ref.height()) + " is too small for flow estimation");
    }
    const int levels = p.levels == 0 ? possible : p.levels;
    if (levels > possible) {
        throw InvalidArgument("image too small for a " + std::to_string(levels) +
                              "-level pyramid (at most " + std::to_string(possible) + ")");
    }

    std::vector<ImagePlane> ref_pyr{presmooth(ref, p.presmooth_sigma)};
    std::vector<ImagePlane> tgt_pyr{presmooth(tgt, p.presmooth_sigma)};
    for (int l = 1; l < levels; ++l) {
        const double f = std::pow(p.scale_factor, l);
        const int w = static_cast<int>(std::lround(ref.width() * f));
        const int h = static_cast<int>(std::lround(ref.height() * f));
        ref_pyr.push_back(downsample(ref_pyr.back(), w, h));
        tgt_pyr.push_back(downsample(tgt_pyr.back(), w, h));
    }

    FlowField flow = FlowField::zeros(ref_pyr.back().width(), ref_pyr.back().height());
    for (int l = levels - 1; l >= 0; --l) {
        const ImagePlane& r = ref_pyr[static_cast<std::size_t>(l)];
        if (flow.width() != r.width() || flow.height() != r.height()) {
            const double sx = static_cast<double>(r.width()) / flow.width();
            const double sy = static_cast<double>(r.height()) / flow.height();
            FlowField up{resize_bilinear(flow.u, r.width(), r.height()),
                         resize_bilinear(flow.v, r.width(), r.height())};
            for (double& v : up.u.values()) v *= sx;
            for (double& v : up.v.values()) v *= sy;
            flow = std::move(up);
        }
        horn_schunck_level(r, tgt_pyr[static_cast<std::size_t>(l)], flow, p);
    }
    return flow;
}

BilinearWarp::BilinearWarp(const FlowField& flow)
    : width_(flow.width()), height_(flow.height()), in_bounds_(flow.width(), flow.height()) {
    if (!flow.u.same_shape(flow.v)) throw InvalidArgument("flow components differ in size");
    taps_.resize(static_cast<std::size_t>(width_) * height_);
    const double max_x = width_ - 1;
    const double max_y = height_ - 1;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            Taps& t = taps_[static_cast<std::size_t>(y) * width_ + x];
            t.index.fill(0);
            t.weight.fill(0.0);
            double sx = x + flow.u(x, y);
            double sy = y + flow.v(x, y);
            if (sx < -kBoundsTolerance || sx > max_x + kBoundsTolerance || sy < -kBoundsTolerance ||
                sy > max_y + kBoundsTolerance) {
                in_bounds_.set_fence(x, y);
                continue;
            }
            sx = std::clamp(sx, 0.0, max_x);
            sy = std::clamp(sy, 0.0, max_y);
            const int x0 = width_ > 1 ? std::min(static_cast<int>(std::floor(sx)), width_ - 2) : 0;
            const int y0 = height_ > 1 ? std::min(static_cast<int>(std::floor(sy)), height_ - 2) : 0;
            const int x1 = width_ > 1 ? x0 + 1 : 0;
            const int y1 = height_ > 1 ? y0 + 1 : 0;
            const double ax = sx - x0;
            const double ay = sy - y0;
            auto idx = [&](int px, int py) { return static_cast<std::uint32_t>(py * width_ + px); };
            t.index = {idx(x0, y0), idx(x1, y0), idx(x0, y1), idx(x1, y1)};
            t.weight = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
        }
    }
}

void BilinearWarp::forward(std::span<const double> x, std::span<double> out) const {
    for (std::size_t p = 0; p < taps_.size(); ++p) {
        const Taps& t = taps_[p];
        out[p] = t.weight[0] * x[t.index[0]] + t.weight[1] * x[t.index[1]] +
                 t.weight[2] * x[t.index[2]] + t.weight[3] * x[t.index[3]];
    }
}

void BilinearWarp::adjoint(std::span<const double> y, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t p = 0; p < taps_.size(); ++p) {
        const Taps& t = taps_[p];
        for (int k = 0; k < 4; ++k) out[t.index[k]] += t.weight[k] * y[p];
    }
}

WarpResult warp_forward(const ImagePlane& x, const FlowField& flow) {
    if (x.width() != flow.width() || x.height() != flow.height()) {
        throw InvalidArgument("warp: image and flow dimensions differ");
    }
    const BilinearWarp warp(flow);
    ImagePlane out(x.width(), x.height());
    warp.forward(x.values(), out.values());
    return {std::move(out), warp.in_bounds()};
}

ImagePlane warp_adjoint(const ImagePlane& y, const FlowField& flow) {
    if (y.width() != flow.width() || y.height() != flow.height()) {
        throw InvalidArgument("warp adjoint: image and flow dimensions differ");
    }
    const BilinearWarp warp(flow);
    ImagePlane out(y.width(), y.height());
    warp.adjoint(y.values(), out.values());
    return out;
}

}  // namespace defence
