#include "defence/fence_mask.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <string>

namespace defence {

FenceMask::FenceMask(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("mask dimensions must be positive");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 1);
}

FenceMask::FenceMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1) throw InvalidArgument("mask dimensions must be positive");
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("mask data length does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    for (auto& b : bits_) {
        if (b > 1) throw InvalidArgument("mask values must be 0 or 1");
    }
}

std::size_t FenceMask::fence_count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{0}));
}

ImagePlane FenceMask::to_weights() const {
    std::vector<double> w(bits_.begin(), bits_.end());
    return ImagePlane(width_, height_, std::move(w));
}

FenceMask FenceMask::intersect(const FenceMask& other) const {
    if (!same_shape(other)) throw InvalidArgument("mask dimensions differ");
    std::vector<std::uint8_t> out(bits_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = bits_[i] & other.bits_[i];
    return FenceMask(width_, height_, std::move(out));
}

FenceMask dilate(const FenceMask& mask, int iters) {
    if (iters < 0) throw InvalidArgument("dilation iterations must be non-negative");
    FenceMask cur = mask;
    const int w = mask.width();
    const int h = mask.height();
    for (int it = 0; it < iters; ++it) {
        FenceMask next(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                bool hit = false;
                for (int dy = -1; dy <= 1 && !hit; ++dy) {
                    for (int dx = -1; dx <= 1 && !hit; ++dx) {
                        const int sx = x + dx;
                        const int sy = y + dy;
                        if (sx >= 0 && sx < w && sy >= 0 && sy < h && cur.fence(sx, sy)) hit = true;
                    }
                }
                if (hit) next.set_fence(x, y);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace defence
