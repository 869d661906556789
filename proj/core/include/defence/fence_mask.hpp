#pragma once

#include "defence/image.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace defence {

/// Binary occlusion map: 1 = valid observation, 0 = fence.
class FenceMask {
public:
    /// All-valid mask.
    FenceMask(int width, int height);
    FenceMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool valid(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    bool fence(int x, int y) const noexcept { return bits_[index(x, y)] == 0; }
    void set_fence(int x, int y) noexcept { bits_[index(x, y)] = 0; }
    void set_valid(int x, int y) noexcept { bits_[index(x, y)] = 1; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    std::size_t fence_count() const noexcept;

    /// 1.0 on valid pixels, 0.0 on fence pixels.
    ImagePlane to_weights() const;

    /// Pixel-wise AND of validity (fence pixels of either mask stay fence).
    FenceMask intersect(const FenceMask& other) const;

    bool same_shape(const FenceMask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const FenceMask&, const FenceMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Grows the fence region with a 3x3 structuring element, `iters` times.
FenceMask dilate(const FenceMask& mask, int iters);

}  // namespace defence
