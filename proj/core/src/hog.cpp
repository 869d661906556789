#include "defence/hog.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace defence {

namespace {

constexpr double kBlockEpsilon = 1e-6;

}  // namespace

void HogConfig::validate() const {
    if (cell < 1 || bins < 1 || block_cells < 1 || block_stride < 1) {
        throw InvalidArgument("HOG cell, bins, block and stride must be positive");
    }
    if (window_width % cell != 0 || window_height % cell != 0) {
        throw InvalidArgument("HOG window " + std::to_string(window_width) + "x" +
                              std::to_string(window_height) + " is not a multiple of the cell size");
    }
    if (cells_x() < block_cells || cells_y() < block_cells ||
        (cells_x() - block_cells) % block_stride != 0 || (cells_y() - block_cells) % block_stride != 0) {
        throw InvalidArgument("HOG blocks do not tile the window");
    }
}

ImagePlane equalize_histogram(const ImagePlane& img) {
    std::array<double, 256> hist{};
    auto level = [](double v) { return static_cast<std::size_t>(std::clamp(std::lround(v), 0L, 255L)); };
    for (double v : img.values()) hist[level(v)] += 1.0;
    std::array<double, 256> cdf{};
    double acc = 0.0;
    const double n = static_cast<double>(img.size());
    for (std::size_t i = 0; i < 256; ++i) {
        acc += hist[i];
        cdf[i] = 255.0 * acc / n;
    }
    ImagePlane out(img.width(), img.height());
    auto dst = out.values();
    const auto src = img.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = cdf[level(src[i])];
    return out;
}

std::vector<double> cell_histograms(const ImagePlane& window, const HogConfig& cfg) {
    cfg.validate();
    if (window.width() != cfg.window_width || window.height() != cfg.window_height) {
        throw InvalidArgument("HOG window must be " + std::to_string(cfg.window_width) + "x" +
                              std::to_string(cfg.window_height) + ", got " +
                              std::to_string(window.width()) + "x" + std::to_string(window.height()));
    }
    const int cx = cfg.cells_x();
    const double bin_width = 180.0 / cfg.bins;
    std::vector<double> hist(static_cast<std::size_t>(cx * cfg.cells_y() * cfg.bins), 0.0);
    for (int y = 0; y < cfg.window_height; ++y) {
        for (int x = 0; x < cfg.window_width; ++x) {
            const double gx = window.clamped(x + 1, y) - window.clamped(x - 1, y);
            const double gy = window.clamped(x, y + 1) - window.clamped(x, y - 1);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0.0) angle += 180.0;
            if (angle >= 180.0) angle -= 180.0;
            const int bin = std::min(static_cast<int>(angle / bin_width), cfg.bins - 1);
            const int cell = (y / cfg.cell) * cx + (x / cfg.cell);
            hist[static_cast<std::size_t>(cell * cfg.bins + bin)] += mag;
        }
    }
    return hist;
}

HogDescriptor hog(const ImagePlane& window, const HogConfig& cfg) {
    const auto cells = cell_histograms(window, cfg);
    const int cx = cfg.cells_x();
    HogDescriptor d;
    d.values.reserve(cfg.descriptor_length());
    std::vector<double> block(cfg.block_length());
    for (int by = 0; by < cfg.blocks_y(); ++by) {
        for (int bx = 0; bx < cfg.blocks_x(); ++bx) {
            std::size_t k = 0;
            for (int j = 0; j < cfg.block_cells; ++j) {
                for (int i = 0; i < cfg.block_cells; ++i) {
                    const int cell = (by * cfg.block_stride + j) * cx + (bx * cfg.block_stride + i);
                    for (int b = 0; b < cfg.bins; ++b) {
                        block[k++] = cells[static_cast<std::size_t>(cell * cfg.bins + b)];
                    }
                }
            }
            const double scale = 1.0 / (norm2(block) + kBlockEpsilon);
            for (double v : block) d.values.push_back(v * scale);
        }
    }
    return d;
}

}  // namespace defence
