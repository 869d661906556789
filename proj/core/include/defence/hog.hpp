#pragma once

#include "defence/image.hpp"

#include <cstddef>
#include <vector>

namespace defence {

/// Window geometry for fence/non-fence classification. The defaults give
/// 12 x 13 cells, 11 x 12 blocks and a 4752-value descriptor.
struct HogConfig {
    int cell = 8;
    int bins = 9;              ///< unsigned orientation bins over [0, 180)
    int block_cells = 2;       ///< block side in cells
    int block_stride = 1;      ///< in cells
    int window_width = 96;
    int window_height = 104;

    int cells_x() const noexcept { return window_width / cell; }
    int cells_y() const noexcept { return window_height / cell; }
    int blocks_x() const noexcept { return (cells_x() - block_cells) / block_stride + 1; }
    int blocks_y() const noexcept { return (cells_y() - block_cells) / block_stride + 1; }
    std::size_t block_length() const noexcept {
        return static_cast<std::size_t>(block_cells * block_cells * bins);
    }
    std::size_t descriptor_length() const noexcept {
        return block_length() * static_cast<std::size_t>(blocks_x() * blocks_y());
    }

    /// Throws InvalidArgument unless the window tiles into whole cells and blocks.
    void validate() const;

    friend bool operator==(const HogConfig&, const HogConfig&) = default;
};

struct HogDescriptor {
    std::vector<double> values;
    std::size_t size() const noexcept { return values.size(); }
    friend bool operator==(const HogDescriptor&, const HogDescriptor&) = default;
};

/// Histogram equalization through a 256-bin CDF: a pixel at level v maps to
/// 255 * cdf(v). Values are rounded into [0, 255] for binning.
ImagePlane equalize_histogram(const ImagePlane& img);

/// Per-cell orientation histograms of a window, cells in row-major order,
/// `bins` values each. Centered [-1, 0, 1] gradients with edge replication,
/// hard assignment of the magnitude to floor(angle / (180 / bins)).
std::vector<double> cell_histograms(const ImagePlane& window, const HogConfig& cfg);

/// Block-normalized descriptor: 2x2-cell blocks at one-cell stride, each
/// block divided by (||v|| + 1e-6), blocks concatenated in row-major order.
/// The window is used as is; run `equalize_histogram` first when needed.
HogDescriptor hog(const ImagePlane& window, const HogConfig& cfg = {});

}  // namespace defence
