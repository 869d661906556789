#pragma once

#include "defence/fence_mask.hpp"
#include "defence/image.hpp"
#include "defence/svm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace defence {

struct SvmDetectOptions {
    int stride = 8;
    std::vector<double> scales{1.0, 1.0 / 1.2, 1.0 / 1.44};
    /// Window-sized stamp; fence pixels of the template become fence in the
    /// output wherever a window fires. Empty means an all-fence window.
    std::optional<FenceMask> template_mask;
};

struct WindowHit {
    double scale;
    int x;  ///< top-left corner in the scaled image
    int y;
    double score;
};

struct SvmDetection {
    FenceMask mask;
    std::vector<WindowHit> hits;
    std::size_t windows_scanned = 0;
    std::vector<std::string> warnings;
};

/// Scans every scale at the given stride, top to bottom and left to right.
/// Each window is equalized, described by HOG and scored; positive windows
/// stamp the template (mapped back to original coordinates) into the mask.
/// Scales whose resized image cannot hold a window are skipped with a warning.
SvmDetection detect_fence_svm(const ImagePlane& gray, const SvmModel& model,
                              const SvmDetectOptions& opts = {});

/// Copies the window at (x, y) of size cfg.window_width x cfg.window_height.
ImagePlane crop(const ImagePlane& img, int x, int y, int width, int height);

}  // namespace defence
