#include "defence/sliding_window.hpp"

#include "defence/error.hpp"
#include "defence/hog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace defence {

ImagePlane crop(const ImagePlane& img, int x, int y, int width, int height) {
    if (x < 0 || y < 0 || x + width > img.width() || y + height > img.height()) {
        throw InvalidArgument("crop rectangle leaves the image");
    }
    ImagePlane out(width, height);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) out(i, j) = img(x + i, y + j);
    }
    return out;
}

SvmDetection detect_fence_svm(const ImagePlane& gray, const SvmModel& model,
                              const SvmDetectOptions& opts) {
    if (opts.stride < 1) throw InvalidArgument("sliding-window stride must be >= 1");
    if (model.support_vectors.empty()) throw InvalidArgument("SVM model has no support vectors");
    const HogConfig& cfg = model.config;
    cfg.validate();
    const int ww = cfg.window_width;
    const int wh = cfg.window_height;
    if (opts.template_mask &&
        (opts.template_mask->width() != ww || opts.template_mask->height() != wh)) {
        throw InvalidArgument("template mask must match the model window size");
    }

    SvmDetection det{FenceMask(gray.width(), gray.height()), {}, 0, {}};
    for (double scale : opts.scales) {
        if (!(scale > 0.0)) throw InvalidArgument("scales must be positive");
        const int sw = std::max(1, static_cast<int>(std::lround(gray.width() * scale)));
        const int sh = std::max(1, static_cast<int>(std::lround(gray.height() * scale)));
        if (sw < ww || sh < wh) {
            std::ostringstream msg;
            msg << "scale " << scale << " skipped: resized image " << sw << "x" << sh
                << " is smaller than the " << ww << "x" << wh << " window";
            det.warnings.push_back(msg.str());
            continue;
        }
        const ImagePlane scaled =
            (sw == gray.width() && sh == gray.height()) ? gray : resize_bilinear(gray, sw, sh);
        const double fx = static_cast<double>(sw) / gray.width();
        const double fy = static_cast<double>(sh) / gray.height();

        for (int y = 0; y + wh <= sh; y += opts.stride) {
            for (int x = 0; x + ww <= sw; x += opts.stride) {
                ++det.windows_scanned;
                const double score =
                    svm_decision(model, hog(equalize_histogram(crop(scaled, x, y, ww, wh)), cfg));
                if (!(score > 0.0)) continue;
                det.hits.push_back({scale, x, y, score});

                // Original pixels whose centers land inside this window.
                const int x0 = std::max(0, static_cast<int>(std::floor(x / fx)) - 1);
                const int x1 = std::min(gray.width() - 1, static_cast<int>(std::ceil((x + ww) / fx)) + 1);
                const int y0 = std::max(0, static_cast<int>(std::floor(y / fy)) - 1);
                const int y1 = std::min(gray.height() - 1, static_cast<int>(std::ceil((y + wh) / fy)) + 1);
                for (int oy = y0; oy <= y1; ++oy) {
                    const int ty = static_cast<int>(std::floor((oy + 0.5) * fy)) - y;
                    if (ty < 0 || ty >= wh) continue;
                    for (int ox = x0; ox <= x1; ++ox) {
                        const int tx = static_cast<int>(std::floor((ox + 0.5) * fx)) - x;
                        if (tx < 0 || tx >= ww) continue;
                        if (!opts.template_mask || opts.template_mask->fence(tx, ty)) {
                            det.mask.set_fence(ox, oy);
                        }
                    }
                }
            }
        }
    }
    return det;
}

}  // namespace defence
