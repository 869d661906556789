#include "defence/image.hpp"

#include "defence/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace defence {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
}

void check_kernel_fits(const ImagePlane& img, const Kernel2D& k) {
    if (k.width() > 2 * img.width() || k.height() > 2 * img.height()) {
        throw InvalidArgument("kernel " + std::to_string(k.width()) + "x" +
                              std::to_string(k.height()) + " exceeds twice the image size " +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
}

// Shared body of convolve/correlate; sign = -1 flips the kernel offset.
ImagePlane filter_replicate(const ImagePlane& img, const Kernel2D& k, int sign) {
    check_kernel_fits(img, k);
    const int w = img.width();
    const int h = img.height();
    const int rx = k.radius_x();
    const int ry = k.radius_y();
    ImagePlane out(w, h);

    // Precomputed clamped column indices for every tap offset.
    std::vector<int> xs(static_cast<std::size_t>(w) * static_cast<std::size_t>(k.width()));
    for (int x = 0; x < w; ++x) {
        for (int dx = -rx; dx <= rx; ++dx) {
            xs[static_cast<std::size_t>(x) * k.width() + (dx + rx)] =
                std::clamp(x + sign * dx, 0, w - 1);
        }
    }
    const auto src = img.values();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                const int sy = std::clamp(y + sign * dy, 0, h - 1);
                const double* row = src.data() + static_cast<std::size_t>(sy) * w;
                const int* cols = xs.data() + static_cast<std::size_t>(x) * k.width();
                for (int dx = -rx; dx <= rx; ++dx) {
                    acc += k.at(dx, dy) * row[cols[dx + rx]];
                }
            }
            out(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

ImagePlane::ImagePlane(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!std::isfinite(fill)) throw InvalidArgument("image fill value must be finite");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
        throw InvalidArgument("image data contains non-finite values");
    }
}

double ImagePlane::clamped(int x, int y) const noexcept {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

ColorImage::ColorImage(std::array<ImagePlane, 3> planes) : planes_(std::move(planes)) {
    if (!planes_[0].same_shape(planes_[1]) || !planes_[0].same_shape(planes_[2])) {
        throw InvalidArgument("color planes must share dimensions");
    }
}

ColorImage::ColorImage(int width, int height, double fill)
    : planes_{ImagePlane(width, height, fill), ImagePlane(width, height, fill),
              ImagePlane(width, height, fill)} {}

ColorImage ColorImage::from_gray(const ImagePlane& gray) {
    return ColorImage(std::array<ImagePlane, 3>{gray, gray, gray});
}

Kernel2D::Kernel2D(int width, int height, std::vector<double> taps)
    : width_(width), height_(height), taps_(std::move(taps)) {
    if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0) {
        throw InvalidArgument("kernel sides must be odd and positive, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
    if (taps_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("kernel tap count does not match its dimensions");
    }
}

double Kernel2D::sum() const noexcept { return std::accumulate(taps_.begin(), taps_.end(), 0.0); }

bool Kernel2D::is_point_symmetric(double tol) const noexcept {
    for (int dy = -radius_y(); dy <= radius_y(); ++dy) {
        for (int dx = -radius_x(); dx <= radius_x(); ++dx) {
            if (std::abs(at(dx, dy) - at(-dx, -dy)) > tol) return false;
        }
    }
    return true;
}

ImagePlane convolve(const ImagePlane& img, const Kernel2D& k) { return filter_replicate(img, k, -1); }

ImagePlane correlate(const ImagePlane& img, const Kernel2D& k) { return filter_replicate(img, k, +1); }

ImagePlane convolve_separable(const ImagePlane& img, std::span<const double> taps_x,
                              std::span<const double> taps_y) {
    if (taps_x.size() % 2 == 0 || taps_y.size() % 2 == 0) {
        throw InvalidArgument("separable taps must have odd length");
    }
    const int w = img.width();
    const int h = img.height();
    if (static_cast<int>(taps_x.size()) > 2 * w || static_cast<int>(taps_y.size()) > 2 * h) {
        throw InvalidArgument("separable kernel exceeds twice the image size");
    }
    const int rx = static_cast<int>(taps_x.size()) / 2;
    const int ry = static_cast<int>(taps_y.size()) / 2;

    ImagePlane tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -rx; d <= rx; ++d) acc += taps_x[d + rx] * img.clamped(x - d, y);
            tmp(x, y) = acc;
        }
    }
    ImagePlane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int d = -ry; d <= ry; ++d) acc += taps_y[d + ry] * tmp.clamped(x, y - d);
            out(x, y) = acc;
        }
    }
    return out;
}

std::vector<double> gaussian_taps(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("gaussian sigma must be positive, got " + std::to_string(sigma));
    }
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
    for (int i = -r; i <= r; ++i) {
        taps[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    }
    const double s = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (auto& t : taps) t /= s;
    return taps;
}

Kernel2D gaussian_kernel(double sigma) {
    const auto g = gaussian_taps(sigma);
    const int n = static_cast<int>(g.size());
    std::vector<double> taps(g.size() * g.size());
    double s = 0.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            taps[static_cast<std::size_t>(y) * n + x] = g[y] * g[x];
            s += g[y] * g[x];
        }
    }
    for (auto& t : taps) t /= s;
    return Kernel2D(n, n, std::move(taps));
}

ImagePlane gaussian_blur(const ImagePlane& img, double sigma) {
    if (sigma == 0.0) return img;
    const auto g = gaussian_taps(sigma);
    return convolve_separable(img, g, g);
}

ImagePlane to_grayscale(const ColorImage& img) {
    const auto& r = img.channel(0).values();
    const auto& g = img.channel(1).values();
    const auto& b = img.channel(2).values();
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    }
    return ImagePlane(img.width(), img.height(), std::move(out));
}

double sample_bilinear(const ImagePlane& img, double x, double y) noexcept {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = x - fx;
    const double ay = y - fy;
    const double v00 = img.clamped(x0, y0);
    const double v10 = img.clamped(x0 + 1, y0);
    const double v01 = img.clamped(x0, y0 + 1);
    const double v11 = img.clamped(x0 + 1, y0 + 1);
    return (1 - ay) * ((1 - ax) * v00 + ax * v10) + ay * ((1 - ax) * v01 + ax * v11);
}

ImagePlane resize_bilinear(const ImagePlane& img, int width, int height) {
    ImagePlane out(width, height);
    const double sx = static_cast<double>(img.width()) / width;
    const double sy = static_cast<double>(img.height()) / height;
    for (int y = 0; y < height; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < width; ++x) {
            out(x, y) = sample_bilinear(img, (x + 0.5) * sx - 0.5, src_y);
        }
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace defence
