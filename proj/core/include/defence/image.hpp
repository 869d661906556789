#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace defence {

/// Single-channel floating point raster, row-major, values nominally in [0, 255].
class ImagePlane {
public:
    ImagePlane(int width, int height, double fill = 0.0);
    ImagePlane(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    double operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    /// Edge-replicated read; (x, y) may lie outside the raster.
    double clamped(int x, int y) const noexcept;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& vector() const noexcept { return data_; }

    bool same_shape(const ImagePlane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

/// Three planes (R, G, B) of identical size.
class ColorImage {
public:
    explicit ColorImage(std::array<ImagePlane, 3> planes);
    ColorImage(int width, int height, double fill = 0.0);

    /// Replicates a single plane into all three channels.
    static ColorImage from_gray(const ImagePlane& gray);

    int width() const noexcept { return planes_[0].width(); }
    int height() const noexcept { return planes_[0].height(); }

    ImagePlane& channel(std::size_t c) { return planes_.at(c); }
    const ImagePlane& channel(std::size_t c) const { return planes_.at(c); }

    friend bool operator==(const ColorImage&, const ColorImage&) = default;

private:
    std::array<ImagePlane, 3> planes_;
};

/// Dense 2-D filter with odd sides; the anchor is the center tap.
class Kernel2D {
public:
    Kernel2D(int width, int height, std::vector<double> taps);

    static Kernel2D identity() { return Kernel2D(1, 1, {1.0}); }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int radius_x() const noexcept { return width_ / 2; }
    int radius_y() const noexcept { return height_ / 2; }

    /// Tap at offset (dx, dy) from the center.
    double at(int dx, int dy) const noexcept {
        return taps_[static_cast<std::size_t>(dy + radius_y()) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(dx + radius_x())];
    }

    std::span<const double> taps() const noexcept { return taps_; }
    double sum() const noexcept;
    bool is_point_symmetric(double tol = 0.0) const noexcept;

private:
    int width_;
    int height_;
    std::vector<double> taps_;
};

/// out(p) = sum_q k(q) * img(p - q), edge replication outside the raster.
ImagePlane convolve(const ImagePlane& img, const Kernel2D& k);

/// out(p) = sum_q k(q) * img(p + q), edge replication. The transpose of
/// `convolve` on the interior.
ImagePlane correlate(const ImagePlane& img, const Kernel2D& k);

/// Row pass with `taps_x`, then column pass with `taps_y`; both odd-length
/// and centered. Equivalent to `convolve` with the outer-product kernel.
ImagePlane convolve_separable(const ImagePlane& img, std::span<const double> taps_x,
                              std::span<const double> taps_y);

/// Normalized 1-D Gaussian of length 2*ceil(3*sigma)+1.
std::vector<double> gaussian_taps(double sigma);

/// Square normalized Gaussian kernel of side 2*ceil(3*sigma)+1.
Kernel2D gaussian_kernel(double sigma);

/// Gaussian blur through the separable path. sigma == 0 returns a copy.
ImagePlane gaussian_blur(const ImagePlane& img, double sigma);

/// Luma: 0.299 R + 0.587 G + 0.114 B.
ImagePlane to_grayscale(const ColorImage& img);

/// Bilinear resampling to (width, height) with pixel-center alignment.
ImagePlane resize_bilinear(const ImagePlane& img, int width, int height);

/// Bilinear sample at fractional (x, y) with edge replication.
double sample_bilinear(const ImagePlane& img, double x, double y) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

}  // namespace defence
