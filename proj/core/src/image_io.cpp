#include "defence/image_io.hpp"

#include "defence/atomic_file.hpp"
#include "defence/error.hpp"
#include "defence/fence_mask.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace defence {

namespace fs = std::filesystem;

namespace {

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct PngImage {
    png_image img;
    PngImage() {
        std::memset(&img, 0, sizeof img);
        img.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&img); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

struct RawPng {
    int width;
    int height;
    bool color;
    std::vector<std::uint8_t> pixels;  // RGB or gray, 8-bit
};

RawPng read_png(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file: " + path.string());
    PngImage png;
    if (!png_image_begin_read_from_file(&png.img, path.c_str())) {
        throw IoError("cannot decode PNG " + path.string() + ": " + png.img.message);
    }
    if (png.img.format & PNG_FORMAT_FLAG_LINEAR) {
        throw InvalidArgument("16-bit PNG not supported: " + path.string());
    }
    RawPng raw;
    raw.width = static_cast<int>(png.img.width);
    raw.height = static_cast<int>(png.img.height);
    raw.color = (png.img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.img.format = raw.color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    raw.pixels.resize(PNG_IMAGE_SIZE(png.img));
    if (!png_image_finish_read(&png.img, nullptr, raw.pixels.data(), 0, nullptr)) {
        throw IoError("cannot decode PNG " + path.string() + ": " + png.img.message);
    }
    return raw;
}

void write_png(const fs::path& path, int width, int height, bool color,
               const std::vector<std::uint8_t>& pixels) {
    write_atomically(path, [&](const fs::path& tmp) {
        PngImage png;
        png.img.width = static_cast<png_uint_32>(width);
        png.img.height = static_cast<png_uint_32>(height);
        png.img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
        if (!png_image_write_to_file(&png.img, tmp.c_str(), 0, pixels.data(), 0, nullptr)) {
            throw IoError("cannot write PNG " + path.string() + ": " + png.img.message);
        }
    });
}

}  // namespace

ColorImage read_image(const fs::path& path) {
    const RawPng raw = read_png(path);
    const std::size_t n = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
    if (!raw.color) {
        std::vector<double> g(raw.pixels.begin(), raw.pixels.begin() + static_cast<long>(n));
        return ColorImage::from_gray(ImagePlane(raw.width, raw.height, std::move(g)));
    }
    std::array<std::vector<double>, 3> ch;
    for (auto& c : ch) c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 3; ++c) ch[c][i] = raw.pixels[3 * i + c];
    }
    return ColorImage(std::array<ImagePlane, 3>{ImagePlane(raw.width, raw.height, std::move(ch[0])),
                                                ImagePlane(raw.width, raw.height, std::move(ch[1])),
                                                ImagePlane(raw.width, raw.height, std::move(ch[2]))});
}

void write_image(const fs::path& path, const ColorImage& img) {
    const std::size_t n = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.height());
    std::vector<std::uint8_t> px(3 * n);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto v = img.channel(c).values();
        for (std::size_t i = 0; i < n; ++i) px[3 * i + c] = quantize(v[i]);
    }
    write_png(path, img.width(), img.height(), true, px);
}

void write_image(const fs::path& path, const ImagePlane& img) {
    std::vector<std::uint8_t> px(img.size());
    const auto v = img.values();
    std::transform(v.begin(), v.end(), px.begin(), quantize);
    write_png(path, img.width(), img.height(), false, px);
}

FenceMask read_mask(const fs::path& path) {
    const RawPng raw = read_png(path);
    const std::size_t n = static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height);
    const std::size_t stride = raw.color ? 3 : 1;
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = raw.pixels[stride * i] >= 128 ? 1 : 0;
    return FenceMask(raw.width, raw.height, std::move(bits));
}

void write_mask(const fs::path& path, const FenceMask& mask) {
    std::vector<std::uint8_t> px(mask.size());
    const auto b = mask.bits();
    std::transform(b.begin(), b.end(), px.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
    write_png(path, mask.width(), mask.height(), false, px);
}

}  // namespace defence
