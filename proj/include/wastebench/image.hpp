#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <opencv2/core.hpp>

namespace wastebench {

/// Decoded 8-bit RGB raster, row-major, three bytes per pixel.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, std::uint8_t fill = 0);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool empty() const { return width <= 0 || height <= 0; }

    std::uint8_t* at(int x, int y) { return &pixels[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* at(int x, int y) const {
        return &pixels[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    bool operator==(const ImageBuffer&) const = default;
};

/// Per-pixel foreground flags (0 = background, 1 = foreground).
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    static Mask full(int w, int h) { return Mask(w, h, 1); }

    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;

    bool operator==(const Mask&) const = default;
};

struct CropBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const CropBox&) const = default;
};

/// 0.299 R + 0.587 G + 0.114 B, unrounded.
inline double luma(const std::uint8_t* rgb) {
    return 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
}

/// Grayscale plane (row-major) with values in [0, 255].
std::vector<double> gray_plane(const ImageBuffer& img);
/// Grayscale rounded to 8 bits.
std::vector<std::uint8_t> gray8_plane(const ImageBuffer& img);

/// HSV planes in the 8-bit convention (H in [0, 180), S and V in [0, 256)),
/// interleaved as H, S, V per pixel.
std::vector<std::uint8_t> hsv_pixels(const ImageBuffer& img);

cv::Mat to_bgr_mat(const ImageBuffer& img);
ImageBuffer from_bgr_mat(const cv::Mat& bgr);

/// Keeps pixels where mask is set, zeroes the rest.
ImageBuffer apply_mask(const ImageBuffer& img, const Mask& mask);
ImageBuffer crop(const ImageBuffer& img, const CropBox& box);
Mask crop(const Mask& mask, const CropBox& box);

/// Lossless PNG writer and 8-bit image reader.
void write_png(const ImageBuffer& img, const std::filesystem::path& path);
/// Mask as binary PGM (P5), 0 or 255 per pixel.
void write_pgm(const Mask& mask, const std::filesystem::path& path);

}  // namespace wastebench
