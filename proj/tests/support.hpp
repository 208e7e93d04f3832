#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "wastebench/image.hpp"
#include "wastebench/random.hpp"

namespace testing {

namespace fs = std::filesystem;

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& stem = "wb") {
        std::random_device rd;
        path_ = fs::temp_directory_path() / (stem + "_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline wastebench::ImageBuffer random_image(int w, int h, std::uint64_t seed) {
    wastebench::Rng rng(seed);
    wastebench::ImageBuffer img(w, h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.index(256));
    return img;
}

inline wastebench::ImageBuffer constant_image(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    wastebench::ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, r, g, b);
    return img;
}

// Pixel-centre rasterization of a disc.
inline wastebench::Mask disc_mask(int w, int h, double cx, double cy, double r) {
    wastebench::Mask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
            m.at(x, y) = dx * dx + dy * dy <= r * r ? 1 : 0;
        }
    return m;
}

inline wastebench::ImageBuffer paint(const wastebench::Mask& m, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    wastebench::ImageBuffer img(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) img.set(x, y, r, g, b);
    return img;
}

inline double iou(const wastebench::Mask& a, const wastebench::Mask& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        inter += a.values[i] && b.values[i];
        uni += a.values[i] || b.values[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace testing
