#include <array>
#include <cmath>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"

namespace wastebench {

namespace {

void check_mask(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
}

}  // namespace

FeatureBlock extract_color_basic(const ImageBuffer& img, const Mask& mask) {
    check_mask(img, mask);
    const std::size_t n = mask.count();
    if (n < 2) throw DegenerateInput("color_basic needs at least two foreground pixels");
    const auto hsv = hsv_pixels(img);

    FeatureBlock block;
    block.kind = BlockKind::ColorBasic;
    block.values.reserve(15);
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        std::array<std::size_t, 256> hist{};
        for (std::size_t i = 0; i < mask.values.size(); ++i) {
            if (!mask.values[i]) continue;
            const std::uint8_t v = hsv[3 * i + c];
            sum += v;
            ++hist[v];
        }
        const double mean = sum / static_cast<double>(n);
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < mask.values.size(); ++i) {
            if (!mask.values[i]) continue;
            const double d = hsv[3 * i + c] - mean;
            const double d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= static_cast<double>(n);
        m3 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        const double sd = std::sqrt(m2);
        double entropy = 0.0;
        for (auto count : hist) {
            if (!count) continue;
            const double p = static_cast<double>(count) / static_cast<double>(n);
            entropy -= p * std::log2(p);
        }
        block.values.push_back(mean);
        block.values.push_back(sd);
        block.values.push_back(m2 > 0 ? m3 / (m2 * sd) : 0.0);
        block.values.push_back(m2 > 0 ? m4 / (m2 * m2) : 0.0);
        block.values.push_back(entropy);
    }
    return block;
}

FeatureBlock extract_color_hist(const ImageBuffer& img, const Mask& mask) {
    check_mask(img, mask);
    const std::size_t n = mask.count();
    if (n == 0) throw DegenerateInput("color_hist needs a foreground pixel");
    const auto hsv = hsv_pixels(img);

    FeatureBlock block;
    block.kind = BlockKind::ColorHist;
    block.values.assign(1024, 0.0);
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (!mask.values[i]) continue;
        const std::uint8_t* h = &hsv[3 * i];
        const std::uint8_t* rgb = &img.pixels[3 * i];
        const int hsv_bin = (h[0] * 8 / 180) * 64 + (h[1] >> 5) * 8 + (h[2] >> 5);
        const int bgr_bin = (rgb[2] >> 5) * 64 + (rgb[1] >> 5) * 8 + (rgb[0] >> 5);
        block.values[hsv_bin] += 1.0;
        block.values[512 + bgr_bin] += 1.0;
    }
    for (auto& v : block.values) v /= static_cast<double>(n);
    return block;
}

}  // namespace wastebench
