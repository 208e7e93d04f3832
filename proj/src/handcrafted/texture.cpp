#include <array>
#include <cmath>
#include <numbers>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"

namespace wastebench {

namespace {

constexpr int kGlcmLevels = 32;
// Offsets for 0, 45, 90 and 135 degrees (y grows downwards).
constexpr std::array<std::array<int, 2>, 4> kGlcmOffsets = {{{1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

struct RingOffset {
    double dx;
    double dy;
};

std::array<RingOffset, 8> ring_offsets() {
    std::array<RingOffset, 8> out{};
    for (int p = 0; p < 8; ++p) {
        const double theta = 2.0 * std::numbers::pi * p / 8.0;
        double dx = std::cos(theta);
        double dy = -std::sin(theta);
        if (std::abs(dx) < 1e-12) dx = 0.0;
        if (std::abs(dy) < 1e-12) dy = 0.0;
        out[p] = {dx, dy};
    }
    return out;
}

double bilinear(const std::vector<std::uint8_t>& gray, int width, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto at = [&](int xx, int yy) { return static_cast<double>(gray[static_cast<std::size_t>(yy) * width + xx]); };
    double v = (1 - fx) * (1 - fy) * at(x0, y0);
    if (fx > 0) v += fx * (1 - fy) * at(x0 + 1, y0);
    if (fy > 0) v += (1 - fx) * fy * at(x0, y0 + 1);
    if (fx > 0 && fy > 0) v += fx * fy * at(x0 + 1, y0 + 1);
    return v;
}

}  // namespace

bool glcm_matrix(const std::vector<std::uint8_t>& levels, const Mask& mask, int dx, int dy, int level_count,
                 std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(level_count) * level_count, 0.0);
    double total = 0.0;
    for (int y = 0; y < mask.height; ++y) {
        const int ny = y + dy;
        if (ny < 0 || ny >= mask.height) continue;
        for (int x = 0; x < mask.width; ++x) {
            const int nx = x + dx;
            if (nx < 0 || nx >= mask.width || !mask.at(x, y) || !mask.at(nx, ny)) continue;
            const int a = levels[static_cast<std::size_t>(y) * mask.width + x];
            const int b = levels[static_cast<std::size_t>(ny) * mask.width + nx];
            out[static_cast<std::size_t>(a) * level_count + b] += 1.0;
            out[static_cast<std::size_t>(b) * level_count + a] += 1.0;
            total += 2.0;
        }
    }
    if (total == 0) return false;
    for (auto& v : out) v /= total;
    return true;
}

FeatureBlock extract_glcm(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    auto levels = gray8_plane(img);
    for (auto& v : levels) v = static_cast<std::uint8_t>(v * kGlcmLevels / 256);

    FeatureBlock block;
    block.kind = BlockKind::Glcm;
    bool any = false;
    std::vector<double> P;
    for (const auto& off : kGlcmOffsets) {
        if (!glcm_matrix(levels, mask, off[0], off[1], kGlcmLevels, P)) {
            block.values.insert(block.values.end(), 5, 0.0);
            continue;
        }
        any = true;
        double contrast = 0, dissimilarity = 0, homogeneity = 0, asm_ = 0, mean = 0;
        for (int i = 0; i < kGlcmLevels; ++i) {
            for (int j = 0; j < kGlcmLevels; ++j) {
                const double p = P[static_cast<std::size_t>(i) * kGlcmLevels + j];
                const double d = i - j;
                contrast += p * d * d;
                dissimilarity += p * std::abs(d);
                homogeneity += p / (1.0 + d * d);
                asm_ += p * p;
                mean += p * i;
            }
        }
        // P is symmetric, so both marginals share mean and variance.
        double var = 0, cov = 0;
        for (int i = 0; i < kGlcmLevels; ++i) {
            for (int j = 0; j < kGlcmLevels; ++j) {
                const double p = P[static_cast<std::size_t>(i) * kGlcmLevels + j];
                var += p * (i - mean) * (i - mean);
                cov += p * (i - mean) * (j - mean);
            }
        }
        const double correlation = var > 1e-15 ? cov / var : 0.0;
        block.values.insert(block.values.end(),
                            {contrast, dissimilarity, homogeneity, std::sqrt(asm_), correlation});
    }
    if (!any) throw DegenerateInput("glcm found no foreground pixel pair");
    return block;
}

int lbp_code(const std::vector<std::uint8_t>& gray, int width, int /*height*/, int x, int y) {
    static const auto ring = ring_offsets();
    const double center = gray[static_cast<std::size_t>(y) * width + x];
    std::array<int, 8> bits{};
    int ones = 0;
    for (int p = 0; p < 8; ++p) {
        const double v = bilinear(gray, width, x + ring[p].dx, y + ring[p].dy);
        bits[p] = v >= center - 1e-9 ? 1 : 0;
        ones += bits[p];
    }
    int transitions = 0;
    for (int p = 0; p < 8; ++p) transitions += bits[p] != bits[(p + 7) % 8];
    return transitions <= 2 ? ones : 9;
}

FeatureBlock extract_lbp(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    const auto gray = gray8_plane(img);
    FeatureBlock block;
    block.kind = BlockKind::Lbp;
    block.values.assign(10, 0.0);
    double n = 0;
    for (int y = 1; y + 1 < img.height; ++y) {
        for (int x = 1; x + 1 < img.width; ++x) {
            if (!mask.at(x, y)) continue;
            block.values[lbp_code(gray, img.width, img.height, x, y)] += 1.0;
            n += 1.0;
        }
    }
    if (n == 0) throw DegenerateInput("lbp needs an interior foreground pixel");
    for (auto& v : block.values) v /= n;
    return block;
}

}  // namespace wastebench
