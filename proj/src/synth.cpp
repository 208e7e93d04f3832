#include "wastebench/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "wastebench/errors.hpp"
#include "wastebench/random.hpp"

namespace fs = std::filesystem;

namespace wastebench {

namespace {

constexpr std::array<std::array<int, 3>, 6> kPalette{{
    {220, 50, 40}, {40, 190, 60}, {50, 90, 230}, {230, 200, 40}, {200, 60, 200}, {40, 200, 200},
}};

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

ImageBuffer synth_image(int class_id, std::uint64_t seed, int side) {
    if (side < 16) throw ConfigError("synthetic images need side >= 16");
    if (class_id < 0) throw ConfigError("negative class id");
    Rng rng(seed);
    ImageBuffer img(side, side);
    const double bg = rng.uniform(12, 40);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double n = rng.uniform(-10, 10);
            const double g = rng.uniform(-3, 3);
            const double b = rng.uniform(-3, 3);
            img.set(x, y, clamp8(bg + n), clamp8(bg + n + g), clamp8(bg + n + b));
        }

    const auto& base = kPalette[static_cast<std::size_t>(class_id) % kPalette.size()];
    std::array<double, 3> colour{};
    for (int c = 0; c < 3; ++c) colour[c] = base[c] + rng.uniform(-20, 20);
    const double s = side;
    const double cx = s * rng.uniform(0.42, 0.58);
    const double cy = s * rng.uniform(0.42, 0.58);
    const double extent = s * rng.uniform(0.2, 0.3);  // radius or half-size
    const int shape = class_id % 3;
    const double stripe = std::max(2.0, s * rng.uniform(0.04, 0.07));

    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double dx = x + 0.5 - cx;
            const double dy = y + 0.5 - cy;
            bool inside = false;
            double shade = 1.0;
            if (shape == 0) {
                inside = dx * dx + dy * dy <= extent * extent;
            } else if (shape == 1) {
                inside = std::abs(dx) <= extent && std::abs(dy) <= extent;
            } else {
                inside = std::abs(dx) <= 1.1 * extent && std::abs(dy) <= 0.8 * extent;
                if (static_cast<int>(std::floor((dy + 0.8 * extent) / stripe)) % 2) shade = 0.55;
            }
            if (!inside) continue;
            const double n = rng.uniform(-8, 8);
            img.set(x, y, clamp8(colour[0] * shade + n), clamp8(colour[1] * shade + n), clamp8(colour[2] * shade + n));
        }
    }
    return img;
}

std::size_t write_synth_corpus(const fs::path& root, const SynthOptions& opts) {
    if (opts.classes < 1 || opts.per_class < 1) throw ConfigError("synthetic corpus needs classes and images");
    std::size_t written = 0;
    for (int c = 0; c < opts.classes; ++c) {
        char dir[32];
        std::snprintf(dir, sizeof dir, "class_%02d", c);
        const fs::path cls = root / dir;
        fs::create_directories(cls);
        for (int i = 0; i < opts.per_class; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "img_%04d.png", i);
            const auto index = static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(opts.per_class) + i;
            write_png(synth_image(c, derive_seed(opts.seed, index), opts.side), cls / name);
            ++written;
        }
    }
    return written;
}

FeatureBenchmark make_feature_benchmark(std::size_t n_train, std::size_t n_test, std::size_t d,
                                        std::size_t informative, int classes, std::uint64_t seed) {
    if (classes < 2) throw ConfigError("benchmark needs at least two classes");
    if (informative > d) throw ConfigError("more informative columns than columns");
    Rng rng(seed);
    FeatureBenchmark b;
    std::vector<std::size_t> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j] = j;
    rng.shuffle(std::span<std::size_t>(cols));
    b.informative.assign(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(informative));
    std::sort(b.informative.begin(), b.informative.end());

    // codes[c][j]: mean of class c on informative column j; never equal across all classes.
    std::vector<std::vector<double>> codes(static_cast<std::size_t>(classes), std::vector<double>(informative));
    for (std::size_t j = 0; j < informative; ++j) {
        bool varied = false;
        while (!varied) {
            for (auto& row : codes) row[j] = rng.uniform() < 0.5 ? -1.0 : 1.0;
            for (const auto& row : codes) varied = varied || row[j] != codes[0][j];
        }
    }
    auto draw = [&](std::size_t n, Matrix& X, Labels& y) {
        X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
            y[i] = c;
            for (std::size_t j = 0; j < d; ++j) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
            for (std::size_t k = 0; k < informative; ++k)
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b.informative[k])) += codes[static_cast<std::size_t>(c)][k];
        }
    };
    draw(n_train, b.X_train, b.y_train);
    draw(n_test, b.X_test, b.y_test);
    return b;
}

}  // namespace wastebench
