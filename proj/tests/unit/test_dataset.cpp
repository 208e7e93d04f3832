#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>

#include "support.hpp"
#include "wastebench/dataset.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"

using namespace wastebench;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

void write_class(const fs::path& root, const std::string& cls, int count, std::uint64_t seed) {
    fs::create_directories(root / cls);
    for (int i = 0; i < count; ++i) {
        write_png(testing::random_image(8, 8, seed + i), root / cls / ("im" + std::to_string(i) + ".png"));
    }
}

LabeledDataset fake_dataset(const std::vector<std::size_t>& sizes) {
    LabeledDataset ds;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        ds.class_names.push_back("c" + std::to_string(c));
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            ds.samples.push_back({"c" + std::to_string(c) + "/" + std::to_string(i) + ".png", static_cast<int>(c),
                                  Split::Unassigned});
        }
    }
    return ds;
}

// Round half up on exact rationals num/den, with the val+test double-half rule.
SplitCounts rational_counts(std::size_t n, long val_num, long test_num, long den) {
    auto round_half_up = [&](long num) { return (2 * num * static_cast<long>(n) + den) / (2 * den); };
    auto is_half = [&](long num) { return (2 * num * static_cast<long>(n)) % (2 * den) == den; };
    long v = round_half_up(val_num);
    long t = round_half_up(test_num);
    if (is_half(val_num) && is_half(test_num) && t > 0) --t;
    return {n - static_cast<std::size_t>(v + t), static_cast<std::size_t>(v), static_cast<std::size_t>(t)};
}

std::map<std::pair<int, Split>, std::size_t> tally(const LabeledDataset& ds) {
    std::map<std::pair<int, Split>, std::size_t> t;
    for (const auto& s : ds.samples) ++t[{s.class_id, s.split}];
    return t;
}

}  // namespace

TEST_CASE("scan lists classes lexicographically and skips undecodable files") {
    TempDir dir;
    write_class(dir.path(), "glass", 3, 10);
    write_class(dir.path(), "cardboard", 2, 20);
    std::ofstream(dir / "glass/broken.png") << "not an image";
    const auto res = scan_directory(dir.path());
    CHECK(res.dataset.samples.size() == 5);
    CHECK(res.dataset.class_names == std::vector<std::string>{"cardboard", "glass"});
    CHECK(res.skipped.size() == 1);
    CHECK(res.dataset.samples[0].class_id == 0);
    CHECK(res.dataset.samples[4].class_id == 1);
    for (const auto& s : res.dataset.samples) CHECK(s.split == Split::Unassigned);
}

TEST_CASE("scan of six class directories yields six classes") {
    TempDir dir;
    for (const char* c : {"glass", "paper", "cardboard", "plastic", "metal", "trash"}) write_class(dir.path(), c, 1, 3);
    CHECK(scan_directory(dir.path()).dataset.class_count() == 6);
}

TEST_CASE("scan of a root without subdirectories fails") {
    TempDir dir;
    CHECK_THROWS_AS(scan_directory(dir.path()), ConfigError);
}

TEST_CASE("80/10/10 split of 100 per class is exact") {
    const auto ds = split(fake_dataset({100, 100, 100}), {0.8, 0.1, 0.1}, 5);
    const auto t = tally(ds);
    for (int c = 0; c < 3; ++c) {
        CHECK(t.at({c, Split::Train}) == 80);
        CHECK(t.at({c, Split::Val}) == 10);
        CHECK(t.at({c, Split::Test}) == 10);
    }
}

TEST_CASE("all-train ratios keep every sample in train") {
    const auto ds = split(fake_dataset({7, 3}), {1.0, 0.0, 0.0}, 1);
    for (const auto& s : ds.samples) CHECK(s.split == Split::Train);
}

TEST_CASE("split counts follow the rounding rule") {
    const auto ds = split(fake_dataset({4, 3, 3}), {0.7, 0.15, 0.15}, 42);
    const auto t = tally(ds);
    for (int c = 0; c < 3; ++c) {
        const std::size_t n = c == 0 ? 4 : 3;
        const auto want = rational_counts(n, 15, 15, 100);
        auto get = [&](Split s) { return t.count({c, s}) ? t.at({c, s}) : 0; };
        CHECK(get(Split::Train) == want.train);
        CHECK(get(Split::Val) == want.val);
        CHECK(get(Split::Test) == want.test);
    }
    for (std::size_t n = 1; n <= 60; ++n) {
        const auto got = split_counts(n, {0.7, 0.15, 0.15});
        const auto want = rational_counts(n, 15, 15, 100);
        CHECK(got.train == want.train);
        CHECK(got.val == want.val);
        CHECK(got.test == want.test);
        const auto got2 = split_counts(n, {0.8, 0.1, 0.1});
        const auto want2 = rational_counts(n, 1, 1, 10);
        CHECK(got2.val == want2.val);
        CHECK(got2.test == want2.test);
    }
}

TEST_CASE("split is deterministic and independent of worker count") {
    const auto base = fake_dataset({23, 17, 31});
    set_worker_count(1);
    const auto a = split(base, {0.8, 0.1, 0.1}, 9);
    set_worker_count(4);
    const auto b = split(base, {0.8, 0.1, 0.1}, 9);
    set_worker_count(0);
    CHECK(a.samples == b.samples);
    const auto c = split(base, {0.8, 0.1, 0.1}, 10);
    CHECK_FALSE(a.samples == c.samples);
}

TEST_CASE("stratified proportions deviate by less than one sample") {
    const std::vector<std::size_t> sizes{13, 29, 7, 50};
    const SplitRatios r{0.6, 0.25, 0.15};
    const auto t = tally(split(fake_dataset(sizes), r, 3));
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        const double n = static_cast<double>(sizes[c]);
        auto frac = [&](Split s) {
            const auto key = std::make_pair(static_cast<int>(c), s);
            return (t.count(key) ? static_cast<double>(t.at(key)) : 0.0) / n;
        };
        CHECK(std::abs(frac(Split::Train) - r.train) < 1.0 / n + 1e-12);
        CHECK(std::abs(frac(Split::Val) - r.val) < 1.0 / n);
        CHECK(std::abs(frac(Split::Test) - r.test) < 1.0 / n);
    }
}

TEST_CASE("split rejects bad ratios and tiny classes") {
    CHECK_THROWS_AS(split(fake_dataset({10}), {0.5, 0.2, 0.2}, 0), ConfigError);
    CHECK_THROWS_AS(split(fake_dataset({10}), {1.2, -0.1, -0.1}, 0), ConfigError);
    CHECK_THROWS_AS(split(fake_dataset({2, 10}), {0.8, 0.1, 0.1}, 0), StratificationError);
}

TEST_CASE("manifest round trip") {
    TempDir dir;
    auto ds = split(fake_dataset({5, 4}), {0.6, 0.2, 0.2}, 2);
    ds.samples[0].path = "odd, name/with \"quotes\".png";
    write_manifest(ds, dir / "m.csv");
    const auto back = read_manifest(dir / "m.csv");
    CHECK(back.samples == ds.samples);
}

TEST_CASE("resize keeps same-size images and constant colours") {
    const auto img = testing::random_image(40, 40, 1);
    CHECK(resize_square(img, 40) == img);
    const auto c = testing::constant_image(80, 80, 10, 200, 30);
    CHECK(resize_square(c, 40) == testing::constant_image(40, 40, 10, 200, 30));
}

TEST_CASE("bilinear upscale of a checkerboard keeps the corner colours") {
    ImageBuffer board(2, 2);
    board.set(0, 0, 255, 255, 255);
    board.set(1, 1, 255, 255, 255);
    const auto big = resize_square(board, 400);
    // Pixel centres at the corners map outside the source grid and clamp to
    // the corner samples, so the bilinear weights are all on one pixel.
    CHECK(big.at(0, 0)[0] == 255);
    CHECK(big.at(399, 399)[1] == 255);
    CHECK(big.at(399, 0)[2] == 0);
    CHECK(big.at(0, 399)[0] == 0);
}

TEST_CASE("load_and_resize decodes, resizes and reports decode failures") {
    TempDir dir;
    const auto img = testing::random_image(30, 20, 4);
    write_png(img, dir / "a.png");
    const auto out = load_and_resize({dir / "a.png", 0, Split::Train}, 16);
    CHECK(out.width == 16);
    CHECK(out.height == 16);
    write_png(testing::random_image(16, 16, 5), dir / "b.png");
    CHECK(load_and_resize({dir / "b.png", 0, Split::Train}, 16) == testing::random_image(16, 16, 5));
    std::ofstream(dir / "c.png") << "junk";
    CHECK_THROWS_AS(load_and_resize({dir / "c.png", 0, Split::Train}, 16), DecodeError);
}

TEST_CASE("hflip is an involution and zero brightness is the identity") {
    const auto img = testing::random_image(17, 9, 3);
    const auto once = apply_augmentation(img, AugmentKind::HFlip, 0.0);
    CHECK_FALSE(once == img);
    CHECK(apply_augmentation(once, AugmentKind::HFlip, 0.0) == img);
    CHECK(apply_augmentation(img, AugmentKind::Brightness, 0.0) == img);
}

TEST_CASE("augment is deterministic and keeps dimensions") {
    const auto img = testing::random_image(33, 21, 6);
    for (std::size_t i = 0; i < 12; ++i) {
        const auto pol = default_policy_for(77, i);
        const auto a = augment(img, pol, derive_seed(77, i));
        CHECK(a == augment(img, pol, derive_seed(77, i)));
        CHECK(a.width == 33);
        CHECK(a.height == 21);
    }
}

TEST_CASE("rotating a centred square preserves its bright mass") {
    const int side = 200, half = 40;
    ImageBuffer img(side, side);
    for (int y = 100 - half; y < 100 + half; ++y)
        for (int x = 100 - half; x < 100 + half; ++x) img.set(x, y, 255, 255, 255);
    const auto rot = apply_augmentation(img, AugmentKind::Rotation, 15.0);

    // Reference: pixel centres inside the square rotated by 15 degrees about
    // the image centre, counted by point-in-square tests.
    const double th = 15.0 * std::numbers::pi / 180.0, c = 99.5;
    std::size_t reference = 0, measured = 0;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double dx = x - c, dy = y - c;
            const double u = std::cos(th) * dx - std::sin(th) * dy;
            const double v = std::sin(th) * dx + std::cos(th) * dy;
            reference += std::abs(u) <= half && std::abs(v) <= half;
            measured += rot.at(x, y)[0] >= 128;
        }
    CHECK(std::abs(static_cast<double>(measured) - reference) <= 0.01 * reference);
    CHECK(std::abs(static_cast<double>(measured) - 4.0 * half * half) <= 0.01 * 4.0 * half * half);
}
