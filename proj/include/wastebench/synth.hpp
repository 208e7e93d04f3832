#pragma once

#include <cstdint>
#include <filesystem>

#include "wastebench/classifiers.hpp"
#include "wastebench/image.hpp"

namespace wastebench {

struct SynthOptions {
    int classes = 3;
    int per_class = 100;
    int side = 128;
    std::uint64_t seed = 0;
};

/// One image of the synthetic shape/colour corpus. Classes cycle through
/// disc, square and striped patch, each with its own base colour, on a dark
/// noisy background.
ImageBuffer synth_image(int class_id, std::uint64_t seed, int side);

/// Writes root/class_XX/img_YYYY.png and returns the number of images.
std::size_t write_synth_corpus(const std::filesystem::path& root, const SynthOptions& opts);

/// Gaussian features in which only the `informative` columns depend on the
/// class: each class has a +/-1 mean code on them, everything else is N(0, 1).
struct FeatureBenchmark {
    Matrix X_train;
    Matrix X_test;
    Labels y_train;
    Labels y_test;
    std::vector<std::size_t> informative;  // ascending
};
FeatureBenchmark make_feature_benchmark(std::size_t n_train, std::size_t n_test, std::size_t d,
                                        std::size_t informative, int classes, std::uint64_t seed);

}  // namespace wastebench
