#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wastebench/image.hpp"

namespace wastebench {

enum class Split : std::uint8_t { Unassigned, Train, Val, Test };

const char* to_string(Split s);
Split parse_split(const std::string& s);

struct SampleRef {
    std::filesystem::path path;
    int class_id = 0;
    Split split = Split::Unassigned;

    bool operator==(const SampleRef&) const = default;
};

/// Samples in scan order (lexicographic class, then lexicographic file name).
/// Treated as immutable once built; split() returns a new dataset.
struct LabeledDataset {
    std::vector<SampleRef> samples;
    std::vector<std::string> class_names;
    std::uint64_t seed = 0;

    std::size_t class_count() const { return class_names.size(); }
    std::vector<std::size_t> indices_of(Split s) const;
    std::vector<int> labels() const;
};

struct ScanResult {
    LabeledDataset dataset;
    std::vector<std::filesystem::path> skipped;
};

/// One class per subdirectory of root; undecodable images land in `skipped`.
ScanResult scan_directory(const std::filesystem::path& root);

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

/// Per-class counts produced by the rounding rule: val and test are rounded,
/// train receives the remainder.
struct SplitCounts {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};
SplitCounts split_counts(std::size_t class_size, const SplitRatios& ratios);

/// Stratified deterministic split.
LabeledDataset split(const LabeledDataset& ds, const SplitRatios& ratios, std::uint64_t seed);

/// Split manifest: CSV `path,class_id,split`.
void write_manifest(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_manifest(const std::filesystem::path& path);

ImageBuffer decode_image(const std::filesystem::path& path);
/// Bilinear resize to side x side; identity when already that size.
ImageBuffer resize_square(const ImageBuffer& img, int side);
ImageBuffer load_and_resize(const SampleRef& ref, int side = 400);

enum class AugmentKind { HFlip, Rotation, Brightness };

/// `magnitude` bounds the drawn parameter: degrees for rotation, a fraction
/// for brightness. Ignored for hflip.
struct AugmentPolicy {
    AugmentKind kind = AugmentKind::HFlip;
    double magnitude = 0.0;

    static AugmentPolicy hflip() { return {AugmentKind::HFlip, 0.0}; }
    static AugmentPolicy rotation(double max_degrees = 15.0) { return {AugmentKind::Rotation, max_degrees}; }
    static AugmentPolicy brightness(double max_fraction = 0.10) { return {AugmentKind::Brightness, max_fraction}; }
};

/// Applies one transform with an explicit parameter (degrees or fraction).
ImageBuffer apply_augmentation(const ImageBuffer& img, AugmentKind kind, double parameter);
/// Draws the parameter uniformly from [-magnitude, magnitude] with `seed`.
ImageBuffer augment(const ImageBuffer& img, const AugmentPolicy& policy, std::uint64_t seed);
/// The policy used for training-set augmentation of sample `index`.
AugmentPolicy default_policy_for(std::uint64_t seed, std::size_t index);

}  // namespace wastebench
