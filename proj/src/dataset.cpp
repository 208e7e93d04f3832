#include "wastebench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "csv.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/random.hpp"

namespace fs = std::filesystem;

namespace wastebench {

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Unassigned: break;
    }
    return "none";
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    if (s.empty() || s == "none") return Split::Unassigned;
    throw FormatError("unknown split '" + s + "'");
}

std::vector<std::size_t> LabeledDataset::indices_of(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].split == s) out.push_back(i);
    }
    return out;
}

std::vector<int> LabeledDataset::labels() const {
    std::vector<int> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.class_id);
    return out;
}

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

bool decodable(const fs::path& p) {
    return !cv::imread(p.string(), cv::IMREAD_COLOR | cv::IMREAD_IGNORE_ORIENTATION).empty();
}

}  // namespace

ScanResult scan_directory(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw ConfigError("dataset root is not a directory: " + root.string());

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    }
    if (class_dirs.empty()) throw ConfigError("dataset root has no class subdirectories: " + root.string());
    std::sort(class_dirs.begin(), class_dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    ScanResult result;
    for (std::size_t c = 0; c < class_dirs.size(); ++c) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
            if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
        std::size_t kept = 0;
        for (const auto& f : files) {
            if (!decodable(f)) {
                result.skipped.push_back(f);
                continue;
            }
            result.dataset.samples.push_back({f, static_cast<int>(c), Split::Unassigned});
            ++kept;
        }
        if (kept == 0) {
            throw ConfigError("class directory holds no decodable image: " + class_dirs[c].string());
        }
        result.dataset.class_names.push_back(class_dirs[c].filename().string());
    }
    return result;
}

namespace {

void check_ratios(const SplitRatios& r) {
    if (r.train < 0 || r.val < 0 || r.test < 0) throw ConfigError("split fractions must be non-negative");
    if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
}

bool is_half(double x) { return std::abs(x - std::floor(x) - 0.5) < 1e-9; }

}  // namespace

SplitCounts split_counts(std::size_t n, const SplitRatios& r) {
    const double val_exact = r.val * static_cast<double>(n);
    const double test_exact = r.test * static_cast<double>(n);
    auto val = static_cast<std::size_t>(std::llround(val_exact));
    auto test = static_cast<std::size_t>(std::llround(test_exact));
    // Two upward half-roundings would shift a whole sample out of train.
    if (is_half(val_exact) && is_half(test_exact) && test > 0) --test;
    val = std::min(val, n);
    test = std::min(test, n - val);
    return {n - val - test, val, test};
}

LabeledDataset split(const LabeledDataset& ds, const SplitRatios& ratios, std::uint64_t seed) {
    check_ratios(ratios);
    const int nonzero = (ratios.train > 0) + (ratios.val > 0) + (ratios.test > 0);

    std::vector<std::vector<std::size_t>> by_class(ds.class_count());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const int c = ds.samples[i].class_id;
        if (c < 0 || static_cast<std::size_t>(c) >= ds.class_count()) {
            throw ValidationError("sample class id out of range: " + ds.samples[i].path.string());
        }
        by_class[c].push_back(i);
    }

    LabeledDataset out = ds;
    out.seed = seed;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.size() < static_cast<std::size_t>(nonzero)) {
            throw StratificationError("class '" + ds.class_names[c] + "' has " + std::to_string(members.size()) +
                                      " samples for " + std::to_string(nonzero) + " non-empty splits");
        }
        Rng rng(derive_seed(seed, c));
        rng.shuffle(std::span<std::size_t>(members));
        const SplitCounts counts = split_counts(members.size(), ratios);
        for (std::size_t j = 0; j < members.size(); ++j) {
            Split s = Split::Test;
            if (j < counts.train) {
                s = Split::Train;
            } else if (j < counts.train + counts.val) {
                s = Split::Val;
            }
            out.samples[members[j]].split = s;
        }
    }
    return out;
}

void write_manifest(const LabeledDataset& ds, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "path,class_id,split\n";
    for (const auto& s : ds.samples) {
        out << csv::quote(s.path.string()) << ',' << s.class_id << ',' << to_string(s.split) << '\n';
    }
    if (!out) throw IoError("cannot write " + path.string());
}

LabeledDataset read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty manifest");

    LabeledDataset ds;
    std::map<int, std::string> names;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_record(line);
        if (fields.size() != 3) throw FormatError(path.string() + ": line " + std::to_string(line_no));
        SampleRef ref;
        ref.path = fields[0];
        try {
            ref.class_id = std::stoi(fields[1]);
        } catch (const std::exception&) {
            throw FormatError(path.string() + ": bad class id on line " + std::to_string(line_no));
        }
        if (ref.class_id < 0) throw FormatError(path.string() + ": negative class id on line " + std::to_string(line_no));
        ref.split = parse_split(fields[2]);
        names.emplace(ref.class_id, ref.path.parent_path().filename().string());
        ds.samples.push_back(std::move(ref));
    }
    const int classes = names.empty() ? 0 : names.rbegin()->first + 1;
    ds.class_names.resize(classes);
    for (int c = 0; c < classes; ++c) {
        auto it = names.find(c);
        ds.class_names[c] = it != names.end() ? it->second : "class_" + std::to_string(c);
    }
    return ds;
}

ImageBuffer decode_image(const fs::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR | cv::IMREAD_IGNORE_ORIENTATION);
    if (bgr.empty()) throw DecodeError(path.string());
    return from_bgr_mat(bgr);
}

ImageBuffer resize_square(const ImageBuffer& img, int side) {
    if (side <= 0) throw ConfigError("resize side must be positive");
    if (img.width == side && img.height == side) return img;
    cv::Mat src(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(side, side), 0, 0, cv::INTER_LINEAR);
    ImageBuffer out(side, side);
    std::copy(dst.data, dst.data + out.pixels.size(), out.pixels.begin());
    return out;
}

ImageBuffer load_and_resize(const SampleRef& ref, int side) { return resize_square(decode_image(ref.path), side); }

ImageBuffer apply_augmentation(const ImageBuffer& img, AugmentKind kind, double parameter) {
    switch (kind) {
        case AugmentKind::HFlip: {
            ImageBuffer out(img.width, img.height);
            for (int y = 0; y < img.height; ++y) {
                for (int x = 0; x < img.width; ++x) std::copy_n(img.at(img.width - 1 - x, y), 3, out.at(x, y));
            }
            return out;
        }
        case AugmentKind::Rotation: {
            if (parameter == 0.0) return img;
            cv::Mat src(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
            const cv::Point2f center((img.width - 1) / 2.0f, (img.height - 1) / 2.0f);
            cv::Mat rot = cv::getRotationMatrix2D(center, parameter, 1.0);
            cv::Mat dst;
            cv::warpAffine(src, dst, rot, src.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar::all(0));
            ImageBuffer out(img.width, img.height);
            std::copy(dst.data, dst.data + out.pixels.size(), out.pixels.begin());
            return out;
        }
        case AugmentKind::Brightness: {
            ImageBuffer out = img;
            const double factor = 1.0 + parameter;
            for (auto& v : out.pixels) v = static_cast<std::uint8_t>(std::clamp(std::lround(v * factor), 0L, 255L));
            return out;
        }
    }
    return img;
}

ImageBuffer augment(const ImageBuffer& img, const AugmentPolicy& policy, std::uint64_t seed) {
    Rng rng(seed);
    const double m = std::abs(policy.magnitude);
    const double parameter = m == 0.0 ? 0.0 : rng.uniform(-m, m);
    return apply_augmentation(img, policy.kind, parameter);
}

AugmentPolicy default_policy_for(std::uint64_t seed, std::size_t index) {
    switch (derive_seed(seed, index) % 3) {
        case 0: return AugmentPolicy::hflip();
        case 1: return AugmentPolicy::rotation();
        default: return AugmentPolicy::brightness();
    }
}

}  // namespace wastebench
