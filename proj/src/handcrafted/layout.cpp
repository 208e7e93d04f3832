#include <algorithm>
#include <cmath>
#include <string>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"

namespace wastebench {

namespace {
std::size_t canonical_index(BlockKind kind) {
    return static_cast<std::size_t>(std::find(kCanonicalOrder.begin(), kCanonicalOrder.end(), kind) -
                                    kCanonicalOrder.begin());
}
}  // namespace

std::string_view block_name(BlockKind kind) {
    switch (kind) {
        case BlockKind::ColorBasic: return "color_basic";
        case BlockKind::ColorHist: return "color_hist";
        case BlockKind::Contour: return "contour";
        case BlockKind::Hu: return "hu";
        case BlockKind::Glcm: return "glcm";
        case BlockKind::Lbp: return "lbp";
        case BlockKind::Orb: return "orb";
        case BlockKind::Sift: return "sift";
        case BlockKind::Gist: return "gist";
    }
    return "unknown";
}

std::size_t block_dim(BlockKind kind) { return kBlockDims[canonical_index(kind)]; }

std::size_t block_offset(BlockKind kind) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < canonical_index(kind); ++i) offset += kBlockDims[i];
    return offset;
}

std::vector<std::string> HandcraftedVector::flagged_blocks() const {
    std::vector<std::string> out;
    for (const auto& b : blocks) {
        if (b.flagged) out.emplace_back(block_name(b.kind));
    }
    return out;
}

HandcraftedVector assemble(std::vector<FeatureBlock> blocks) {
    std::array<const FeatureBlock*, kBlockCount> slot{};
    std::vector<std::string> problems;
    for (const auto& b : blocks) {
        const std::size_t i = canonical_index(b.kind);
        if (slot[i]) {
            problems.push_back(std::string(block_name(b.kind)) + " (duplicate)");
            continue;
        }
        slot[i] = &b;
        if (b.dim() != kBlockDims[i]) {
            problems.push_back(std::string(block_name(b.kind)) + " (dim " + std::to_string(b.dim()) + ", expected " +
                               std::to_string(kBlockDims[i]) + ")");
        }
        if (!std::all_of(b.values.begin(), b.values.end(), [](double v) { return std::isfinite(v); })) {
            problems.push_back(std::string(block_name(b.kind)) + " (non-finite value)");
        }
    }
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        if (!slot[i]) problems.push_back(std::string(block_name(kCanonicalOrder[i])) + " (missing)");
    }
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) msg += (msg.empty() ? "" : ", ") + p;
        throw LayoutError(msg);
    }

    HandcraftedVector out;
    out.flat.reserve(kHandcraftedDim);
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        out.blocks.push_back(*slot[i]);
        out.flat.insert(out.flat.end(), slot[i]->values.begin(), slot[i]->values.end());
    }
    return out;
}

HandcraftedVector extract_handcrafted(const ImageBuffer& img, const Mask& mask) {
    using Extractor = FeatureBlock (*)(const ImageBuffer&, const Mask&);
    constexpr std::array<Extractor, kBlockCount> extractors = {
        extract_color_basic, extract_color_hist, extract_contour, extract_hu,  extract_glcm,
        extract_lbp,         extract_orb,        extract_sift,    extract_gist};
    std::vector<FeatureBlock> blocks;
    blocks.reserve(kBlockCount);
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        try {
            blocks.push_back(extractors[i](img, mask));
        } catch (const DegenerateInput&) {
            FeatureBlock zero;
            zero.kind = kCanonicalOrder[i];
            zero.values.assign(kBlockDims[i], 0.0);
            zero.flagged = true;
            blocks.push_back(std::move(zero));
        }
    }
    return assemble(std::move(blocks));
}

}  // namespace wastebench
