#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "wastebench/image.hpp"

namespace wastebench {

enum class BlockKind { ColorBasic, ColorHist, Contour, Hu, Glcm, Lbp, Orb, Sift, Gist };

inline constexpr std::size_t kBlockCount = 9;
inline constexpr std::array<BlockKind, kBlockCount> kCanonicalOrder = {
    BlockKind::ColorBasic, BlockKind::ColorHist, BlockKind::Contour, BlockKind::Hu, BlockKind::Glcm,
    BlockKind::Lbp,        BlockKind::Orb,       BlockKind::Sift,    BlockKind::Gist};
inline constexpr std::array<std::size_t, kBlockCount> kBlockDims = {15, 1024, 5, 7, 20, 10, 32, 128, 64};
inline constexpr std::size_t kHandcraftedDim = 1305;

std::string_view block_name(BlockKind kind);
std::size_t block_dim(BlockKind kind);
/// Offset of the block inside the assembled vector.
std::size_t block_offset(BlockKind kind);

struct FeatureBlock {
    BlockKind kind = BlockKind::ColorBasic;
    std::vector<double> values;
    /// Set when the extractor had nothing to describe and emitted zeros.
    bool flagged = false;

    std::size_t dim() const { return values.size(); }
};

struct HandcraftedVector {
    std::vector<FeatureBlock> blocks;  // canonical order
    std::vector<double> flat;

    std::vector<std::string> flagged_blocks() const;
};

// Each extractor describes the foreground pixels of `mask` in `img`.
FeatureBlock extract_color_basic(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_color_hist(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_contour(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_hu(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_glcm(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_lbp(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_orb(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_sift(const ImageBuffer& img, const Mask& mask);
FeatureBlock extract_gist(const ImageBuffer& img, const Mask& mask);

/// Concatenates the nine blocks in canonical order. Throws LayoutError naming
/// every missing, duplicated or mis-sized block.
HandcraftedVector assemble(std::vector<FeatureBlock> blocks);

/// Runs all nine extractors. A DegenerateInput from any extractor becomes a
/// flagged zero block so corpus extraction never aborts.
HandcraftedVector extract_handcrafted(const ImageBuffer& img, const Mask& mask);

// Building blocks exposed for tests and for the contour descriptor.

/// Hu invariants h1..h7 (untransformed) of a weighted image.
std::array<double, 7> hu_moments(const std::vector<double>& weights, int width, int height);
/// sign(h) * log10(|h| + 1e-30)
double log_magnitude(double h);

/// Symmetric normalized co-occurrence matrix (levels x levels) for offset (dx, dy),
/// counting only pairs with both pixels in the mask. Returns false when no pair exists.
bool glcm_matrix(const std::vector<std::uint8_t>& levels, const Mask& mask, int dx, int dy, int level_count,
                 std::vector<double>& out);

/// Rotation-invariant uniform LBP code (0..9) for the pixel at (x, y).
int lbp_code(const std::vector<std::uint8_t>& gray, int width, int height, int x, int y);

/// Area of the convex hull of the unit squares covering every mask pixel.
double pixel_hull_area(const Mask& mask);

}  // namespace wastebench
