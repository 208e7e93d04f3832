#pragma once

#include <vector>

#include "wastebench/image.hpp"

namespace wastebench {

struct GrabCutParams {
    int iterations = 5;
    int components = 5;         // GMM components per side
    double gamma = 50.0;        // pairwise weight
    double cov_floor = 1.0;     // isotropic variance added to every covariance
};

struct GrabCutResult {
    Mask mask;
    /// Set when the colour model was degenerate and the rectangle was returned.
    bool fallback = false;
    /// Gibbs energy of the initial labelling followed by one value per iteration.
    std::vector<double> energies;
};

/// Rectangle inset by 5% of each image dimension.
CropBox default_init_rect(int width, int height);

/// Foreground extraction by alternating GMM colour-model fitting and graph
/// min-cut on the 8-connected pixel grid. Pixels outside init_rect stay background.
GrabCutResult grabcut_segment(const ImageBuffer& img, const CropBox& init_rect,
                              const GrabCutParams& params = {});

struct ThresholdCropResult {
    ImageBuffer image;  // cropped, non-object pixels zeroed
    Mask mask;          // object pixels inside the crop
    CropBox box;
    bool flagged = false;  // no object found; full image returned
};

/// Otsu threshold of the masked grayscale image, largest 8-connected
/// component, tight crop.
ThresholdCropResult threshold_crop(const ImageBuffer& img, const Mask& mask);

/// Otsu threshold over an 8-bit histogram; pixels > threshold are foreground.
int otsu_threshold(const std::vector<std::uint64_t>& histogram);

/// 8-connected component labels (0 = background, 1..n in raster order of first pixel).
struct Components {
    std::vector<int> labels;
    std::vector<std::size_t> sizes;  // sizes[k] for label k+1
};
Components connected_components(const Mask& mask);

/// Keeps only the largest 8-connected component (ties: first in raster order).
Mask largest_component(const Mask& mask);

}  // namespace wastebench
