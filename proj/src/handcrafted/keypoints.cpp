#include <algorithm>
#include <cmath>

#include <opencv2/features2d.hpp>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"

namespace wastebench {

namespace {

cv::Mat gray_mat(const ImageBuffer& img) {
    const auto gray = gray8_plane(img);
    return cv::Mat(img.height, img.width, CV_8U, const_cast<std::uint8_t*>(gray.data())).clone();
}

cv::Mat mask_mat(const Mask& mask) {
    cv::Mat m(mask.height, mask.width, CV_8U);
    for (std::size_t i = 0; i < mask.values.size(); ++i) m.data[i] = mask.values[i] ? 255 : 0;
    return m;
}

// Mean of the descriptor rows, summed in a fixed (sorted) order so the block
// does not depend on detector output order.
std::vector<double> mean_rows(std::vector<std::vector<double>> rows, std::size_t dim) {
    std::vector<double> mean(dim, 0.0);
    if (rows.empty()) return mean;
    std::sort(rows.begin(), rows.end());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) mean[j] += r[j];
    }
    for (auto& v : mean) v /= static_cast<double>(rows.size());
    return mean;
}

}  // namespace

FeatureBlock extract_orb(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    FeatureBlock block;
    block.kind = BlockKind::Orb;

    // FAST-9 threshold 20, Harris ranking, 500 keypoints, steered BRIEF-256.
    auto orb = cv::ORB::create(500, 1.2f, 8, 31, 0, 2, cv::ORB::HARRIS_SCORE, 31, 20);
    std::vector<cv::KeyPoint> keypoints;
    cv::Mat descriptors;
    orb->detectAndCompute(gray_mat(img), mask_mat(mask), keypoints, descriptors);

    std::vector<std::vector<double>> rows;
    for (int r = 0; r < descriptors.rows; ++r) {
        const auto* p = descriptors.ptr<std::uint8_t>(r);
        rows.emplace_back(p, p + 32);
    }
    block.values = mean_rows(std::move(rows), 32);
    block.flagged = descriptors.rows == 0;
    return block;
}

FeatureBlock extract_sift(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    FeatureBlock block;
    block.kind = BlockKind::Sift;

    // 3 scales per octave, sigma 1.6, contrast threshold 0.04, edge ratio 10.
    auto sift = cv::SIFT::create(0, 3, 0.04, 10, 1.6);
    std::vector<cv::KeyPoint> keypoints;
    cv::Mat descriptors;
    sift->detectAndCompute(gray_mat(img), mask_mat(mask), keypoints, descriptors);

    std::vector<std::vector<double>> rows;
    for (int r = 0; r < descriptors.rows; ++r) {
        const float* p = descriptors.ptr<float>(r);
        std::vector<double> row(p, p + 128);
        double norm = 0.0;
        for (double v : row) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > 0) {
            for (auto& v : row) v /= norm;
        }
        rows.push_back(std::move(row));
    }
    block.values = mean_rows(std::move(rows), 128);
    block.flagged = descriptors.rows == 0;
    return block;
}

}  // namespace wastebench
