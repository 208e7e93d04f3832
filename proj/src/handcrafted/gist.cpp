#include <array>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"

namespace wastebench {

namespace {

constexpr int kHalf = 12;  // 25x25 kernels
constexpr double kWavelength = 8.0;
constexpr double kSigma = 4.0;
constexpr double kAspect = 0.5;
constexpr int kGrid = 4;

// Quadrature Gabor pair at `theta`; both parts zero-mean, envelope sums to 1.
std::array<cv::Mat, 2> gabor_pair(double theta) {
    const int size = 2 * kHalf + 1;
    cv::Mat re(size, size, CV_64F), im(size, size, CV_64F);
    double env_sum = 0.0;
    for (int y = -kHalf; y <= kHalf; ++y) {
        for (int x = -kHalf; x <= kHalf; ++x) {
            const double xr = x * std::cos(theta) + y * std::sin(theta);
            const double yr = -x * std::sin(theta) + y * std::cos(theta);
            const double env = std::exp(-(xr * xr + kAspect * kAspect * yr * yr) / (2 * kSigma * kSigma));
            const double phase = 2 * std::numbers::pi * xr / kWavelength;
            re.at<double>(y + kHalf, x + kHalf) = env * std::cos(phase);
            im.at<double>(y + kHalf, x + kHalf) = env * std::sin(phase);
            env_sum += env;
        }
    }
    for (cv::Mat* k : {&re, &im}) {
        *k -= cv::mean(*k)[0];
        *k /= env_sum;
    }
    return {re, im};
}

}  // namespace

FeatureBlock extract_gist(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    if (img.width < kGrid || img.height < kGrid) throw DegenerateInput("gist needs at least a 4x4 image");

    const auto gray = gray_plane(img);
    cv::Mat src(img.height, img.width, CV_64F, const_cast<double*>(gray.data()));

    FeatureBlock block;
    block.kind = BlockKind::Gist;
    block.values.reserve(64);
    for (int o = 0; o < 4; ++o) {
        const auto [re_k, im_k] = gabor_pair(o * std::numbers::pi / 4.0);
        cv::Mat re, im, mag;
        cv::filter2D(src, re, CV_64F, re_k, cv::Point(-1, -1), 0, cv::BORDER_REFLECT_101);
        cv::filter2D(src, im, CV_64F, im_k, cv::Point(-1, -1), 0, cv::BORDER_REFLECT_101);
        cv::magnitude(re, im, mag);
        for (int r = 0; r < kGrid; ++r) {
            const int y0 = r * img.height / kGrid, y1 = (r + 1) * img.height / kGrid;
            for (int c = 0; c < kGrid; ++c) {
                const int x0 = c * img.width / kGrid, x1 = (c + 1) * img.width / kGrid;
                double sum = 0.0;
                for (int y = y0; y < y1; ++y) {
                    const double* row = mag.ptr<double>(y);
                    for (int x = x0; x < x1; ++x) sum += row[x];
                }
                block.values.push_back(sum / static_cast<double>((y1 - y0) * (x1 - x0)));
            }
        }
    }
    return block;
}

}  // namespace wastebench
