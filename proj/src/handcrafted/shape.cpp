#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

#include "wastebench/errors.hpp"
#include "wastebench/handcrafted.hpp"
#include "wastebench/segmentation.hpp"

namespace wastebench {

namespace {

struct Point {
    long x;
    long y;
    bool operator<(const Point& o) const { return x < o.x || (x == o.x && y < o.y); }
    bool operator==(const Point&) const = default;
};

long cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

double pixel_hull_area(const Mask& mask) {
    std::vector<Point> pts;
    for (int y = 0; y < mask.height; ++y) {
        int left = -1, right = -1;
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            if (left < 0) left = x;
            right = x;
        }
        if (left < 0) continue;
        pts.push_back({left, y});
        pts.push_back({left, y + 1});
        pts.push_back({right + 1, y});
        pts.push_back({right + 1, y + 1});
    }
    if (pts.size() < 3) return 0.0;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Andrew's monotone chain.
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    long twice = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return std::abs(static_cast<double>(twice)) / 2.0;
}

FeatureBlock extract_contour(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    const Mask object = largest_component(mask);
    const std::size_t area = object.count();
    if (area == 0) throw DegenerateInput("contour needs a foreground component");

    int x0 = object.width, y0 = object.height, x1 = -1, y1 = -1;
    for (int y = 0; y < object.height; ++y) {
        for (int x = 0; x < object.width; ++x) {
            if (!object.at(x, y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    const double w = x1 - x0 + 1;
    const double h = y1 - y0 + 1;

    // Outer boundary as an 8-connected chain; diagonal steps count sqrt(2).
    cv::Mat m(object.height, object.width, CV_8U, const_cast<std::uint8_t*>(object.values.data()));
    std::vector<std::vector<cv::Point>> contours;
    cv::findContours(m.clone(), contours, cv::RETR_EXTERNAL, cv::CHAIN_APPROX_NONE);
    double perimeter = 0.0;
    if (!contours.empty()) {
        const auto& c = *std::max_element(contours.begin(), contours.end(),
                                          [](const auto& a, const auto& b) { return a.size() < b.size(); });
        if (c.size() > 1) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                const cv::Point d = c[(i + 1) % c.size()] - c[i];
                perimeter += (d.x != 0 && d.y != 0) ? std::numbers::sqrt2 : 1.0;
            }
        }
    }

    const double hull = pixel_hull_area(object);
    FeatureBlock block;
    block.kind = BlockKind::Contour;
    block.values = {static_cast<double>(area), perimeter, w / h, static_cast<double>(area) / (w * h),
                    hull > 0 ? static_cast<double>(area) / hull : 1.0};
    return block;
}

std::array<double, 7> hu_moments(const std::vector<double>& weights, int width, int height) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double v = weights[static_cast<std::size_t>(y) * width + x];
            m00 += v;
            m10 += v * x;
            m01 += v * y;
        }
    }
    if (m00 <= 0) throw DegenerateInput("hu moments need non-zero mass");
    const double cx = m10 / m00;
    const double cy = m01 / m00;
    double mu[4][4] = {};
    for (int y = 0; y < height; ++y) {
        const double dy = y - cy;
        for (int x = 0; x < width; ++x) {
            const double v = weights[static_cast<std::size_t>(y) * width + x];
            if (v == 0) continue;
            const double dx = x - cx;
            const double dx2 = dx * dx, dy2 = dy * dy;
            mu[2][0] += v * dx2;
            mu[0][2] += v * dy2;
            mu[1][1] += v * dx * dy;
            mu[3][0] += v * dx2 * dx;
            mu[0][3] += v * dy2 * dy;
            mu[2][1] += v * dx2 * dy;
            mu[1][2] += v * dx * dy2;
        }
    }
    auto eta = [&](int p, int q) { return mu[p][q] / std::pow(m00, 1.0 + (p + q) / 2.0); };
    const double n20 = eta(2, 0), n02 = eta(0, 2), n11 = eta(1, 1);
    const double n30 = eta(3, 0), n03 = eta(0, 3), n21 = eta(2, 1), n12 = eta(1, 2);

    const double a = n30 + n12, b = n21 + n03;
    const double p = n30 - 3 * n12, q = 3 * n21 - n03;
    return {
        n20 + n02,
        (n20 - n02) * (n20 - n02) + 4 * n11 * n11,
        p * p + q * q,
        a * a + b * b,
        p * a * (a * a - 3 * b * b) + q * b * (3 * a * a - b * b),
        (n20 - n02) * (a * a - b * b) + 4 * n11 * a * b,
        q * a * (a * a - 3 * b * b) - p * b * (3 * a * a - b * b),
    };
}

double log_magnitude(double h) {
    const double s = (h > 0) - (h < 0);
    return s * std::log10(std::abs(h) + 1e-30);
}

FeatureBlock extract_hu(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    std::vector<double> weights = gray_plane(img);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!mask.values[i]) weights[i] = 0.0;
    }
    const auto hu = hu_moments(weights, img.width, img.height);
    FeatureBlock block;
    block.kind = BlockKind::Hu;
    for (double h : hu) block.values.push_back(log_magnitude(h));
    return block;
}

}  // namespace wastebench
