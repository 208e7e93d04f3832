#include "wastebench/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "wastebench/errors.hpp"

namespace wastebench {

ImageBuffer::ImageBuffer(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](auto v) { return v != 0; }));
}

std::vector<double> gray_plane(const ImageBuffer& img) {
    std::vector<double> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = luma(&img.pixels[3 * i]);
    return out;
}

std::vector<std::uint8_t> gray8_plane(const ImageBuffer& img) {
    std::vector<std::uint8_t> out(img.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma(&img.pixels[3 * i])), 0L, 255L));
    }
    return out;
}

std::vector<std::uint8_t> hsv_pixels(const ImageBuffer& img) {
    if (img.empty()) return {};
    cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
    cv::Mat hsv;
    cv::cvtColor(rgb, hsv, cv::COLOR_RGB2HSV);
    return std::vector<std::uint8_t>(hsv.data, hsv.data + hsv.total() * 3);
}

cv::Mat to_bgr_mat(const ImageBuffer& img) {
    cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<std::uint8_t*>(img.pixels.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    return bgr;
}

ImageBuffer from_bgr_mat(const cv::Mat& bgr) {
    cv::Mat rgb;
    if (bgr.channels() == 1) {
        cv::cvtColor(bgr, rgb, cv::COLOR_GRAY2RGB);
    } else if (bgr.channels() == 4) {
        cv::cvtColor(bgr, rgb, cv::COLOR_BGRA2RGB);
    } else {
        cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
    }
    if (!rgb.isContinuous()) rgb = rgb.clone();
    ImageBuffer out(rgb.cols, rgb.rows);
    std::copy(rgb.data, rgb.data + out.pixels.size(), out.pixels.begin());
    return out;
}

ImageBuffer apply_mask(const ImageBuffer& img, const Mask& mask) {
    ImageBuffer out = img;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        if (!mask.values[i]) std::fill_n(&out.pixels[3 * i], 3, 0);
    }
    return out;
}

ImageBuffer crop(const ImageBuffer& img, const CropBox& box) {
    ImageBuffer out(box.w, box.h);
    for (int y = 0; y < box.h; ++y) {
        std::copy_n(img.at(box.x, box.y + y), 3 * box.w, out.at(0, y));
    }
    return out;
}

Mask crop(const Mask& mask, const CropBox& box) {
    Mask out(box.w, box.h);
    for (int y = 0; y < box.h; ++y) {
        for (int x = 0; x < box.w; ++x) out.at(x, y) = mask.at(box.x + x, box.y + y);
    }
    return out;
}

void write_png(const ImageBuffer& img, const std::filesystem::path& path) {
    if (!cv::imwrite(path.string(), to_bgr_mat(img))) throw IoError("cannot write " + path.string());
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
    for (auto v : mask.values) out.put(static_cast<char>(v ? 255 : 0));
    if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace wastebench
