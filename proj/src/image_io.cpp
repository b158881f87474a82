// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "purnet/image_io.hpp"

namespace purnet::io {

namespace {

cv::Mat read_raw(const std::filesystem::path& path, int flags) {
    cv::Mat m = cv::imread(path.string(), flags);
    if (m.empty()) throw InvalidArgument("cannot read image " + path.string());
    if (m.depth() != CV_8U) {
        cv::Mat c;
        m.convertTo(c, CV_8U, m.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
        m = c;
    }
    return m;
}

void write_raw(const std::filesystem::path& path, const cv::Mat& m) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), m)) throw InvalidArgument("cannot write image " + path.string());
}

unsigned char quantize(double v) { return static_cast<unsigned char>(std::clamp(std::round(255.0 * v), 0.0, 255.0)); }

}  // namespace

Tensor read_rgb(const std::filesystem::path& path) {
    cv::Mat bgr = read_raw(path, cv::IMREAD_COLOR);
    Tensor t(bgr.rows, bgr.cols, 3);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x)
            for (int c = 0; c < 3; ++c) t(y, x, c) = row[x][2 - c] / 255.0;
    }
    return t;
}

Tensor read_gray(const std::filesystem::path& path) {
    cv::Mat g = read_raw(path, cv::IMREAD_GRAYSCALE);
    Tensor t(g.rows, g.cols, 1);
    for (int y = 0; y < g.rows; ++y) {
        const auto* row = g.ptr<unsigned char>(y);
        for (int x = 0; x < g.cols; ++x) t(y, x, 0) = row[x];
    }
    return t;
}

Tensor read_map(const std::filesystem::path& path) {
    Tensor t = read_gray(path);
    for (double& v : t.values()) v /= 255.0;
    return t;
}

void write_map(const std::filesystem::path& path, const Tensor& map) {
    if (map.channels() != 1) throw ShapeError("write_map expects a single-channel map, got " + to_string(map.shape()));
    cv::Mat m(map.height(), map.width(), CV_8UC1);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) m.at<unsigned char>(y, x) = quantize(map(y, x, 0));
    write_raw(path, m);
}

void write_rgb(const std::filesystem::path& path, const Tensor& rgb) {
    if (rgb.channels() != 3) throw ShapeError("write_rgb expects 3 channels, got " + to_string(rgb.shape()));
    cv::Mat m(rgb.height(), rgb.width(), CV_8UC3);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            for (int c = 0; c < 3; ++c) m.at<cv::Vec3b>(y, x)[2 - c] = quantize(rgb(y, x, c));
    write_raw(path, m);
}

}  // namespace purnet::io
