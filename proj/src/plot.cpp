// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "purnet/image_io.hpp"

namespace purnet::io {

metrics::FMeasureCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open curve table " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("threshold,precision,recall,f", 0) != 0) {
        throw InvalidArgument(path.string() + ": missing curve header");
    }
    metrics::FMeasureCurve c;
    std::array<bool, metrics::kCurvePoints> seen{};
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int t;
        char c1, c2, c3;
        double p, r, f;
        if (!(ss >> t >> c1 >> p >> c2 >> r >> c3 >> f) || c1 != ',' || c2 != ',' || c3 != ',' || t < 0 ||
            t >= metrics::kCurvePoints || seen[static_cast<std::size_t>(t)]) {
            throw InvalidArgument(path.string() + ": malformed row '" + line + "'");
        }
        const auto k = static_cast<std::size_t>(t);
        seen[k] = true;
        c.precision[k] = p;
        c.recall[k] = r;
        c.f[k] = f;
        ++rows;
    }
    if (rows != metrics::kCurvePoints) {
        throw InvalidArgument(path.string() + ": expected 256 rows, found " + std::to_string(rows));
    }
    return c;
}

void plot_curves(const std::filesystem::path& out, const std::vector<CurveSeries>& series, int width, int height) {
    if (series.empty()) throw InvalidArgument("plot needs at least one curve");
    static const std::array<cv::Scalar, 8> palette{
        cv::Scalar(180, 119, 31), cv::Scalar(14, 127, 255), cv::Scalar(44, 160, 44),  cv::Scalar(40, 39, 214),
        cv::Scalar(189, 103, 148), cv::Scalar(75, 86, 140), cv::Scalar(194, 119, 227), cv::Scalar(127, 127, 127)};
    cv::Mat img(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
    const int left = 70, right = 20, top = 20, bottom = 60;
    const int pw = width - left - right, ph = height - top - bottom;
    if (pw < 50 || ph < 50) throw InvalidArgument("plot canvas too small");
    auto to_px = [&](double t, double f) {
        return cv::Point(left + static_cast<int>(std::lround(t / 255.0 * pw)),
                         top + static_cast<int>(std::lround((1.0 - f) * ph)));
    };
    const cv::Scalar axis(0, 0, 0), grid(225, 225, 225);
    for (int i = 0; i <= 10; ++i) {
        const double f = i / 10.0;
        cv::line(img, to_px(0, f), to_px(255, f), grid, 1);
        cv::putText(img, cv::format("%.1f", f), cv::Point(left - 40, to_px(0, f).y + 4), cv::FONT_HERSHEY_SIMPLEX, 0.4,
                    axis, 1, cv::LINE_AA);
    }
    for (int t = 0; t <= 250; t += 50) {
        cv::line(img, to_px(t, 0), to_px(t, 1), grid, 1);
        cv::putText(img, std::to_string(t), cv::Point(to_px(t, 0).x - 10, top + ph + 18), cv::FONT_HERSHEY_SIMPLEX, 0.4,
                    axis, 1, cv::LINE_AA);
    }
    cv::rectangle(img, to_px(0, 1), to_px(255, 0), axis, 1);
    cv::putText(img, "threshold", cv::Point(left + pw / 2 - 30, height - 15), cv::FONT_HERSHEY_SIMPLEX, 0.5, axis, 1,
                cv::LINE_AA);
    cv::putText(img, "F", cv::Point(15, top + ph / 2), cv::FONT_HERSHEY_SIMPLEX, 0.6, axis, 1, cv::LINE_AA);

    for (std::size_t s = 0; s < series.size(); ++s) {
        const cv::Scalar color = palette[s % palette.size()];
        std::vector<cv::Point> pts;
        for (int t = 0; t < metrics::kCurvePoints; ++t) pts.push_back(to_px(t, series[s].curve.f[static_cast<std::size_t>(t)]));
        cv::polylines(img, pts, false, color, 2, cv::LINE_AA);
        const int ly = top + 20 + 20 * static_cast<int>(s);
        cv::line(img, cv::Point(left + pw - 170, ly), cv::Point(left + pw - 145, ly), color, 2, cv::LINE_AA);
        cv::putText(img, series[s].label, cv::Point(left + pw - 140, ly + 4), cv::FONT_HERSHEY_SIMPLEX, 0.45, axis, 1,
                    cv::LINE_AA);
    }
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    if (!cv::imwrite(out.string(), img)) throw InvalidArgument("cannot write plot " + out.string());
}

}  // namespace purnet::io
