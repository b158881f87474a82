// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "purnet/tensor.hpp"

namespace purnet::metrics {

// Saliency maps are HxWx1 in [0, 1] and are compared against thresholds on the
// [0, 255] scale: a pixel is foreground iff 255 * p > t. Masks are binary.

inline constexpr double kBeta2 = 0.3;
inline constexpr int kCurvePoints = 256;

double mae(const Tensor& p, const Tensor& g);

struct PrecisionRecall {
    double precision = 0.0;  // 0 when nothing is predicted
    double recall = 0.0;     // 0 when the mask is empty
};

PrecisionRecall precision_recall(const Tensor& p, const Tensor& g, double threshold);

/// (1 + b2) P R / (b2 P + R), 0 when the denominator vanishes.
double f_beta(PrecisionRecall pr, double beta2 = kBeta2);
/// Fβ of an already binary prediction.
double f_beta(const Tensor& binary_pred, const Tensor& g, double beta2 = kBeta2);

/// min(2 * mean(p) * 255, 255).
double adaptive_threshold(const Tensor& p);
double adaptive_f_beta(const Tensor& p, const Tensor& g, double beta2 = kBeta2);

struct FMeasureCurve {
    std::array<double, kCurvePoints> precision{};
    std::array<double, kCurvePoints> recall{};
    std::array<double, kCurvePoints> f{};

    double max_f() const;
    double mean_f() const;
};

/// Precision and recall for every integer threshold 0..255 of one pair.
void precision_recall_curve(const Tensor& p, const Tensor& g, std::array<double, kCurvePoints>& precision,
                            std::array<double, kCurvePoints>& recall);

struct MapPair {
    const Tensor* prediction;
    const Tensor* mask;
};

/// Per threshold: dataset-mean precision and recall, then Fβ of the means.
FMeasureCurve f_curve(const std::vector<MapPair>& pairs, double beta2 = kBeta2);

/// Weighted Fβ of Margolin, Zelnik-Manor and Tal ("How to evaluate foreground
/// maps?", CVPR 2014), with its reference settings: 7x7 Gaussian (sigma 5,
/// zero padding), distance decay ln(0.5)/5 and beta^2 = 1. A mask without
/// foreground scores 1 - mean(p).
double weighted_f_beta(const Tensor& p, const Tensor& g, double beta2 = 1.0);

/// Exact squared Euclidean distance from every pixel to the nearest foreground
/// pixel of `mask`, with that pixel's flat index. Ties resolve to the smallest
/// column, then the smallest row. Requires at least one foreground pixel.
struct DistanceTransform {
    std::vector<double> squared_distance;
    std::vector<std::size_t> nearest;
};
DistanceTransform distance_transform(const Tensor& mask);

struct DatasetReport {
    std::size_t count = 0;
    double mae = 0.0;
    double adaptive_f = 0.0;
    double weighted_f = 0.0;
    FMeasureCurve curve;
    std::vector<std::string> ids;
    std::vector<double> per_image_mae;
};

/// Images are scored in parallel; reductions run in input order.
DatasetReport evaluate(const std::vector<MapPair>& pairs, const std::vector<std::string>& ids = {});

nlohmann::json to_json(const DatasetReport& r);
/// Header plus 256 rows: threshold,precision,recall,f.
std::string curve_csv(const FMeasureCurve& c);

}  // namespace purnet::metrics
