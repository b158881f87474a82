// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace purnet::metrics {

namespace {

void require_pair(const Tensor& p, const Tensor& g, const char* what) {
    if (!(p.shape() == g.shape()) || p.channels() != 1) {
        throw ShapeError(std::string(what) + ": prediction " + to_string(p.shape()) + " vs mask " +
                         to_string(g.shape()));
    }
}

bool foreground(double p, double threshold) { return 255.0 * p > threshold; }

// For integer t, 255p > t exactly when ceil(255p) > t. Bin 256 holds p > 1.
int curve_bin(double p) {
    const double c = std::ceil(255.0 * p);
    if (!(c > 0.0)) return 0;
    return c > 256.0 ? 256 : static_cast<int>(c);
}

PrecisionRecall ratios(double tp, double predicted, double positives) {
    return {predicted > 0.0 ? tp / predicted : 0.0, positives > 0.0 ? tp / positives : 0.0};
}

constexpr int kGaussSize = 7;
constexpr double kGaussSigma = 5.0;
// MATLAB's eps, as used by the reference implementation.
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::array<double, kGaussSize> gaussian_taps() {
    std::array<double, kGaussSize> k{};
    double z = 0.0;
    for (int i = 0; i < kGaussSize; ++i) {
        const double d = i - kGaussSize / 2;
        k[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kGaussSigma * kGaussSigma));
        z += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= z;
    return k;
}

// Separable 7x7 Gaussian with zero padding.
std::vector<double> gaussian_filter(const std::vector<double>& in, int h, int w) {
    static const auto k = gaussian_taps();
    const int r = kGaussSize / 2;
    std::vector<double> tmp(in.size(), 0.0);
    std::vector<double> out(in.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -r; d <= r; ++d) {
                const int xx = x + d;
                if (xx >= 0 && xx < w) s += k[static_cast<std::size_t>(d + r)] * in[static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int d = -r; d <= r; ++d) {
                const int yy = y + d;
                if (yy >= 0 && yy < h) s += k[static_cast<std::size_t>(d + r)] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

double mean_of(const Tensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v;
    return s / static_cast<double>(t.size());
}

}  // namespace

double mae(const Tensor& p, const Tensor& g) {
    require_pair(p, g, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - g[i]);
    return s / static_cast<double>(p.size());
}

PrecisionRecall precision_recall(const Tensor& p, const Tensor& g, double threshold) {
    require_pair(p, g, "precision_recall");
    double tp = 0.0, predicted = 0.0, positives = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool fg = foreground(p[i], threshold);
        const bool gt = g[i] > 0.5;
        predicted += fg;
        positives += gt;
        tp += fg && gt;
    }
    return ratios(tp, predicted, positives);
}

double f_beta(PrecisionRecall pr, double beta2) {
    const double den = beta2 * pr.precision + pr.recall;
    return den > 0.0 ? (1.0 + beta2) * pr.precision * pr.recall / den : 0.0;
}

double f_beta(const Tensor& binary_pred, const Tensor& g, double beta2) {
    return f_beta(precision_recall(binary_pred, g, 127.5), beta2);
}

double adaptive_threshold(const Tensor& p) { return std::min(2.0 * mean_of(p) * 255.0, 255.0); }

double adaptive_f_beta(const Tensor& p, const Tensor& g, double beta2) {
    return f_beta(precision_recall(p, g, adaptive_threshold(p)), beta2);
}

double FMeasureCurve::max_f() const { return *std::max_element(f.begin(), f.end()); }

double FMeasureCurve::mean_f() const {
    double s = 0.0;
    for (double v : f) s += v;
    return s / kCurvePoints;
}

void precision_recall_curve(const Tensor& p, const Tensor& g, std::array<double, kCurvePoints>& precision,
                            std::array<double, kCurvePoints>& recall) {
    require_pair(p, g, "precision_recall_curve");
    std::array<double, kCurvePoints + 1> all{};
    std::array<double, kCurvePoints + 1> hit{};
    double positives = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto b = static_cast<std::size_t>(curve_bin(p[i]));
        const bool gt = g[i] > 0.5;
        all[b] += 1.0;
        hit[b] += gt;
        positives += gt;
    }
    // Suffix sums over bins > t.
    double predicted = 0.0, tp = 0.0;
    for (int t = kCurvePoints - 1; t >= 0; --t) {
        predicted += all[static_cast<std::size_t>(t + 1)];
        tp += hit[static_cast<std::size_t>(t + 1)];
        const PrecisionRecall pr = ratios(tp, predicted, positives);
        precision[static_cast<std::size_t>(t)] = pr.precision;
        recall[static_cast<std::size_t>(t)] = pr.recall;
    }
}

FMeasureCurve f_curve(const std::vector<MapPair>& pairs, double beta2) {
    if (pairs.empty()) throw InvalidArgument("f_curve needs at least one pair");
    FMeasureCurve c;
    std::array<double, kCurvePoints> pr{}, rc{};
    for (const MapPair& m : pairs) {
        precision_recall_curve(*m.prediction, *m.mask, pr, rc);
        for (int t = 0; t < kCurvePoints; ++t) {
            c.precision[static_cast<std::size_t>(t)] += pr[static_cast<std::size_t>(t)];
            c.recall[static_cast<std::size_t>(t)] += rc[static_cast<std::size_t>(t)];
        }
    }
    const auto n = static_cast<double>(pairs.size());
    for (std::size_t t = 0; t < kCurvePoints; ++t) {
        c.precision[t] /= n;
        c.recall[t] /= n;
        c.f[t] = f_beta({c.precision[t], c.recall[t]}, beta2);
    }
    return c;
}

DistanceTransform distance_transform(const Tensor& mask) {
    const int h = mask.height();
    const int w = mask.width();
    const double inf = std::numeric_limits<double>::infinity();
    // Column pass: nearest foreground row in the same column (ties to the upper row).
    std::vector<int> near_row(mask.size(), -1);
    for (int x = 0; x < w; ++x) {
        int last = -1;
        for (int y = 0; y < h; ++y) {
            if (mask(y, x, 0) > 0.5) last = y;
            near_row[static_cast<std::size_t>(y) * w + x] = last;
        }
        int next = -1;
        for (int y = h - 1; y >= 0; --y) {
            if (mask(y, x, 0) > 0.5) next = y;
            int& r = near_row[static_cast<std::size_t>(y) * w + x];
            if (next >= 0 && (r < 0 || next - y < y - r)) r = next;
        }
    }
    DistanceTransform dt;
    dt.squared_distance.assign(mask.size(), inf);
    dt.nearest.assign(mask.size(), 0);
    bool any = false;
    // Row pass: scan candidate columns left to right, keeping the first minimum.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = inf;
            std::size_t arg = 0;
            for (int xx = 0; xx < w; ++xx) {
                const int r = near_row[static_cast<std::size_t>(y) * w + xx];
                if (r < 0) continue;
                const double dy = r - y, dx = xx - x;
                const double d2 = dy * dy + dx * dx;
                if (d2 < best) {
                    best = d2;
                    arg = static_cast<std::size_t>(r) * w + xx;
                }
            }
            if (best < inf) any = true;
            dt.squared_distance[static_cast<std::size_t>(y) * w + x] = best;
            dt.nearest[static_cast<std::size_t>(y) * w + x] = arg;
        }
    if (!any) throw InvalidArgument("distance_transform needs a foreground pixel");
    return dt;
}

double weighted_f_beta(const Tensor& p, const Tensor& g, double beta2) {
    require_pair(p, g, "weighted_f_beta");
    const int h = p.height();
    const int w = p.width();
    const std::size_t n = p.size();
    bool any_fg = false;
    for (double v : g.values()) any_fg = any_fg || v > 0.5;
    if (!any_fg) return 1.0 - mean_of(p);

    const DistanceTransform dt = distance_transform(g);
    std::vector<double> e(n), et(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = std::abs(g[i] - p[i]);
    // Background pixels inherit the error of their nearest foreground pixel.
    for (std::size_t i = 0; i < n; ++i) et[i] = g[i] > 0.5 ? e[i] : e[dt.nearest[i]];
    const std::vector<double> ea = gaussian_filter(et, h, w);

    const double decay = std::log(0.5) / 5.0;
    double fg_count = 0.0, ew_fg = 0.0, ew_bg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (g[i] > 0.5) {
            fg_count += 1.0;
            ew_fg += std::min(e[i], ea[i]);
        } else {
            ew_bg += e[i] * (2.0 - std::exp(decay * std::sqrt(dt.squared_distance[i])));
        }
    }
    const double tpw = fg_count - ew_fg;
    const double recall = 1.0 - ew_fg / fg_count;
    const double precision = tpw / (kEps + tpw + ew_bg);
    return (1.0 + beta2) * recall * precision / (kEps + recall + beta2 * precision);
}

DatasetReport evaluate(const std::vector<MapPair>& pairs, const std::vector<std::string>& ids) {
    if (pairs.empty()) throw InvalidArgument("evaluate needs at least one pair");
    if (!ids.empty() && ids.size() != pairs.size()) throw InvalidArgument("evaluate: ids and pairs differ in length");
    const auto count = static_cast<std::ptrdiff_t>(pairs.size());
    std::vector<double> m(pairs.size()), af(pairs.size()), wf(pairs.size());
    std::vector<std::array<double, kCurvePoints>> pr(pairs.size()), rc(pairs.size());
    std::vector<std::string> errors(pairs.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            const Tensor& p = *pairs[k].prediction;
            const Tensor& g = *pairs[k].mask;
            m[k] = mae(p, g);
            af[k] = adaptive_f_beta(p, g);
            wf[k] = weighted_f_beta(p, g);
            precision_recall_curve(p, g, pr[k], rc[k]);
        } catch (const std::exception& ex) {
            errors[k] = ex.what();
        }
    }
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!errors[k].empty()) {
            throw ShapeError((ids.empty() ? "pair " + std::to_string(k) : ids[k]) + ": " + errors[k]);
        }
    }

    DatasetReport r;
    r.count = pairs.size();
    r.ids = ids;
    r.per_image_mae = m;
    const auto n = static_cast<double>(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        r.mae += m[k];
        r.adaptive_f += af[k];
        r.weighted_f += wf[k];
        for (std::size_t t = 0; t < kCurvePoints; ++t) {
            r.curve.precision[t] += pr[k][t];
            r.curve.recall[t] += rc[k][t];
        }
    }
    r.mae /= n;
    r.adaptive_f /= n;
    r.weighted_f /= n;
    for (std::size_t t = 0; t < kCurvePoints; ++t) {
        r.curve.precision[t] /= n;
        r.curve.recall[t] /= n;
        r.curve.f[t] = f_beta({r.curve.precision[t], r.curve.recall[t]});
    }
    return r;
}

nlohmann::json to_json(const DatasetReport& r) {
    nlohmann::json j;
    j["count"] = r.count;
    j["mae"] = r.mae;
    j["adaptive_f_beta"] = r.adaptive_f;
    j["weighted_f_beta"] = r.weighted_f;
    j["max_f_beta"] = r.curve.max_f();
    j["mean_f_beta"] = r.curve.mean_f();
    j["beta2"] = kBeta2;
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t k = 0; k < r.per_image_mae.size(); ++k) {
        nlohmann::json e;
        if (!r.ids.empty()) e["id"] = r.ids[k];
        e["mae"] = r.per_image_mae[k];
        per.push_back(e);
    }
    j["images"] = per;
    return j;
}

std::string curve_csv(const FMeasureCurve& c) {
    std::ostringstream os;
    os.precision(17);
    os << "threshold,precision,recall,f\n";
    for (std::size_t t = 0; t < kCurvePoints; ++t) {
        os << t << ',' << c.precision[t] << ',' << c.recall[t] << ',' << c.f[t] << '\n';
    }
    return os.str();
}

}  // namespace purnet::metrics
