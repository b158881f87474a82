// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace purnet {

namespace {

using Color = std::array<double, 3>;

struct Shape2D {
    int kind;  // 0 disc, 1 rectangle, 2 triangle, 3 ellipse
    double cx, cy, a, b, angle;

    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double c = std::cos(angle), s = std::sin(angle);
        const double u = c * dx + s * dy, v = -s * dx + c * dy;
        switch (kind) {
            case 0: return dx * dx + dy * dy <= a * a;
            case 1: return std::abs(u) <= a && std::abs(v) <= b;
            case 2: {
                // Isosceles triangle with apex at v = -a and base at v = +a.
                if (v < -a || v > a) return false;
                const double half = b * (v + a) / (2.0 * a);
                return std::abs(u) <= half;
            }
            default: return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
        }
    }
};

}  // namespace

std::vector<Sample> synthetic_dataset(const SyntheticOptions& opts) {
    if (opts.count < 1 || opts.size < 8) throw InvalidArgument("synthetic dataset needs count >= 1 and size >= 8");
    Rng rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.04);
    const double n = opts.size;
    std::vector<Sample> out;
    for (int i = 0; i < opts.count; ++i) {
        const Color base{0.25 + 0.5 * unit(rng), 0.25 + 0.5 * unit(rng), 0.25 + 0.5 * unit(rng)};
        // Foreground color pushed away from the background mean.
        Color fg;
        for (std::size_t c = 0; c < 3; ++c) fg[c] = base[c] > 0.5 ? 0.1 * unit(rng) : 0.9 + 0.1 * unit(rng);
        const double freq = 2.0 * std::numbers::pi * (2.0 + 4.0 * unit(rng)) / n;
        const double theta = std::numbers::pi * unit(rng);
        const double phase = 2.0 * std::numbers::pi * unit(rng);

        Shape2D shape{i % 4, n * (0.4 + 0.2 * unit(rng)), n * (0.4 + 0.2 * unit(rng)), n * (0.18 + 0.1 * unit(rng)),
                      n * (0.12 + 0.1 * unit(rng)), std::numbers::pi * unit(rng)};
        if (shape.kind == 2) shape.b *= 1.6;

        Sample s;
        char id[32];
        std::snprintf(id, sizeof id, "synth_%03d", i);
        s.id = id;
        s.image = Tensor(opts.size, opts.size, 3);
        s.mask = Tensor(opts.size, opts.size, 1);
        for (int y = 0; y < opts.size; ++y)
            for (int x = 0; x < opts.size; ++x) {
                const bool inside = shape.contains(x + 0.5, y + 0.5);
                const double stripe =
                    0.12 * std::sin(freq * (std::cos(theta) * x + std::sin(theta) * y) + phase);
                for (int c = 0; c < 3; ++c) {
                    const double v = inside ? fg[static_cast<std::size_t>(c)] + noise(rng)
                                            : base[static_cast<std::size_t>(c)] + stripe + noise(rng);
                    s.image(y, x, c) = std::clamp(v, 0.0, 1.0);
                }
                s.mask(y, x, 0) = inside ? 1.0 : 0.0;
            }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace purnet
