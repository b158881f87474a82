// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

// Times the serial and OpenMP convolution kernels on network-sized problems
// and checks that both produce bitwise-identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "purnet/kernels.hpp"

using namespace purnet;

namespace {

Tensor random_tensor(Shape s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Tensor t(s);
    for (double& v : t.values()) v = u(rng);
    return t;
}

bool same_bits(const Tensor& a, const Tensor& b) {
    return a.shape() == b.shape() && std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

double time_ms(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

struct Case {
    const char* name;
    int size, in, out;
    kernels::ConvGeometry g;
};

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::stoi(argv[1]) : 5;
    std::mt19937_64 rng(42);
    std::printf("threads: %d, repetitions: %d\n", kernels::max_threads(), reps);
    std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial ms", "omp ms", "speedup", "bitwise");

    const Case cases[] = {
        {"conv3x3 64x64 8->8", 64, 8, 8, {3, 1, 1}},
        {"conv3x3 32x32 16->16 s2", 64, 16, 16, {3, 2, 1}},
        {"conv3x3 80x80 32->32", 80, 32, 32, {3, 1, 1}},
        {"conv3x3 20x20 64->64 d2", 20, 64, 64, {3, 1, 2}},
        {"conv1x1 80x80 32->16", 80, 32, 16, {1, 1, 1}},
    };
    bool all_equal = true;
    auto report = [&](const std::string& name, double s, double o, bool eq) {
        all_equal = all_equal && eq;
        std::printf("%-28s %10.3f %10.3f %8.2f %s\n", name.c_str(), s, o, s / o, eq ? "yes" : "NO");
    };

    for (const Case& c : cases) {
        const Tensor x = random_tensor({c.size, c.size, c.in}, rng);
        const Tensor w = random_tensor({c.g.taps(), c.in, c.out}, rng);
        const Tensor b = random_tensor({c.out, 1, 1}, rng);
        const int o = c.g.out_size(c.size);
        const Tensor dy = random_tensor({o, o, c.out}, rng);
        Tensor ys(o, o, c.out), yo(o, o, c.out);
        report(std::string(c.name) + " fwd", time_ms([&] { kernels::serial::conv2d_forward(x, w, b.values(), c.g, ys); }, reps),
               time_ms([&] { kernels::omp::conv2d_forward(x, w, b.values(), c.g, yo); }, reps), same_bits(ys, yo));
        Tensor dxs(x.shape()), dxo(x.shape());
        report(std::string(c.name) + " dx",
               time_ms([&] { dxs.fill(0.0); kernels::serial::conv2d_backward_input(dy, w, c.g, dxs); }, reps),
               time_ms([&] { dxo.fill(0.0); kernels::omp::conv2d_backward_input(dy, w, c.g, dxo); }, reps),
               same_bits(dxs, dxo));
        Tensor dws(w.shape()), dwo(w.shape());
        report(std::string(c.name) + " dw",
               time_ms([&] { dws.fill(0.0); kernels::serial::conv2d_backward_weight(x, dy, c.g, dws); }, reps),
               time_ms([&] { dwo.fill(0.0); kernels::omp::conv2d_backward_weight(x, dy, c.g, dwo); }, reps),
               same_bits(dws, dwo));
    }
    {
        const Tensor x = random_tensor({40, 40, 32}, rng);
        const Tensor w = random_tensor({4, 32, 32}, rng);
        const Tensor b = random_tensor({32, 1, 1}, rng);
        Tensor ys(80, 80, 32), yo(80, 80, 32);
        report("deconv2x 40->80 32->32 fwd", time_ms([&] { kernels::serial::deconv2x_forward(x, w, b.values(), ys); }, reps),
               time_ms([&] { kernels::omp::deconv2x_forward(x, w, b.values(), yo); }, reps), same_bits(ys, yo));
    }
    std::printf("%s\n", all_equal ? "serial and omp results are bitwise identical" : "MISMATCH between serial and omp");
    return all_equal ? 0 : 1;
}
