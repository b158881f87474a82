// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace purnet {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class ShapeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "shape_mismatch"; }
};

class DimensionError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "dimension_mismatch"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

class NumericError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric"; }
};

struct Shape {
    int h = 0;
    int w = 0;
    int c = 0;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c);
    }
    bool same_spatial(const Shape& o) const noexcept { return h == o.h && w == o.w; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense rank-3 array in height x width x channel order (channel fastest).
///
/// Every feature map, attention field, saliency map (c == 1) and mask in the
/// library is a Tensor. Convolution weights reuse the same container with
/// shape {taps, in_channels, out_channels}.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(int h, int w, int c, double fill = 0.0) : Tensor(Shape{h, w, c}, fill) {}
    Tensor(Shape shape, std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    int height() const noexcept { return shape_.h; }
    int width() const noexcept { return shape_.w; }
    int channels() const noexcept { return shape_.c; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(int y, int x, int c) noexcept { return data_[index(y, x, c)]; }
    double operator()(int y, int x, int c) const noexcept { return data_[index(y, x, c)]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double* pixel(int y, int x) noexcept { return data_.data() + index(y, x, 0); }
    const double* pixel(int y, int x) const noexcept { return data_.data() + index(y, x, 0); }

    void fill(double v);
    double sum() const;
    bool all_finite() const;
    /// Same shape and elementwise equal values.
    friend bool operator==(const Tensor&, const Tensor&) = default;

    std::size_t index(int y, int x, int c) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.w) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(shape_.c) +
               static_cast<std::size_t>(c);
    }

private:
    Shape shape_{};
    std::vector<double> data_;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

/// Bilinear resampling with half-pixel centers (align_corners = false).
Tensor resize_bilinear(const Tensor& src, int out_h, int out_w);
Tensor resize_nearest(const Tensor& src, int out_h, int out_w);
Tensor flip_horizontal(const Tensor& src);

/// Row weights of the half-pixel bilinear map from `in` samples to `out` samples.
struct LinearTap {
    int i0;
    int i1;
    double w1;  // weight of i1; i0 gets 1 - w1
};
std::vector<LinearTap> bilinear_taps(int in, int out);

}  // namespace purnet
