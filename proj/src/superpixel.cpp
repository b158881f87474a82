// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/superpixel.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "purnet/digest.hpp"

namespace purnet {

std::vector<int> SuperpixelSegmentation::region_sizes() const {
    std::vector<int> sizes(static_cast<std::size_t>(region_count), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

Tensor rgb_to_lab(const Tensor& rgb) {
    if (rgb.channels() != 3) throw DimensionError("rgb_to_lab expects 3 channels");
    auto linear = [](double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); };
    auto f = [](double t) {
        constexpr double d = 6.0 / 29.0;
        return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
    };
    Tensor lab(rgb.shape());
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const double* p = rgb.pixel(y, x);
            const double r = linear(p[0]), g = linear(p[1]), b = linear(p[2]);
            const double X = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.950456;
            const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
            const double Z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.088754;
            const double fx = f(X), fy = f(Y), fz = f(Z);
            double* o = lab.pixel(y, x);
            o[0] = 116.0 * fy - 16.0;
            o[1] = 500.0 * (fx - fy);
            o[2] = 200.0 * (fy - fz);
        }
    }
    return lab;
}

namespace {

struct Center {
    double l, a, b, y, x;
};

struct Components {
    std::vector<int> comp;  // component id per pixel
    std::vector<int> label;
    std::vector<int> size;
};

Components label_components(int h, int w, const std::vector<int>& raw) {
    const std::size_t n = raw.size();
    Components cc;
    cc.comp.assign(n, -1);
    std::vector<std::size_t> queue;
    queue.reserve(n);
    for (std::size_t start = 0; start < n; ++start) {
        if (cc.comp[start] >= 0) continue;
        const int id = static_cast<int>(cc.label.size());
        cc.label.push_back(raw[start]);
        cc.size.push_back(0);
        queue.clear();
        queue.push_back(start);
        cc.comp[start] = id;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t p = queue[qi];
            ++cc.size[static_cast<std::size_t>(id)];
            const int y = static_cast<int>(p / static_cast<std::size_t>(w));
            const int x = static_cast<int>(p % static_cast<std::size_t>(w));
            const std::size_t nb[4] = {p - static_cast<std::size_t>(w), p + static_cast<std::size_t>(w), p - 1, p + 1};
            const bool ok[4] = {y > 0, y + 1 < h, x > 0, x + 1 < w};
            for (int k = 0; k < 4; ++k) {
                if (!ok[k]) continue;
                const std::size_t q = nb[k];
                if (cc.comp[q] < 0 && raw[q] == raw[start]) {
                    cc.comp[q] = id;
                    queue.push_back(q);
                }
            }
        }
    }
    return cc;
}

// Merges every component that is not the largest of its label into the
// largest adjacent already-settled region. Returns compact labels numbered in
// raster order of first appearance.
SuperpixelSegmentation enforce_connectivity(int h, int w, const std::vector<int>& raw) {
    const std::size_t n = raw.size();
    const Components cc = label_components(h, w, raw);
    const std::vector<int>& comp = cc.comp;
    const std::vector<int>& comp_label = cc.label;
    const std::vector<int>& comp_size = cc.size;

    const std::size_t ncomp = comp_label.size();
    const int max_label = *std::max_element(raw.begin(), raw.end());
    std::vector<int> main_of_label(static_cast<std::size_t>(max_label) + 1, -1);
    for (std::size_t c = 0; c < ncomp; ++c) {
        int& m = main_of_label[static_cast<std::size_t>(comp_label[c])];
        if (m < 0 || comp_size[c] > comp_size[static_cast<std::size_t>(m)]) m = static_cast<int>(c);
    }

    std::vector<std::vector<int>> adjacent(ncomp);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w && comp[p] != comp[p + 1]) {
                adjacent[static_cast<std::size_t>(comp[p])].push_back(comp[p + 1]);
                adjacent[static_cast<std::size_t>(comp[p + 1])].push_back(comp[p]);
            }
            if (y + 1 < h && comp[p] != comp[p + w]) {
                adjacent[static_cast<std::size_t>(comp[p])].push_back(comp[p + w]);
                adjacent[static_cast<std::size_t>(comp[p + w])].push_back(comp[p]);
            }
        }
    }

    std::vector<int> region(ncomp, -1);
    std::vector<int> region_size;
    for (std::size_t c = 0; c < ncomp; ++c) {
        if (main_of_label[static_cast<std::size_t>(comp_label[c])] == static_cast<int>(c)) {
            region[c] = static_cast<int>(region_size.size());
            region_size.push_back(comp_size[c]);
        }
    }
    bool pending = true;
    while (pending) {
        pending = false;
        bool progressed = false;
        for (std::size_t c = 0; c < ncomp; ++c) {
            if (region[c] >= 0) continue;
            int best = -1;
            for (int nb : adjacent[c]) {
                const int r = region[static_cast<std::size_t>(nb)];
                if (r < 0) continue;
                if (best < 0 || region_size[static_cast<std::size_t>(r)] > region_size[static_cast<std::size_t>(best)] ||
                    (region_size[static_cast<std::size_t>(r)] == region_size[static_cast<std::size_t>(best)] && r < best)) {
                    best = r;
                }
            }
            if (best < 0) {
                pending = true;
                continue;
            }
            region[c] = best;
            region_size[static_cast<std::size_t>(best)] += comp_size[c];
            progressed = true;
        }
        if (pending && !progressed) throw NumericError("connectivity enforcement failed to settle");
    }

    SuperpixelSegmentation seg;
    seg.height = h;
    seg.width = w;
    seg.labels.resize(n);
    std::vector<int> compact(region_size.size(), -1);
    int next = 0;
    for (std::size_t p = 0; p < n; ++p) {
        int& id = compact[static_cast<std::size_t>(region[static_cast<std::size_t>(comp[p])])];
        if (id < 0) id = next++;
        seg.labels[p] = id;
    }
    seg.region_count = next;
    return seg;
}

}  // namespace

SuperpixelSegmentation slic(const Tensor& image, const SlicParams& params, SlicTrace* trace) {
    const int h = image.height();
    const int w = image.width();
    if (image.channels() != 3) throw DimensionError("slic expects an RGB image");
    const long npix = static_cast<long>(h) * w;
    if (params.n_regions < 1 || params.n_regions > npix) {
        throw InvalidArgument("slic n_regions must lie in [1, H*W], got " + std::to_string(params.n_regions));
    }
    if (!(params.compactness > 0.0)) throw InvalidArgument("slic compactness must be positive");

    const Tensor lab = rgb_to_lab(image);
    const double step = std::sqrt(static_cast<double>(npix) / params.n_regions);
    const int ny = std::max(1, static_cast<int>(std::lround(h / step)));
    const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
    const double sy = static_cast<double>(h) / ny;
    const double sx = static_cast<double>(w) / nx;

    auto grad_at = [&](int y, int x) {
        if (y < 1 || x < 1 || y + 1 >= h || x + 1 >= w) return std::numeric_limits<double>::infinity();
        double g = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double dx = lab(y, x + 1, k) - lab(y, x - 1, k);
            const double dy = lab(y + 1, x, k) - lab(y - 1, x, k);
            g += dx * dx + dy * dy;
        }
        return g;
    };

    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < ny; ++i) {
        for (int j = 0; j < nx; ++j) {
            int cy = std::min(h - 1, static_cast<int>((i + 0.5) * sy));
            int cx = std::min(w - 1, static_cast<int>((j + 0.5) * sx));
            // Seed moves to the lowest-gradient position of its 3x3 neighbourhood
            // only on a strict improvement, so featureless images keep the grid.
            double best = grad_at(cy, cx);
            int by = cy, bx = cx;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const double g = grad_at(cy + dy, cx + dx);
                    if (g < best) {
                        best = g;
                        by = cy + dy;
                        bx = cx + dx;
                    }
                }
            const double* p = lab.pixel(by, bx);
            centers.push_back({p[0], p[1], p[2], static_cast<double>(by), static_cast<double>(bx)});
        }
    }

    const double spatial_weight = (params.compactness / step) * (params.compactness / step);
    auto distance = [&](const Center& c, int y, int x) {
        const double* p = lab.pixel(y, x);
        const double dl = p[0] - c.l, da = p[1] - c.a, db = p[2] - c.b;
        const double ddy = y - c.y, ddx = x - c.x;
        return dl * dl + da * da + db * db + spatial_weight * (ddy * ddy + ddx * ddx);
    };

    const auto n = static_cast<std::size_t>(npix);
    std::vector<int> label(n, -1);
    std::vector<double> dist(n);
    const int radius = static_cast<int>(std::ceil(step));
    for (int iter = 0; iter < std::max(1, params.iterations); ++iter) {
        // Seed with the distance to the current center.
        for (std::size_t p = 0; p < n; ++p) {
            dist[p] = label[p] < 0 ? std::numeric_limits<double>::infinity()
                                   : distance(centers[static_cast<std::size_t>(label[p])], static_cast<int>(p / w),
                                              static_cast<int>(p % w));
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const Center& c = centers[k];
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y)) - radius);
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y)) + radius);
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x)) - radius);
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x)) + radius);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t p = static_cast<std::size_t>(y) * w + x;
                    const double d = distance(c, y, x);
                    if (d < dist[p]) {
                        dist[p] = d;
                        label[p] = static_cast<int>(k);
                    }
                }
            }
        }
        for (std::size_t p = 0; p < n; ++p) {
            if (label[p] >= 0) continue;
            // Outside every search window (only possible on degenerate grids).
            const int y = static_cast<int>(p / w), x = static_cast<int>(p % w);
            for (std::size_t k = 0; k < centers.size(); ++k) {
                const double d = distance(centers[k], y, x);
                if (d < dist[p]) {
                    dist[p] = d;
                    label[p] = static_cast<int>(k);
                }
            }
        }
        if (trace) trace->objective.push_back(std::accumulate(dist.begin(), dist.end(), 0.0));

        std::vector<Center> sum(centers.size(), Center{0, 0, 0, 0, 0});
        std::vector<long> count(centers.size(), 0);
        for (std::size_t p = 0; p < n; ++p) {
            const auto k = static_cast<std::size_t>(label[p]);
            const double* v = lab.pixel(static_cast<int>(p / w), static_cast<int>(p % w));
            sum[k].l += v[0];
            sum[k].a += v[1];
            sum[k].b += v[2];
            sum[k].y += static_cast<double>(p / w);
            sum[k].x += static_cast<double>(p % w);
            ++count[k];
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (count[k] == 0) continue;
            const double inv = 1.0 / static_cast<double>(count[k]);
            centers[k] = {sum[k].l * inv, sum[k].a * inv, sum[k].b * inv, sum[k].y * inv, sum[k].x * inv};
        }
    }
    return enforce_connectivity(h, w, label);
}

SuperpixelSegmentation flip_horizontal(const SuperpixelSegmentation& seg) {
    SuperpixelSegmentation out = seg;
    for (int y = 0; y < seg.height; ++y)
        for (int x = 0; x < seg.width; ++x)
            out.labels[static_cast<std::size_t>(y) * seg.width + (seg.width - 1 - x)] = seg.at(y, x);
    return out;
}

bool regions_connected(const SuperpixelSegmentation& seg) {
    const Components cc = label_components(seg.height, seg.width, seg.labels);
    std::vector<int> seen(static_cast<std::size_t>(seg.region_count), 0);
    for (int l : cc.label) {
        if (l < 0 || l >= seg.region_count || seen[static_cast<std::size_t>(l)]++) return false;
    }
    return true;
}

Tensor region_means(const Tensor& map, const SuperpixelSegmentation& seg) {
    if (map.height() != seg.height || map.width() != seg.width || map.channels() != 1) {
        throw ShapeError("region_means: map " + to_string(map.shape()) + " vs segmentation " +
                         std::to_string(seg.height) + "x" + std::to_string(seg.width));
    }
    Tensor means(seg.region_count, 1, 1);
    std::vector<long> count(static_cast<std::size_t>(seg.region_count), 0);
    for (std::size_t p = 0; p < seg.labels.size(); ++p) {
        const auto l = static_cast<std::size_t>(seg.labels[p]);
        means[l] += map[p];
        ++count[l];
    }
    for (std::size_t l = 0; l < count.size(); ++l) {
        if (count[l] == 0) throw InvalidArgument("segmentation has an empty region " + std::to_string(l));
        means[l] /= static_cast<double>(count[l]);
    }
    return means;
}

ag::Var region_means(const ag::Var& map, const SuperpixelSegmentation& seg) {
    Tensor means = region_means(map->value, seg);
    ag::Var out = ag::constant(std::move(means));
    if (!map->requires_grad) return out;
    const std::vector<int> sizes = seg.region_sizes();
    out->requires_grad = true;
    out->parents = {map};
    out->backward = [labels = seg.labels, sizes](ag::Node& self) {
        Tensor& g = self.parents[0]->grad_buffer();
        for (std::size_t p = 0; p < labels.size(); ++p) {
            const auto l = static_cast<std::size_t>(labels[p]);
            g[p] += self.grad[l] / static_cast<double>(sizes[l]);
        }
    };
    return out;
}

namespace {

constexpr char kCacheMagic[4] = {'P', 'S', 'E', 'G'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

SegmentationCache::SegmentationCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path SegmentationCache::entry_path(const Tensor& image, const SlicParams& params) const {
    std::string bytes(reinterpret_cast<const char*>(image.data()), image.size() * sizeof(double));
    const Shape s = image.shape();
    bytes.append(reinterpret_cast<const char*>(&s), sizeof(s));
    std::ostringstream name;
    name << sha256_hex(bytes) << "_n" << params.n_regions << "_m" << params.compactness << "_i" << params.iterations
         << ".seg";
    return dir_ / name.str();
}

std::optional<SuperpixelSegmentation> SegmentationCache::load(const Tensor& image, const SlicParams& params) const {
    std::ifstream in(entry_path(image, params), std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    std::uint32_t version = 0;
    std::int32_t h = 0, w = 0, regions = 0;
    std::uint64_t packed = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0 || !read_pod(in, version) || version != kCacheVersion ||
        !read_pod(in, h) || !read_pod(in, w) || !read_pod(in, regions) || !read_pod(in, packed)) {
        return std::nullopt;
    }
    if (h != image.height() || w != image.width()) return std::nullopt;
    std::vector<unsigned char> buf(packed);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(packed))) return std::nullopt;
    SuperpixelSegmentation seg;
    seg.height = h;
    seg.width = w;
    seg.region_count = regions;
    std::vector<std::int32_t> labels(static_cast<std::size_t>(h) * w);
    uLongf raw = static_cast<uLongf>(labels.size() * sizeof(std::int32_t));
    if (uncompress(reinterpret_cast<Bytef*>(labels.data()), &raw, buf.data(), static_cast<uLong>(packed)) != Z_OK ||
        raw != labels.size() * sizeof(std::int32_t)) {
        return std::nullopt;
    }
    seg.labels.assign(labels.begin(), labels.end());
    return seg;
}

void SegmentationCache::store(const Tensor& image, const SlicParams& params, const SuperpixelSegmentation& seg) const {
    std::vector<std::int32_t> labels(seg.labels.begin(), seg.labels.end());
    const uLong raw = static_cast<uLong>(labels.size() * sizeof(std::int32_t));
    uLongf packed = compressBound(raw);
    std::vector<unsigned char> buf(packed);
    if (compress2(buf.data(), &packed, reinterpret_cast<const Bytef*>(labels.data()), raw, Z_BEST_COMPRESSION) != Z_OK) {
        throw Error("segmentation cache: compression failed");
    }
    const auto path = entry_path(image, params);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(kCacheMagic, 4);
        put(out, kCacheVersion);
        put(out, static_cast<std::int32_t>(seg.height));
        put(out, static_cast<std::int32_t>(seg.width));
        put(out, static_cast<std::int32_t>(seg.region_count));
        put(out, static_cast<std::uint64_t>(packed));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(packed));
        if (!out) throw Error("segmentation cache: cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

SuperpixelSegmentation SegmentationCache::get(const Tensor& image, const SlicParams& params) const {
    if (auto hit = load(image, params)) return *hit;
    SuperpixelSegmentation seg = slic(image, params);
    store(image, params, seg);
    return seg;
}

}  // namespace purnet
