// SPDX-FileCopyrightText: © 2026 PurNet contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "purnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "purnet/digest.hpp"

namespace purnet {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'N', 'C', 'K'};

class Writer {
public:
    template <typename T>
    void pod(const T& v) {
        const auto* p = reinterpret_cast<const unsigned char*>(&v);
        out.insert(out.end(), p, p + sizeof(T));
    }
    void str(const std::string& s) {
        pod(static_cast<std::uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    void tensors(const std::vector<NamedTensor>& ts) {
        pod(static_cast<std::uint32_t>(ts.size()));
        for (const NamedTensor& t : ts) {
            str(t.name);
            pod(static_cast<std::int32_t>(t.value.height()));
            pod(static_cast<std::int32_t>(t.value.width()));
            pod(static_cast<std::int32_t>(t.value.channels()));
            for (double v : t.value.values()) pod(v);
        }
    }
    std::vector<unsigned char> out;
};

class Reader {
public:
    explicit Reader(const std::vector<unsigned char>& b) : bytes(b) {}

    template <typename T>
    T pod() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::string str() {
        const auto n = pod<std::uint32_t>();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
        pos += n;
        return s;
    }
    std::vector<NamedTensor> tensors() {
        const auto n = pod<std::uint32_t>();
        std::vector<NamedTensor> ts;
        for (std::uint32_t i = 0; i < n; ++i) {
            NamedTensor t;
            t.name = str();
            const auto h = pod<std::int32_t>(), w = pod<std::int32_t>(), c = pod<std::int32_t>();
            if (h < 0 || w < 0 || c < 0) throw InvalidArgument("checkpoint: negative tensor extent for " + t.name);
            t.value = Tensor(h, w, c);
            need(t.value.size() * sizeof(double));
            for (double& v : t.value.values()) v = pod<double>();
            ts.push_back(std::move(t));
        }
        return ts;
    }
    void need(std::size_t n) const {
        if (bytes.size() - pos < n) throw InvalidArgument("checkpoint is truncated");
    }
    bool done() const { return pos == bytes.size(); }

    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;
};

}  // namespace

std::vector<unsigned char> serialize(const Checkpoint& c) {
    Writer w;
    w.out.insert(w.out.end(), kMagic, kMagic + 4);
    w.pod(Checkpoint::kVersion);
    w.str(c.config_json);
    w.str(c.config_hash);
    w.pod(static_cast<std::int32_t>(c.stage));
    w.pod(static_cast<std::int64_t>(c.iteration));
    w.tensors(c.parameters);
    w.tensors(c.momentum);
    return std::move(w.out);
}

Checkpoint deserialize(const std::vector<unsigned char>& bytes) {
    Reader r(bytes);
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw InvalidArgument("not a checkpoint file (bad magic)");
    r.pos = 4;
    const auto version = r.pod<std::uint32_t>();
    if (version != Checkpoint::kVersion) {
        throw InvalidArgument("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint c;
    c.config_json = r.str();
    c.config_hash = r.str();
    c.stage = r.pod<std::int32_t>();
    c.iteration = r.pod<std::int64_t>();
    c.parameters = r.tensors();
    c.momentum = r.tensors();
    if (!r.done()) throw InvalidArgument("checkpoint has trailing bytes");
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    const std::vector<unsigned char> bytes = serialize(c);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write checkpoint " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw InvalidArgument("failed writing checkpoint " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open checkpoint " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

std::string checkpoint_hash(const Checkpoint& c) { return sha256_hex(serialize(c)); }

std::vector<NamedTensor> snapshot_parameters(const ParameterRegistry& reg) {
    std::vector<NamedTensor> out;
    for (const Parameter& p : reg.all()) out.push_back({p.name, p.var->value});
    return out;
}

void restore_parameters(ParameterRegistry& reg, const std::vector<NamedTensor>& values) {
    auto& params = reg.all();
    if (params.size() != values.size()) {
        throw ShapeError("checkpoint holds " + std::to_string(values.size()) + " parameters, model has " +
                         std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name != values[i].name) {
            throw ShapeError("checkpoint parameter " + values[i].name + " where model expects " + params[i].name);
        }
        require_same_shape(params[i].var->value, values[i].value, params[i].name.c_str());
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i].var->value = values[i].value;
}

}  // namespace purnet
