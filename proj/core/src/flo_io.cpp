#include "defence/flo_io.hpp"

#include "defence/atomic_file.hpp"
#include "defence/error.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace defence {

namespace {

constexpr float kMagic = 202021.25f;

template <typename T>
bool read_pod(std::istream& in, T& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

FlowField read_flow(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open flow file " + path.string());
    float magic = 0.0f;
    std::int32_t w = 0;
    std::int32_t h = 0;
    if (!read_pod(in, magic) || magic != kMagic) {
        throw InvalidArgument(path.string() + ": not a .flo file (bad magic)");
    }
    if (!read_pod(in, w) || !read_pod(in, h) || w < 1 || h < 1 || w > (1 << 16) || h > (1 << 16)) {
        throw InvalidArgument(path.string() + ": invalid flow dimensions");
    }
    std::vector<float> raw(static_cast<std::size_t>(w) * h * 2);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)))) {
        throw InvalidArgument(path.string() + ": truncated flow data");
    }
    FlowField flow = FlowField::zeros(w, h);
    for (std::size_t i = 0; i < raw.size() / 2; ++i) {
        const double u = raw[2 * i];
        const double v = raw[2 * i + 1];
        if (!std::isfinite(u) || !std::isfinite(v)) {
            throw InvalidArgument(path.string() + ": non-finite flow vector");
        }
        flow.u.values()[i] = u;
        flow.v.values()[i] = v;
    }
    return flow;
}

void write_flow(const std::filesystem::path& path, const FlowField& flow) {
    if (!flow.u.same_shape(flow.v)) throw InvalidArgument("flow components differ in size");
    write_atomically(path, [&](const std::filesystem::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        write_pod(out, kMagic);
        write_pod(out, static_cast<std::int32_t>(flow.width()));
        write_pod(out, static_cast<std::int32_t>(flow.height()));
        const auto u = flow.u.values();
        const auto v = flow.v.values();
        for (std::size_t i = 0; i < u.size(); ++i) {
            write_pod(out, static_cast<float>(u[i]));
            write_pod(out, static_cast<float>(v[i]));
        }
        if (!out.flush()) throw IoError("write failed for " + tmp.string());
    });
}

}  // namespace defence
