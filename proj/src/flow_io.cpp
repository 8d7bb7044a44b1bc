#include "mhof/flow_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "mhof/error.hpp"
#include "mhof/texture_lab.hpp"

namespace mhof {

namespace {
constexpr float kFloMagic = 202021.25f;  // "PIEH" as a little-endian float
constexpr int kMaxDim = 100000;
}  // namespace

void write_flo(const FlowField& flow, const std::string& path) {
    for (float v : flow.data)
        if (!std::isfinite(v)) throw std::invalid_argument("write_flo: non-finite flow value");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write flow file: " + path);
    int32_t w = flow.width, h = flow.height;
    out.write(reinterpret_cast<const char*>(&kFloMagic), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(flow.data.data()),
              static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
    if (!out) throw std::runtime_error("short write on flow file: " + path);
}

FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read flow file: " + path);
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<size_t>(in.tellg());
    in.seekg(0);

    if (file_size < 12) throw FormatError("flow file truncated before header", file_size);
    float magic = 0.f;
    int32_t w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&magic), 4);
    if (magic != kFloMagic) throw FormatError("bad flow file magic", 0);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    if (w <= 0 || w > kMaxDim) throw FormatError("bad flow file width", 4);
    if (h <= 0 || h > kMaxDim) throw FormatError("bad flow file height", 8);

    const size_t expect = size_t(12) + size_t(w) * h * 2 * sizeof(float);
    if (file_size != expect)
        throw FormatError("flow file length " + std::to_string(file_size) + " != expected " +
                              std::to_string(expect),
                          std::min(file_size, expect));

    FlowField flow(w, h);
    in.read(reinterpret_cast<char*>(flow.data.data()),
            static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
    if (!in) throw FormatError("flow file payload short read", 12);
    return flow;
}

double epe(const FlowField& est, const FlowField& gt, const std::vector<uint8_t>* mask) {
    if (est.width != gt.width || est.height != gt.height)
        throw std::invalid_argument("epe: dimension mismatch");
    if (mask && mask->size() != size_t(est.width) * est.height)
        throw std::invalid_argument("epe: mask size mismatch");

    double sum = 0.0;
    long n = 0;
    for (int y = 0; y < est.height; ++y) {
        for (int x = 0; x < est.width; ++x) {
            if (mask && !(*mask)[size_t(y) * est.width + x]) continue;
            double du = double(est.u(x, y)) - gt.u(x, y);
            double dv = double(est.v(x, y)) - gt.v(x, y);
            if (!std::isfinite(du) || !std::isfinite(dv))
                throw std::invalid_argument("epe: non-finite flow value");
            sum += std::sqrt(du * du + dv * dv);
            ++n;
        }
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / n;
}

std::map<int, double> epe_by_part(const FlowField& est, const FlowField& gt, const SegMask& seg) {
    if (est.width != gt.width || est.height != gt.height || est.width != seg.width ||
        est.height != seg.height)
        throw std::invalid_argument("epe_by_part: dimension mismatch");

    std::map<int, double> sums;
    std::map<int, long> counts;
    for (int y = 0; y < est.height; ++y) {
        for (int x = 0; x < est.width; ++x) {
            int key = seg.actor[seg.idx(x, y)] == 0 ? 0 : seg.part[seg.idx(x, y)];
            double du = double(est.u(x, y)) - gt.u(x, y);
            double dv = double(est.v(x, y)) - gt.v(x, y);
            if (!std::isfinite(du) || !std::isfinite(dv))
                throw std::invalid_argument("epe_by_part: non-finite flow value");
            sums[key] += std::sqrt(du * du + dv * dv);
            ++counts[key];
        }
    }
    std::map<int, double> out;
    for (auto& [key, sum] : sums) out[key] = sum / counts[key];
    return out;
}

Image8 flow_to_color(const FlowField& flow, std::optional<double> max_magnitude) {
    double maxmag;
    if (max_magnitude) {
        maxmag = *max_magnitude;
    } else {
        std::vector<double> mags;
        mags.reserve(size_t(flow.width) * flow.height);
        for (int y = 0; y < flow.height; ++y)
            for (int x = 0; x < flow.width; ++x)
                mags.push_back(std::hypot(double(flow.u(x, y)), double(flow.v(x, y))));
        size_t k = static_cast<size_t>(0.99 * (mags.size() - 1));
        std::nth_element(mags.begin(), mags.begin() + k, mags.end());
        maxmag = mags[k];
    }
    if (!(maxmag > 0.0)) maxmag = 1.0;

    Image8 img(flow.width, flow.height);
    for (int y = 0; y < flow.height; ++y) {
        for (int x = 0; x < flow.width; ++x) {
            double u = flow.u(x, y), v = flow.v(x, y);
            double mag = std::hypot(u, v);
            double hue = std::atan2(-v, -u) * 180.0 / M_PI + 180.0;  // [0, 360)
            double sat = std::min(1.0, mag / maxmag);
            Vec3 rgb = hsv_to_rgb({hue, sat, 1.0});
            img.set(x, y, static_cast<uint8_t>(std::lround(rgb.x * 255.0)),
                    static_cast<uint8_t>(std::lround(rgb.y * 255.0)),
                    static_cast<uint8_t>(std::lround(rgb.z * 255.0)));
        }
    }
    return img;
}

void write_seg_png(const SegMask& seg, const std::string& path) {
    Image16 img(seg.width, seg.height);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<uint16_t>((seg.actor[i] << 8) | seg.part[i]);
    write_png(img, path);
}

SegMask read_seg_png(const std::string& path) {
    Image16 img = read_png_gray16(path);
    SegMask seg(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        seg.actor[i] = static_cast<uint8_t>(img.pixels[i] >> 8);
        seg.part[i] = static_cast<uint8_t>(img.pixels[i] & 0xff);
    }
    return seg;
}

}  // namespace mhof
