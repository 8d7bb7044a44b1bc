#pragma once

#include <map>
#include <optional>
#include <string>

#include "mhof/image.hpp"
#include "mhof/renderer.hpp"

namespace mhof {

// Middlebury .flo: float magic 202021.25 ("PIEH"), int32 width, int32
// height, then row-major little-endian float (u, v) pairs.
void write_flo(const FlowField& flow, const std::string& path);
FlowField read_flo(const std::string& path);

// Mean endpoint error over the masked pixels (mask: non-zero bytes, or
// nullptr for all pixels). Empty selections yield NaN.
double epe(const FlowField& est, const FlowField& gt, const std::vector<uint8_t>* mask = nullptr);

// EPE restricted to each part's pixel set; key 0 is the background,
// key k (k >= 1) is model part k-1 (the SegMask encoding). Parts with
// zero pixels are omitted.
std::map<int, double> epe_by_part(const FlowField& est, const FlowField& gt, const SegMask& seg);

// Direction -> hue, magnitude -> saturation; zero flow is white.
// max_magnitude defaults to the 99th percentile of the field.
Image8 flow_to_color(const FlowField& flow, std::optional<double> max_magnitude = std::nullopt);

// Segmentation mask PNG encoding: 16-bit gray, value = actor * 256 + part.
void write_seg_png(const SegMask& seg, const std::string& path);
SegMask read_seg_png(const std::string& path);

}  // namespace mhof
