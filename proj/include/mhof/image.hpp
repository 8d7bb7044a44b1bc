#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhof/vec.hpp"

namespace mhof {

// Interleaved 8-bit RGB image.
struct Image8 {
    int width = 0, height = 0;
    std::vector<uint8_t> pixels;  // 3 * width * height

    Image8() = default;
    Image8(int w, int h, uint8_t fill = 0) : width(w), height(h), pixels(size_t(3) * w * h, fill) {}

    uint8_t* at(int x, int y) { return &pixels[3 * (size_t(y) * width + x)]; }
    const uint8_t* at(int x, int y) const { return &pixels[3 * (size_t(y) * width + x)]; }

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        uint8_t* p = at(x, y);
        p[0] = r; p[1] = g; p[2] = b;
    }
};

// Interleaved float RGB image, nominal range [0, 1].
struct ImageF {
    int width = 0, height = 0;
    std::vector<float> pixels;  // 3 * width * height

    ImageF() = default;
    ImageF(int w, int h, float fill = 0.f) : width(w), height(h), pixels(size_t(3) * w * h, fill) {}

    float* at(int x, int y) { return &pixels[3 * (size_t(y) * width + x)]; }
    const float* at(int x, int y) const { return &pixels[3 * (size_t(y) * width + x)]; }
};

// Single-channel 16-bit image (segmentation masks).
struct Image16 {
    int width = 0, height = 0;
    std::vector<uint16_t> pixels;

    Image16() = default;
    Image16(int w, int h, uint16_t fill = 0) : width(w), height(h), pixels(size_t(w) * h, fill) {}

    uint16_t& at(int x, int y) { return pixels[size_t(y) * width + x]; }
    uint16_t at(int x, int y) const { return pixels[size_t(y) * width + x]; }
};

Image8 to_image8(const ImageF& img);
ImageF to_imagef(const Image8& img);

// Bilinear sample with edge clamping; x/y in pixel units where (0, 0) is
// the center of the top-left pixel.
Vec3 sample_bilinear(const ImageF& img, double x, double y);
Vec3 sample_bilinear(const Image8& img, double x, double y);

// PNG I/O. Throws FormatError / std::runtime_error on failure.
void write_png(const Image8& img, const std::string& path);
void write_png(const Image16& img, const std::string& path);
Image8 read_png(const std::string& path);
Image16 read_png_gray16(const std::string& path);

}  // namespace mhof
