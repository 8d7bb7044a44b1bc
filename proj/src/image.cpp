#include "mhof/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "mhof/error.hpp"

namespace mhof {

Image8 to_image8(const ImageF& img) {
    Image8 out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        float v = std::clamp(img.pixels[i], 0.f, 1.f);
        out.pixels[i] = static_cast<uint8_t>(std::lround(v * 255.f));
    }
    return out;
}

ImageF to_imagef(const Image8& img) {
    ImageF out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        out.pixels[i] = static_cast<float>(img.pixels[i]) / 255.f;
    return out;
}

template <typename Img>
static Vec3 sample_bilinear_impl(const Img& img, double x, double y, double scale) {
    double fx = std::clamp(x, 0.0, double(img.width - 1));
    double fy = std::clamp(y, 0.0, double(img.height - 1));
    int x0 = static_cast<int>(fx);
    int y0 = static_cast<int>(fy);
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double tx = fx - x0, ty = fy - y0;

    auto px = [&](int xi, int yi) {
        const auto* p = img.at(xi, yi);
        return Vec3(p[0] * scale, p[1] * scale, p[2] * scale);
    };
    Vec3 a = px(x0, y0) * (1 - tx) + px(x1, y0) * tx;
    Vec3 b = px(x0, y1) * (1 - tx) + px(x1, y1) * tx;
    return a * (1 - ty) + b * ty;
}

Vec3 sample_bilinear(const ImageF& img, double x, double y) {
    return sample_bilinear_impl(img, x, y, 1.0);
}

Vec3 sample_bilinear(const Image8& img, double x, double y) {
    return sample_bilinear_impl(img, x, y, 1.0 / 255.0);
}

namespace {

struct FileCloser {
    void operator()(FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

static void write_png_impl(const std::string& path, int width, int height, int bit_depth,
                           int color_type, const std::vector<png_bytep>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng error while writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytep*>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png(const Image8& img, const std::string& path) {
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.at(0, y));
    write_png_impl(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_png(const Image16& img, const std::string& path) {
    // PNG stores 16-bit samples big-endian.
    std::vector<uint8_t> buf(size_t(2) * img.width * img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        buf[2 * i] = static_cast<uint8_t>(img.pixels[i] >> 8);
        buf[2 * i + 1] = static_cast<uint8_t>(img.pixels[i] & 0xff);
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = &buf[size_t(2) * img.width * y];
    write_png_impl(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

static void read_png_rows(const std::string& path, int expect_channels, int expect_depth,
                          int* width, int* height, std::vector<uint8_t>* data) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open for reading: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("not a valid PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (expect_depth == 8) {
        // Normalize everything to 8-bit RGB.
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        if (depth == 16) png_set_strip_16(png);
        if (depth < 8) png_set_packing(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        png_set_expand(png);
    } else {
        if (color != PNG_COLOR_TYPE_GRAY || depth != 16) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw FormatError("expected 16-bit grayscale PNG: " + path);
        }
    }
    png_read_update_info(png, info);

    *width = static_cast<int>(png_get_image_width(png, info));
    *height = static_cast<int>(png_get_image_height(png, info));
    size_t rowbytes = png_get_rowbytes(png, info);
    if (rowbytes != size_t(*width) * expect_channels * (expect_depth / 8)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unexpected PNG row layout: " + path);
    }

    data->resize(rowbytes * *height);
    std::vector<png_bytep> rows(*height);
    for (int y = 0; y < *height; ++y) rows[y] = data->data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

Image8 read_png(const std::string& path) {
    Image8 img;
    std::vector<uint8_t> data;
    read_png_rows(path, 3, 8, &img.width, &img.height, &data);
    img.pixels = std::move(data);
    return img;
}

Image16 read_png_gray16(const std::string& path) {
    Image16 img;
    std::vector<uint8_t> data;
    read_png_rows(path, 1, 16, &img.width, &img.height, &data);
    img.pixels.resize(size_t(img.width) * img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<uint16_t>((data[2 * i] << 8) | data[2 * i + 1]);
    return img;
}

}  // namespace mhof
