#include "mhof/texture_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mhof {

Vec3 rgb_to_hsv(const Vec3& rgb) {
    double r = std::clamp(rgb.x, 0.0, 1.0);
    double g = std::clamp(rgb.y, 0.0, 1.0);
    double b = std::clamp(rgb.z, 0.0, 1.0);
    double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    double d = mx - mn;
    double h = 0.0;
    if (d > 0.0) {
        if (mx == r)
            h = 60.0 * std::fmod((g - b) / d, 6.0);
        else if (mx == g)
            h = 60.0 * ((b - r) / d + 2.0);
        else
            h = 60.0 * ((r - g) / d + 4.0);
        if (h < 0.0) h += 360.0;
    }
    double s = mx > 0.0 ? d / mx : 0.0;
    return {h, s, mx};
}

Vec3 hsv_to_rgb(const Vec3& hsv) {
    double h = hsv.x - 360.0 * std::floor(hsv.x / 360.0);
    double s = std::clamp(hsv.y, 0.0, 1.0);
    double v = std::clamp(hsv.z, 0.0, 1.0);
    double c = v * s;
    double hp = h / 60.0;
    double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        case 5: r = c; b = x; break;
    }
    double m = v - c;
    return {r + m, g + m, b + m};
}

namespace {

void check_region(const Texture& tex) {
    const auto& r = tex.sample_region;
    if (r[2] <= 0 || r[3] <= 0 || r[0] < 0 || r[1] < 0 || r[0] + r[2] > tex.pixels.width ||
        r[1] + r[3] > tex.pixels.height)
        throw std::invalid_argument("texture sample region is empty or out of bounds");
}

Vec3 pixel_rgb(const Image8& img, int x, int y) {
    const uint8_t* p = img.at(x, y);
    return {p[0] / 255.0, p[1] / 255.0, p[2] / 255.0};
}

double wrap_degrees(double h) { return h - 360.0 * std::floor(h / 360.0); }

}  // namespace

Vec3 mean_hsv(const Texture& tex) {
    check_region(tex);
    const auto& r = tex.sample_region;
    double cs = 0.0, sn = 0.0, s_sum = 0.0, v_sum = 0.0;
    long n = 0;
    for (int y = r[1]; y < r[1] + r[3]; ++y) {
        for (int x = r[0]; x < r[0] + r[2]; ++x) {
            Vec3 hsv = rgb_to_hsv(pixel_rgb(tex.pixels, x, y));
            double rad = hsv.x * M_PI / 180.0;
            cs += std::cos(rad);
            sn += std::sin(rad);
            s_sum += hsv.y;
            v_sum += hsv.z;
            ++n;
        }
    }
    double h = 0.0;
    if (std::abs(cs) > 1e-12 || std::abs(sn) > 1e-12)
        h = wrap_degrees(std::atan2(sn / n, cs / n) * 180.0 / M_PI);
    return {h, s_sum / n, v_sum / n};
}

HandMatch match_hand_texture(const Texture& body, const std::vector<Texture>& hands) {
    if (hands.empty()) throw std::invalid_argument("match_hand_texture: empty hand list");

    auto cone = [](const Vec3& hsv) {
        double rad = hsv.x * M_PI / 180.0;
        return Vec3{std::cos(rad) * hsv.y, std::sin(rad) * hsv.y, hsv.z};
    };

    Vec3 body_mean = mean_hsv(body);
    Vec3 body_cone = cone(body_mean);
    int best = 0;
    double best_d = 1e300;
    for (size_t i = 0; i < hands.size(); ++i) {
        double d = (cone(mean_hsv(hands[i])) - body_cone).squared_norm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }

    Vec3 hand_mean = mean_hsv(hands[best]);
    double dh = body_mean.x - hand_mean.x;
    dh -= 360.0 * std::round(dh / 360.0);  // shortest circular shift
    double ds = body_mean.y - hand_mean.y;
    double dv = body_mean.z - hand_mean.z;

    HandMatch match;
    match.index = best;
    match.shifted = hands[best];
    match.shifted.id = hands[best].id + "+shift";
    Image8& img = match.shifted.pixels;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            Vec3 hsv = rgb_to_hsv(pixel_rgb(img, x, y));
            hsv.x = wrap_degrees(hsv.x + dh);
            double s = hsv.y + ds, v = hsv.z + dv;
            if (s < 0.0 || s > 1.0 || v < 0.0 || v > 1.0) match.clamped = true;
            hsv.y = std::clamp(s, 0.0, 1.0);
            hsv.z = std::clamp(v, 0.0, 1.0);
            Vec3 rgb = hsv_to_rgb(hsv);
            img.set(x, y, static_cast<uint8_t>(std::lround(rgb.x * 255.0)),
                    static_cast<uint8_t>(std::lround(rgb.y * 255.0)),
                    static_cast<uint8_t>(std::lround(rgb.z * 255.0)));
        }
    }
    return match;
}

namespace {

std::array<int, 4> pixel_rect(const std::array<double, 4>& r, int w, int h) {
    int x0 = static_cast<int>(std::floor(r[0] * w));
    int y0 = static_cast<int>(std::floor(r[1] * h));
    int x1 = static_cast<int>(std::ceil((r[0] + r[2]) * w));
    int y1 = static_cast<int>(std::ceil((r[1] + r[3]) * h));
    x0 = std::clamp(x0, 0, w);
    y0 = std::clamp(y0, 0, h);
    x1 = std::clamp(x1, 0, w);
    y1 = std::clamp(y1, 0, h);
    return {x0, y0, x1 - x0, y1 - y0};
}

bool is_hand_part(const BodyModel& model, int part) {
    if (part == 20 || part == 21 || part == 22 || part == 23) return true;
    for (int j : model.finger_joints)
        if (part == j) return true;
    return false;
}

}  // namespace

Texture apply_hand_texture(const Texture& body, const Texture& hand, const BodyModel& model) {
    if (hand.pixels.width != body.pixels.width || hand.pixels.height != body.pixels.height)
        throw std::invalid_argument("apply_hand_texture: size mismatch");
    Texture out = body;
    for (int p = 0; p < model.part_count(); ++p) {
        if (!is_hand_part(model, p)) continue;
        auto r = pixel_rect(model.part_uv_rect[p], body.pixels.width, body.pixels.height);
        for (int y = r[1]; y < r[1] + r[3]; ++y)
            for (int x = r[0]; x < r[0] + r[2]; ++x) {
                const uint8_t* src = hand.pixels.at(x, y);
                out.pixels.set(x, y, src[0], src[1], src[2]);
            }
    }
    return out;
}

std::array<std::vector<std::string>, 3> split_assets(Rng& rng, const std::vector<std::string>& ids,
                                                     const std::array<double, 3>& ratios) {
    double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split_assets: ratios must sum to 1");
    for (double r : ratios)
        if (r < 0.0) throw std::invalid_argument("split_assets: negative ratio");

    int nonzero = 0;
    for (double r : ratios)
        if (r > 0.0) ++nonzero;
    if (static_cast<int>(ids.size()) < nonzero)
        throw std::invalid_argument("split_assets: fewer ids than non-zero splits");

    std::vector<std::string> shuffled = ids;
    rng.shuffle(shuffled);

    const int n = static_cast<int>(ids.size());
    std::array<int, 3> counts{};
    std::array<double, 3> frac{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double exact = ratios[i] * n;
        counts[i] = static_cast<int>(std::floor(exact));
        frac[i] = exact - counts[i];
        assigned += counts[i];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (frac[i] > frac[best]) best = i;
        ++counts[best];
        frac[best] = -1.0;
        ++assigned;
    }
    // Every split with a non-zero ratio gets at least one id.
    for (int i = 0; i < 3; ++i) {
        while (ratios[i] > 0.0 && counts[i] == 0) {
            int donor = 0;
            for (int k = 1; k < 3; ++k)
                if (counts[k] > counts[donor]) donor = k;
            --counts[donor];
            ++counts[i];
        }
    }

    std::array<std::vector<std::string>, 3> out;
    int pos = 0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < counts[i]; ++k) out[i].push_back(shuffled[pos++]);
    return out;
}

// ---------------------------------------------------------------------------
// Procedural textures

namespace {

struct Mottle {
    double kx1, ky1, p1, kx2, ky2, p2, amp;

    static Mottle sample(Rng& rng, double amp) {
        return {rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0), rng.uniform(0.0, 2.0 * M_PI),
                rng.uniform(2.0, 6.0), rng.uniform(2.0, 6.0), rng.uniform(0.0, 2.0 * M_PI), amp};
    }
    double eval(double u, double v) const {
        return 1.0 + amp * (std::sin(2.0 * M_PI * kx1 * u + p1) * std::sin(2.0 * M_PI * ky1 * v + p1) +
                            0.5 * std::sin(2.0 * M_PI * kx2 * u + p2) *
                                std::cos(2.0 * M_PI * ky2 * v + p2));
    }
};

void fill_rect(Image8& img, const std::array<int, 4>& r, const Vec3& base, const Mottle& mottle,
               const Vec3& band_color, double band_freq) {
    for (int y = r[1]; y < r[1] + r[3]; ++y) {
        for (int x = r[0]; x < r[0] + r[2]; ++x) {
            double u = r[2] > 1 ? double(x - r[0]) / (r[2] - 1) : 0.0;
            double v = r[3] > 1 ? double(y - r[1]) / (r[3] - 1) : 0.0;
            Vec3 c = base;
            if (band_freq > 0.0) {
                double t = 0.5 + 0.5 * std::sin(2.0 * M_PI * band_freq * v);
                c = base * (1.0 - t) + band_color * t;
            }
            double m = mottle.eval(u, v);
            c = {std::clamp(c.x * m, 0.0, 1.0), std::clamp(c.y * m, 0.0, 1.0),
                 std::clamp(c.z * m, 0.0, 1.0)};
            img.set(x, y, static_cast<uint8_t>(std::lround(c.x * 255.0)),
                    static_cast<uint8_t>(std::lround(c.y * 255.0)),
                    static_cast<uint8_t>(std::lround(c.z * 255.0)));
        }
    }
}

Vec3 sample_skin_tone(Rng& rng) {
    return hsv_to_rgb({rng.uniform(15.0, 40.0), rng.uniform(0.25, 0.55), rng.uniform(0.35, 0.95)});
}

Vec3 sample_cloth_color(Rng& rng) {
    return hsv_to_rgb({rng.uniform(0.0, 360.0), rng.uniform(0.2, 0.9), rng.uniform(0.25, 0.9)});
}

enum class PartLook { skin, shirt, pants, shoes };

PartLook part_look(const BodyModel& model, int part) {
    if (is_hand_part(model, part) || part == 12 || part == 15 || part == 18 || part == 19)
        return PartLook::skin;
    if (part == 7 || part == 8 || part == 10 || part == 11) return PartLook::shoes;
    if (part == 0 || part == 1 || part == 2 || part == 4 || part == 5) return PartLook::pants;
    return PartLook::shirt;
}

std::array<int, 4> centered_subrect(const std::array<int, 4>& r, double frac) {
    int w = std::max(1, static_cast<int>(r[2] * frac));
    int h = std::max(1, static_cast<int>(r[3] * frac));
    return {r[0] + (r[2] - w) / 2, r[1] + (r[3] - h) / 2, w, h};
}

}  // namespace

Texture generate_body_texture(Rng& rng, const BodyModel& model, int size, const std::string& id,
                              Gender gender) {
    Texture tex;
    tex.id = id;
    tex.gender = gender;
    tex.kind = TextureKind::body;
    tex.pixels = Image8(size, size, 30);

    Vec3 skin = sample_skin_tone(rng);
    Vec3 shirt = sample_cloth_color(rng);
    Vec3 shirt_band = sample_cloth_color(rng);
    Vec3 pants = sample_cloth_color(rng);
    Vec3 shoes = hsv_to_rgb({rng.uniform(0.0, 360.0), rng.uniform(0.0, 0.4), rng.uniform(0.1, 0.4)});
    double band_freq = rng.uniform() < 0.5 ? double(rng.uniform_int(1, 4)) : 0.0;
    Mottle mottle = Mottle::sample(rng, 0.05);

    for (int p = 0; p < model.part_count(); ++p) {
        auto r = pixel_rect(model.part_uv_rect[p], size, size);
        switch (part_look(model, p)) {
            case PartLook::skin: fill_rect(tex.pixels, r, skin, mottle, {}, 0.0); break;
            case PartLook::shirt: fill_rect(tex.pixels, r, shirt, mottle, shirt_band, band_freq); break;
            case PartLook::pants: fill_rect(tex.pixels, r, pants, mottle, {}, 0.0); break;
            case PartLook::shoes: fill_rect(tex.pixels, r, shoes, mottle, {}, 0.0); break;
        }
    }

    // Face region: the center of the head cell.
    tex.sample_region = centered_subrect(pixel_rect(model.part_uv_rect[15], size, size), 0.5);
    return tex;
}

Texture generate_hand_texture(Rng& rng, const BodyModel& model, int size, const std::string& id,
                              Gender gender) {
    Texture tex;
    tex.id = id;
    tex.gender = gender;
    tex.kind = TextureKind::hand;
    tex.pixels = Image8(size, size, 30);

    Vec3 skin = sample_skin_tone(rng);
    Mottle mottle = Mottle::sample(rng, 0.04);
    fill_rect(tex.pixels, {0, 0, size, size}, skin, mottle, {}, 0.0);

    // Outer-palm sampling region: center of the left-palm cell.
    tex.sample_region = centered_subrect(pixel_rect(model.part_uv_rect[20], size, size), 0.5);
    return tex;
}

Image8 generate_background(Rng& rng, int width, int height) {
    Image8 img(width, height);
    Vec3 top = sample_cloth_color(rng);
    Vec3 bottom = sample_cloth_color(rng);
    Mottle mottle = Mottle::sample(rng, 0.08);

    for (int y = 0; y < height; ++y) {
        double t = double(y) / std::max(1, height - 1);
        Vec3 base = top * (1.0 - t) + bottom * t;
        for (int x = 0; x < width; ++x) {
            double m = mottle.eval(double(x) / width, t);
            Vec3 c = {std::clamp(base.x * m, 0.0, 1.0), std::clamp(base.y * m, 0.0, 1.0),
                      std::clamp(base.z * m, 0.0, 1.0)};
            img.set(x, y, static_cast<uint8_t>(std::lround(c.x * 255.0)),
                    static_cast<uint8_t>(std::lround(c.y * 255.0)),
                    static_cast<uint8_t>(std::lround(c.z * 255.0)));
        }
    }

    // Furniture-ish rectangles with their own shading.
    int blobs = rng.uniform_int(3, 7);
    for (int i = 0; i < blobs; ++i) {
        int w = rng.uniform_int(width / 10, width / 3);
        int h = rng.uniform_int(height / 10, height / 2);
        int x0 = rng.uniform_int(0, std::max(0, width - w - 1));
        int y0 = rng.uniform_int(0, std::max(0, height - h - 1));
        Vec3 c = sample_cloth_color(rng);
        Mottle bm = Mottle::sample(rng, 0.05);
        fill_rect(img, {x0, y0, w, h}, c, bm, {}, 0.0);
    }
    return img;
}

}  // namespace mhof
