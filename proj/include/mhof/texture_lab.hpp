#pragma once

#include <array>
#include <string>
#include <vector>

#include "mhof/body_model.hpp"
#include "mhof/image.hpp"
#include "mhof/rng.hpp"

namespace mhof {

enum class TextureKind { body, hand };

struct Texture {
    Image8 pixels;
    std::string id;
    Gender gender = Gender::female;
    TextureKind kind = TextureKind::body;
    std::array<int, 4> sample_region{0, 0, 0, 0};  // x, y, w, h (pixels)
};

// Standard hexcone conversion. Hue in degrees [0, 360), s and v in [0, 1].
// Inputs are clamped to [0, 1].
Vec3 rgb_to_hsv(const Vec3& rgb);
Vec3 hsv_to_rgb(const Vec3& hsv);

// Componentwise mean over the sample region; hue is the circular mean
// (vector mean of unit phasors).
Vec3 mean_hsv(const Texture& tex);

struct HandMatch {
    int index = -1;
    Texture shifted;
    bool clamped = false;  // any pixel hit the s/v clamp during the shift
};

// Nearest hand texture in (cos h * s, sin h * s, v) space, returned with
// every pixel shifted by the body-minus-hand mean HSV difference.
HandMatch match_hand_texture(const Texture& body, const std::vector<Texture>& hands);

// Copies the hand/finger atlas cells of `hand` into a copy of `body`.
Texture apply_hand_texture(const Texture& body, const Texture& hand, const BodyModel& model);

// Deterministic shuffle + contiguous partition by ratio (largest
// remainder; every non-zero split receives at least one id).
std::array<std::vector<std::string>, 3> split_assets(Rng& rng, const std::vector<std::string>& ids,
                                                     const std::array<double, 3>& ratios);

// Procedural stand-ins for scanned assets.
Texture generate_body_texture(Rng& rng, const BodyModel& model, int size, const std::string& id,
                              Gender gender);
Texture generate_hand_texture(Rng& rng, const BodyModel& model, int size, const std::string& id,
                              Gender gender);
Image8 generate_background(Rng& rng, int width, int height);

}  // namespace mhof
