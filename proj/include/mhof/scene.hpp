#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mhof/body_model.hpp"
#include "mhof/collision.hpp"
#include "mhof/image.hpp"
#include "mhof/mode.hpp"
#include "mhof/motion.hpp"
#include "mhof/rng.hpp"
#include "mhof/texture_lab.hpp"

namespace mhof {

// Pinhole camera. The base orientation looks down the world -z axis with
// image x along world +x and image y pointing down (world -y); `euler`
// holds the camera-noise rotation (intrinsic XYZ, radians) applied in the
// camera frame.
struct Camera {
    int width = 640, height = 640;
    double focal = 800.0;
    double cx = 320.0, cy = 320.0;
    Vec3 eye{0.0, 1.3, 0.0};
    Vec3 euler{0.0, 0.0, 0.0};

    Mat3 world_to_cam() const {
        Mat3 base;
        base.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};
        return Mat3::rotation_x(euler.x) * Mat3::rotation_y(euler.y) * Mat3::rotation_z(euler.z) *
               base;
    }

    // Projects a world point; false when it lies at or behind the camera.
    bool project(const Vec3& p, Vec2* px, double* depth) const {
        Vec3 c = world_to_cam() * (p - eye);
        if (c.z < 1e-9) return false;
        if (px) *px = {focal * c.x / c.z + cx, focal * c.y / c.z + cy};
        if (depth) *depth = c.z;
        return true;
    }

    static Camera make(int width, int height, double focal, Vec3 eye) {
        Camera c;
        c.width = width;
        c.height = height;
        c.focal = focal;
        c.cx = width / 2.0;
        c.cy = height / 2.0;
        c.eye = eye;
        return c;
    }
};

// Second-order real spherical harmonics coefficients per RGB channel,
// basis order: Y00, Y1-1(y), Y10(z), Y11(x), Y2-2(xy), Y2-1(yz),
// Y20(3z^2-1), Y21(xz), Y22(x^2-y^2). Index 0 is the ambient term and
// index 1 the vertical direction.
struct ShLighting {
    std::array<std::array<double, 9>, 3> coeffs{};
};

constexpr int kShAmbient = 0;
constexpr int kShVertical = 1;

// Coefficients ~ U[-0.7, 0.7], except ambient ~ U[0.3, 0.7] and the
// vertical l=1 coefficient ~ U[-0.7, 0).
ShLighting sample_lighting(Rng& rng);

// Per-frame camera deltas; entry 0 is zero, entry t moves the camera
// from frame t-1 to frame t (cumulative random walk).
struct CameraNoise {
    std::vector<Vec3> dt;  // translation deltas, meters
    std::vector<Vec3> dr;  // Euler rotation deltas, radians (empty rows in mhof mode)
};

// With probability 0.3 returns a schedule: translation deltas
// N(0, (1 cm)^2) per axis; shof mode additionally rotates by
// N(0, (0.2 deg)^2) per Euler axis.
std::optional<CameraNoise> sample_camera_noise(Rng& rng, Mode mode, int n_frames);

Camera camera_at_frame(const Camera& base, const std::optional<CameraNoise>& noise, int frame);

// How to rebuild the asset pools for generation and replay.
struct AssetRef {
    std::string kind = "procedural";  // "procedural" or "dirs"
    uint64_t seed = 7;
    int n_body_textures = 12;
    int n_hand_textures = 8;
    int n_backgrounds = 8;
    int n_motions = 8;
    int n_hand_motions = 4;
    std::string texture_manifest;  // dirs mode: manifest JSON path
    std::string motion_dir;        // dirs mode: directory of motion JSON files
    std::array<double, 3> split_ratios{0.8, 0.1, 0.1};
};

struct ActorSpec {
    ShapeVector shape;
    std::string texture_id;
    std::string hand_texture_id;      // empty when unused (shof)
    double x = 0.0, z = 0.0, yaw = 0.0;  // ground placement
    std::vector<PoseFrame> frames;    // embedded motion window (hand-spliced in mhof)
    std::string motion_id;
    int motion_start = 0;
};

struct DegradeSpec {
    bool motion_blur = true;
    double gaussian_sigma = 0.0;  // 0 = no gaussian blur
};

// Everything needed to render one subsequence deterministically.
struct SceneSpec {
    Mode mode = Mode::mhof;
    uint64_t seed = 0;
    std::string split = "train";
    int n_frames = 10;
    double fps = 12.0;
    Camera camera;  // base camera of frame 0, before noise
    std::optional<CameraNoise> camera_noise;
    ShLighting lighting;
    std::string background_id;
    double billboard_depth = 12.0;
    DegradeSpec degrade;
    std::vector<ActorSpec> actors;
    int n_actors_sampled = 0;  // before placement-driven drops
    AssetRef assets;           // how to rebuild the pools for replay

    std::string to_json_string() const;
    static SceneSpec from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static SceneSpec load(const std::string& path);
};

struct BackgroundImage {
    std::string id;
    Image8 image;
};

struct AssetPools {
    AssetRef ref;  // provenance, copied into composed SceneSpecs
    BodyModel model;
    std::vector<MotionSequence> motions;
    std::vector<MotionSequence> hand_motions;
    std::vector<Texture> body_textures;
    std::vector<Texture> hand_textures;
    std::vector<BackgroundImage> backgrounds;
    // split index (0 train / 1 val / 2 test) per asset id
    std::array<std::vector<std::string>, 3> texture_split;
    std::array<std::vector<std::string>, 3> background_split;
    std::array<std::vector<std::string>, 3> motion_split;
    // cached cone-space means for hand matching
    std::vector<Vec3> hand_mean_cone;

    const Texture& body_texture_by_id(const std::string& id) const;
    const Texture& hand_texture_by_id(const std::string& id) const;
    const Image8& background_by_id(const std::string& id) const;
    const MotionSequence& motion_by_id(const std::string& id) const;
};

AssetPools build_asset_pools(const AssetRef& ref, Mode mode);

// Composition parameters; defaults follow the per-mode matrix
// (subsequence length 20/10, billboard 9/12 m, shape bound 3.0/2.7,
// actor count 1/[4,8]).
struct ComposeParams {
    Mode mode = Mode::mhof;
    int subsequence_length = 10;
    double billboard_depth = 12.0;
    double shape_bound = 2.7;
    int actor_min = 4, actor_max = 8;
    double gaussian_blur_prob = 0.3;
    double gaussian_blur_sigma = 1.0;
    double camera_noise_prob = 0.3;
    bool motion_blur = true;
    int image_width = 640, image_height = 640;
    double focal = 800.0;
    double fps = 12.0;
    double camera_height = 1.3;
    bool validate_placement = true;  // audits disable the collision pass

    static ComposeParams defaults(Mode mode);
};

// One deterministic SceneSpec: motion windows, shapes, textures,
// background, lighting, noise, degradation and actor placement.
SceneSpec compose_subsequence(Rng& rng, const AssetPools& assets, int split,
                              const ComposeParams& params);

// Posed world-space actor meshes for one frame of a scene.
struct PosedActor {
    std::vector<Vec3> vertices;
    std::vector<Vec3> joints;
};

PosedActor pose_actor_frame(const BodyModel& model, const ActorSpec& actor, int frame);

}  // namespace mhof
