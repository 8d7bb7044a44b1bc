#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mhof/image.hpp"
#include "mhof/scene.hpp"
#include "mhof/vec.hpp"

namespace mhof {

// One renderable object for one frame, world space. The billboard is
// mesh 0 with actor_id 0 and shaded = false.
struct MeshInstance {
    const std::vector<Vec3>* vertices = nullptr;
    const std::vector<Vec3>* normals = nullptr;  // per-vertex; required when shaded
    const std::vector<Face>* faces = nullptr;
    const std::vector<Vec2>* uv = nullptr;
    const std::vector<int>* part_of_face = nullptr;  // nullptr => part 0
    const Image8* texture = nullptr;
    int actor_id = 0;
    bool shaded = true;
};

struct FrameGeometry {
    std::vector<MeshInstance> meshes;
    Camera camera;
};

// Visibility buffer: nearest surface per pixel with perspective-correct
// barycentrics of the hit point.
struct GBuffer {
    struct Pixel {
        float depth = 0.f;  // camera-space z; meaningful only when mesh >= 0
        int32_t mesh = -1;
        int32_t face = -1;
        float b0 = 0.f, b1 = 0.f;  // barycentrics of vertices 0 and 1
    };
    int width = 0, height = 0;
    std::vector<Pixel> pixels;

    GBuffer() = default;
    GBuffer(int w, int h) : width(w), height(h), pixels(size_t(w) * h) {}
    Pixel& at(int x, int y) { return pixels[size_t(y) * width + x]; }
    const Pixel& at(int x, int y) const { return pixels[size_t(y) * width + x]; }
};

// Forward flow in pixels, +x right, +y down.
struct FlowField {
    int width = 0, height = 0;
    std::vector<float> data;  // interleaved (u, v)

    FlowField() = default;
    FlowField(int w, int h) : width(w), height(h), data(size_t(2) * w * h, 0.f) {}
    float& u(int x, int y) { return data[2 * (size_t(y) * width + x)]; }
    float& v(int x, int y) { return data[2 * (size_t(y) * width + x) + 1]; }
    float u(int x, int y) const { return data[2 * (size_t(y) * width + x)]; }
    float v(int x, int y) const { return data[2 * (size_t(y) * width + x) + 1]; }
};

// Per-pixel (actor id, part id); 0 = background for both. Part ids are
// stored as model part index + 1 so that part != 0 iff actor != 0.
struct SegMask {
    int width = 0, height = 0;
    std::vector<uint8_t> actor;
    std::vector<uint8_t> part;

    SegMask() = default;
    SegMask(int w, int h) : width(w), height(h), actor(size_t(w) * h, 0), part(size_t(w) * h, 0) {}
    size_t idx(int x, int y) const { return size_t(y) * width + x; }
};

// Real second-order SH basis evaluated at a unit direction.
void sh_basis(const Vec3& n, double out[9]);

// irradiance = sum c_lm Y_lm(normal) per channel, clamped at 0;
// color = albedo * irradiance, clamped to [0, 1].
Vec3 shade_sh(const Vec3& normal, const Vec3& albedo, const ShLighting& light);

// Z-buffered triangle fill with the top-left fill convention, one sample
// per pixel center.
GBuffer rasterize(const FrameGeometry& frame);

// SH-shaded albedo pass over the GBuffer; unshaded meshes (billboard)
// sample their texture directly.
ImageF shade(const FrameGeometry& frame, const GBuffer& gbuf, const ShLighting& light);

// Vector pass: the motion of the surface point visible at t, evaluated
// on the same face at t+1 (geometric motion, defined under occlusion).
// frame_t1 must contain the same meshes posed for the next frame.
FlowField render_flow(const FrameGeometry& frame_t, const FrameGeometry& frame_t1,
                      const GBuffer& gbuf_t);

// Material pass.
SegMask render_segmentation(const FrameGeometry& frame, const GBuffer& gbuf);

// Average of 64 bilinear samples along each pixel's flow segment,
// cross-fading the two frames along the segment.
ImageF apply_motion_blur(const ImageF& rgb_t, const ImageF& rgb_t1, const FlowField& flow);

// Separable convolution, kernel radius ceil(3 sigma), edge clamped.
ImageF apply_gaussian_blur(const ImageF& rgb, double sigma);

// Per-vertex normals of a posed mesh (area-weighted face normals).
std::vector<Vec3> vertex_normals(const std::vector<Vec3>& vertices, const std::vector<Face>& faces);

// ---------------------------------------------------------------------------
// Scene-level driver

struct RenderedSubsequence {
    std::vector<Image8> rgb;     // n_frames
    std::vector<SegMask> seg;    // n_frames
    std::vector<FlowField> flow; // n_frames - 1
};

// Poses and renders all frames and passes of one SceneSpec.
RenderedSubsequence render_subsequence(const SceneSpec& spec, const AssetPools& assets);

// World-space geometry of one frame (exposed for tests and the debug CLI).
struct PreparedScene {
    std::vector<Image8> actor_textures;  // hand-region blitted where applicable
    Image8 background;
    std::vector<Vec3> billboard_vertices;
    std::vector<Vec2> billboard_uv;
    std::vector<Face> billboard_faces;

    PreparedScene(const SceneSpec& spec, const AssetPools& assets);
};

struct FrameMeshes {
    std::vector<std::vector<Vec3>> actor_vertices;
    std::vector<std::vector<Vec3>> actor_normals;
    FrameGeometry geometry;  // views into the data above and PreparedScene
};

void build_frame_meshes(const SceneSpec& spec, const AssetPools& assets,
                        const PreparedScene& prepared, int frame, FrameMeshes* out);

}  // namespace mhof
