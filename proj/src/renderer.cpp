#include "mhof/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mhof {

void sh_basis(const Vec3& n, double out[9]) {
    out[0] = 0.282095;
    out[1] = 0.488603 * n.y;
    out[2] = 0.488603 * n.z;
    out[3] = 0.488603 * n.x;
    out[4] = 1.092548 * n.x * n.y;
    out[5] = 1.092548 * n.y * n.z;
    out[6] = 0.315392 * (3.0 * n.z * n.z - 1.0);
    out[7] = 1.092548 * n.x * n.z;
    out[8] = 0.546274 * (n.x * n.x - n.y * n.y);
}

Vec3 shade_sh(const Vec3& normal, const Vec3& albedo, const ShLighting& light) {
    double basis[9];
    sh_basis(normal, basis);
    Vec3 color;
    for (int ch = 0; ch < 3; ++ch) {
        double irr = 0.0;
        for (int i = 0; i < 9; ++i) irr += light.coeffs[ch][i] * basis[i];
        irr = std::max(0.0, irr);
        color[ch] = std::clamp(albedo[ch] * irr, 0.0, 1.0);
    }
    return color;
}

namespace {

constexpr double kZNear = 0.05;

struct ScreenVert {
    Vec2 p;
    double z;  // camera-space depth
};

double edge_cross(const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// Tie pixels on an edge belong to the triangle whose (orientation
// corrected) edge points up, or exactly right (top-left convention in
// y-down screen coordinates).
bool edge_accepts_tie(const Vec2& a, const Vec2& b) {
    double dy = b.y - a.y;
    double dx = b.x - a.x;
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace

GBuffer rasterize(const FrameGeometry& frame) {
    const Camera& cam = frame.camera;
    if (cam.width < 1 || cam.height < 1 || !(cam.focal > 0.0))
        throw std::invalid_argument("rasterize: degenerate camera");

    GBuffer gbuf(cam.width, cam.height);
    const Mat3 world_to_cam = cam.world_to_cam();

    for (size_t mi = 0; mi < frame.meshes.size(); ++mi) {
        const MeshInstance& mesh = frame.meshes[mi];
        const auto& verts = *mesh.vertices;

        // Project all vertices once per mesh.
        std::vector<ScreenVert> screen(verts.size());
        for (size_t v = 0; v < verts.size(); ++v) {
            Vec3 c = world_to_cam * (verts[v] - cam.eye);
            screen[v].z = c.z;
            if (c.z >= kZNear)
                screen[v].p = {cam.focal * c.x / c.z + cam.cx, cam.focal * c.y / c.z + cam.cy};
        }

        for (size_t fi = 0; fi < mesh.faces->size(); ++fi) {
            const Face& face = (*mesh.faces)[fi];
            // Conservative near-plane handling: desk scenes never bring
            // geometry near the camera, so partially-behind triangles
            // are skipped rather than clipped.
            if (screen[face[0]].z < kZNear || screen[face[1]].z < kZNear ||
                screen[face[2]].z < kZNear)
                continue;

            // Orientation-corrected vertex order (positive doubled area
            // in y-down screen space); idx maps raster slots back to the
            // original face corners.
            int idx[3] = {0, 1, 2};
            Vec2 p0 = screen[face[0]].p, p1 = screen[face[1]].p, p2 = screen[face[2]].p;
            double area2 = edge_cross(p0, p1, p2);
            if (area2 == 0.0) continue;
            if (area2 < 0.0) {
                std::swap(idx[1], idx[2]);
                std::swap(p1, p2);
                area2 = -area2;
            }

            double min_x = std::min({p0.x, p1.x, p2.x});
            double max_x = std::max({p0.x, p1.x, p2.x});
            double min_y = std::min({p0.y, p1.y, p2.y});
            double max_y = std::max({p0.y, p1.y, p2.y});
            int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
            int x1 = std::min(cam.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
            int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
            int y1 = std::min(cam.height - 1, static_cast<int>(std::floor(max_y - 0.5)));
            if (x0 > x1 || y0 > y1) continue;

            const double z0 = screen[face[idx[0]]].z, z1 = screen[face[idx[1]]].z,
                         z2 = screen[face[idx[2]]].z;
            const bool tie0 = edge_accepts_tie(p0, p1);
            const bool tie1 = edge_accepts_tie(p1, p2);
            const bool tie2 = edge_accepts_tie(p2, p0);

            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    Vec2 pc{x + 0.5, y + 0.5};
                    double e0 = edge_cross(p0, p1, pc);  // opposite raster vertex 2
                    double e1 = edge_cross(p1, p2, pc);  // opposite raster vertex 0
                    double e2 = edge_cross(p2, p0, pc);  // opposite raster vertex 1
                    bool inside = (e0 > 0.0 || (e0 == 0.0 && tie0)) &&
                                  (e1 > 0.0 || (e1 == 0.0 && tie1)) &&
                                  (e2 > 0.0 || (e2 == 0.0 && tie2));
                    if (!inside) continue;

                    double ls0 = e1 / area2, ls1 = e2 / area2, ls2 = e0 / area2;
                    double zinv = ls0 / z0 + ls1 / z1 + ls2 / z2;
                    double depth = 1.0 / zinv;
                    GBuffer::Pixel& px = gbuf.at(x, y);
                    if (px.mesh >= 0 && depth >= px.depth) continue;

                    // Perspective-correct barycentrics in raster slots,
                    // remapped to the original corner order.
                    double lp[3] = {(ls0 / z0) * depth, (ls1 / z1) * depth, (ls2 / z2) * depth};
                    double orig[3];
                    orig[idx[0]] = lp[0];
                    orig[idx[1]] = lp[1];
                    orig[idx[2]] = lp[2];
                    px.depth = static_cast<float>(depth);
                    px.mesh = static_cast<int32_t>(mi);
                    px.face = static_cast<int32_t>(fi);
                    px.b0 = static_cast<float>(orig[0]);
                    px.b1 = static_cast<float>(orig[1]);
                }
            }
        }
    }
    return gbuf;
}

namespace {

struct SurfacePoint {
    Vec3 position;
    Vec3 normal;  // zero if the mesh has no normals
    Vec2 uv;
};

SurfacePoint surface_point(const MeshInstance& mesh, int face_idx, double b0, double b1) {
    const Face& f = (*mesh.faces)[face_idx];
    double b2 = 1.0 - b0 - b1;
    SurfacePoint s;
    const auto& verts = *mesh.vertices;
    s.position = verts[f[0]] * b0 + verts[f[1]] * b1 + verts[f[2]] * b2;
    if (mesh.normals && !mesh.normals->empty()) {
        const auto& normals = *mesh.normals;
        s.normal = (normals[f[0]] * b0 + normals[f[1]] * b1 + normals[f[2]] * b2).normalized();
    }
    if (mesh.uv && !mesh.uv->empty()) {
        const auto& uv = *mesh.uv;
        s.uv = uv[f[0]] * b0 + uv[f[1]] * b1 + uv[f[2]] * b2;
    }
    return s;
}

Vec3 sample_texture(const Image8& tex, const Vec2& uv) {
    return sample_bilinear(tex, uv.x * (tex.width - 1), uv.y * (tex.height - 1));
}

}  // namespace

ImageF shade(const FrameGeometry& frame, const GBuffer& gbuf, const ShLighting& light) {
    ImageF img(gbuf.width, gbuf.height);
    for (int y = 0; y < gbuf.height; ++y) {
        for (int x = 0; x < gbuf.width; ++x) {
            const GBuffer::Pixel& px = gbuf.at(x, y);
            if (px.mesh < 0) continue;
            const MeshInstance& mesh = frame.meshes[px.mesh];
            SurfacePoint s = surface_point(mesh, px.face, px.b0, px.b1);
            Vec3 albedo = mesh.texture ? sample_texture(*mesh.texture, s.uv) : Vec3{0.7, 0.7, 0.7};
            Vec3 color = albedo;
            if (mesh.shaded) {
                Vec3 n = s.normal;
                if (n.dot(frame.camera.eye - s.position) < 0.0) n = -n;
                color = shade_sh(n, albedo, light);
            }
            float* out = img.at(x, y);
            out[0] = static_cast<float>(color.x);
            out[1] = static_cast<float>(color.y);
            out[2] = static_cast<float>(color.z);
        }
    }
    return img;
}

FlowField render_flow(const FrameGeometry& frame_t, const FrameGeometry& frame_t1,
                      const GBuffer& gbuf_t) {
    if (frame_t.meshes.size() != frame_t1.meshes.size())
        throw std::invalid_argument("render_flow: frame geometries do not match");

    FlowField flow(gbuf_t.width, gbuf_t.height);
    for (int y = 0; y < gbuf_t.height; ++y) {
        for (int x = 0; x < gbuf_t.width; ++x) {
            const GBuffer::Pixel& px = gbuf_t.at(x, y);
            if (px.mesh < 0) continue;
            const MeshInstance& m0 = frame_t.meshes[px.mesh];
            const MeshInstance& m1 = frame_t1.meshes[px.mesh];
            const Face& f = (*m0.faces)[px.face];
            double b0 = px.b0, b1 = px.b1, b2 = 1.0 - b0 - b1;

            const auto& v0 = *m0.vertices;
            const auto& v1 = *m1.vertices;
            Vec3 p_t = v0[f[0]] * b0 + v0[f[1]] * b1 + v0[f[2]] * b2;
            Vec3 p_t1 = v1[f[0]] * b0 + v1[f[1]] * b1 + v1[f[2]] * b2;

            Vec2 proj_t, proj_t1;
            if (!frame_t.camera.project(p_t, &proj_t, nullptr)) continue;
            if (!frame_t1.camera.project(p_t1, &proj_t1, nullptr)) continue;
            flow.u(x, y) = static_cast<float>(proj_t1.x - proj_t.x);
            flow.v(x, y) = static_cast<float>(proj_t1.y - proj_t.y);
        }
    }
    return flow;
}

SegMask render_segmentation(const FrameGeometry& frame, const GBuffer& gbuf) {
    SegMask mask(gbuf.width, gbuf.height);
    for (int y = 0; y < gbuf.height; ++y) {
        for (int x = 0; x < gbuf.width; ++x) {
            const GBuffer::Pixel& px = gbuf.at(x, y);
            if (px.mesh < 0) continue;
            const MeshInstance& mesh = frame.meshes[px.mesh];
            if (mesh.actor_id == 0) continue;  // background stays (0, 0)
            size_t i = mask.idx(x, y);
            mask.actor[i] = static_cast<uint8_t>(mesh.actor_id);
            int part = mesh.part_of_face ? (*mesh.part_of_face)[px.face] : 0;
            mask.part[i] = static_cast<uint8_t>(part + 1);
        }
    }
    return mask;
}

namespace {

Vec3 sample_imagef(const ImageF& img, double x, double y) { return sample_bilinear(img, x, y); }

}  // namespace

ImageF apply_motion_blur(const ImageF& rgb_t, const ImageF& rgb_t1, const FlowField& flow) {
    if (rgb_t.width != rgb_t1.width || rgb_t.height != rgb_t1.height ||
        rgb_t.width != flow.width || rgb_t.height != flow.height)
        throw std::invalid_argument("apply_motion_blur: size mismatch");

    constexpr int kSteps = 64;
    ImageF out(rgb_t.width, rgb_t.height);
    for (int y = 0; y < rgb_t.height; ++y) {
        for (int x = 0; x < rgb_t.width; ++x) {
            double fu = flow.u(x, y), fv = flow.v(x, y);
            Vec3 acc{0, 0, 0};
            for (int s = 0; s < kSteps; ++s) {
                double alpha = double(s) / (kSteps - 1);
                double sx = x + alpha * fu;
                double sy = y + alpha * fv;
                Vec3 a = sample_imagef(rgb_t, sx, sy);
                Vec3 b = sample_imagef(rgb_t1, sx, sy);
                acc += a * (1.0 - alpha) + b * alpha;
            }
            acc = acc / double(kSteps);
            float* px = out.at(x, y);
            px[0] = static_cast<float>(acc.x);
            px[1] = static_cast<float>(acc.y);
            px[2] = static_cast<float>(acc.z);
        }
    }
    return out;
}

ImageF apply_gaussian_blur(const ImageF& rgb, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("apply_gaussian_blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = rgb.width, h = rgb.height;
    ImageF tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int i = -radius; i <= radius; ++i) {
                int xi = std::clamp(x + i, 0, w - 1);
                const float* p = rgb.at(xi, y);
                for (int c = 0; c < 3; ++c) acc[c] += kernel[i + radius] * p[c];
            }
            float* q = tmp.at(x, y);
            for (int c = 0; c < 3; ++c) q[c] = static_cast<float>(acc[c]);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int i = -radius; i <= radius; ++i) {
                int yi = std::clamp(y + i, 0, h - 1);
                const float* p = tmp.at(x, yi);
                for (int c = 0; c < 3; ++c) acc[c] += kernel[i + radius] * p[c];
            }
            float* q = out.at(x, y);
            for (int c = 0; c < 3; ++c) q[c] = static_cast<float>(acc[c]);
        }
    }
    return out;
}

std::vector<Vec3> vertex_normals(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
    std::vector<Vec3> normals(vertices.size(), Vec3{0, 0, 0});
    for (const Face& f : faces) {
        Vec3 n = (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
        normals[f[0]] += n;
        normals[f[1]] += n;
        normals[f[2]] += n;
    }
    for (Vec3& n : normals) n = n.normalized();
    return normals;
}

// ---------------------------------------------------------------------------
// Scene-level driver

PreparedScene::PreparedScene(const SceneSpec& spec, const AssetPools& assets) {
    for (const auto& actor : spec.actors) {
        Texture tex = assets.body_texture_by_id(actor.texture_id);
        if (!actor.hand_texture_id.empty()) {
            std::vector<Texture> one{assets.hand_texture_by_id(actor.hand_texture_id)};
            HandMatch match = match_hand_texture(tex, one);
            tex = apply_hand_texture(tex, match.shifted, assets.model);
        }
        actor_textures.push_back(std::move(tex.pixels));
    }
    background = assets.background_by_id(spec.background_id);

    // Billboard quad: fills the frame-0 frustum at the configured depth
    // with enough margin to stay full-frame under camera noise.
    const double z = -spec.billboard_depth;
    const double hw = 1.6 * spec.billboard_depth * (spec.camera.width / 2.0) / spec.camera.focal;
    const double hh = 1.6 * spec.billboard_depth * (spec.camera.height / 2.0) / spec.camera.focal;
    const double cy = spec.camera.eye.y;
    billboard_vertices = {{-hw, cy + hh, z}, {hw, cy + hh, z}, {hw, cy - hh, z}, {-hw, cy - hh, z}};
    billboard_uv = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    billboard_faces = {{0, 1, 2}, {0, 2, 3}};
}

void build_frame_meshes(const SceneSpec& spec, const AssetPools& assets,
                        const PreparedScene& prepared, int frame, FrameMeshes* out) {
    out->geometry.meshes.clear();
    out->geometry.camera = camera_at_frame(spec.camera, spec.camera_noise, frame);

    MeshInstance billboard;
    billboard.vertices = &prepared.billboard_vertices;
    billboard.faces = &prepared.billboard_faces;
    billboard.uv = &prepared.billboard_uv;
    billboard.texture = &prepared.background;
    billboard.actor_id = 0;
    billboard.shaded = false;
    out->geometry.meshes.push_back(billboard);

    out->actor_vertices.resize(spec.actors.size());
    out->actor_normals.resize(spec.actors.size());
    for (size_t i = 0; i < spec.actors.size(); ++i) {
        PosedActor posed = pose_actor_frame(assets.model, spec.actors[i], frame);
        out->actor_vertices[i] = std::move(posed.vertices);
        out->actor_normals[i] = vertex_normals(out->actor_vertices[i], assets.model.faces);

        MeshInstance mesh;
        mesh.vertices = &out->actor_vertices[i];
        mesh.normals = &out->actor_normals[i];
        mesh.faces = &assets.model.faces;
        mesh.uv = &assets.model.uv_coords;
        mesh.part_of_face = &assets.model.part_of_face;
        mesh.texture = &prepared.actor_textures[i];
        mesh.actor_id = static_cast<int>(i) + 1;
        mesh.shaded = true;
        out->geometry.meshes.push_back(mesh);
    }
}

RenderedSubsequence render_subsequence(const SceneSpec& spec, const AssetPools& assets) {
    PreparedScene prepared(spec, assets);
    const int n = spec.n_frames;

    RenderedSubsequence out;
    out.rgb.resize(n);
    out.seg.resize(n);
    out.flow.resize(n - 1);

    // Stream two consecutive frames; flow and motion blur need both.
    FrameMeshes frames[2];
    std::vector<ImageF> raw(n);
    std::vector<GBuffer> gbufs(2);

    build_frame_meshes(spec, assets, prepared, 0, &frames[0]);
    gbufs[0] = rasterize(frames[0].geometry);
    raw[0] = shade(frames[0].geometry, gbufs[0], spec.lighting);
    out.seg[0] = render_segmentation(frames[0].geometry, gbufs[0]);

    for (int t = 1; t < n; ++t) {
        FrameMeshes& cur = frames[t % 2];
        FrameMeshes& prev = frames[(t - 1) % 2];
        build_frame_meshes(spec, assets, prepared, t, &cur);
        gbufs[t % 2] = rasterize(cur.geometry);
        raw[t] = shade(cur.geometry, gbufs[t % 2], spec.lighting);
        out.seg[t] = render_segmentation(cur.geometry, gbufs[t % 2]);
        out.flow[t - 1] = render_flow(prev.geometry, cur.geometry, gbufs[(t - 1) % 2]);
    }

    for (int t = 0; t < n; ++t) {
        ImageF img = raw[t];
        if (spec.degrade.motion_blur && t < n - 1)
            img = apply_motion_blur(raw[t], raw[t + 1], out.flow[t]);
        if (spec.degrade.gaussian_sigma > 0.0)
            img = apply_gaussian_blur(img, spec.degrade.gaussian_sigma);
        out.rgb[t] = to_image8(img);
    }
    return out;
}

}  // namespace mhof
