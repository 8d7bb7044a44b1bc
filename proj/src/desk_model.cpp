#include "mhof/desk_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mhof {

namespace {

struct JointDef {
    const char* name;
    int parent;
    Vec3 pos;
};

// Body skeleton, T-pose, meters, y up, facing +z. Left is +x.
const JointDef kBodyJoints[24] = {
    {"pelvis", -1, {0.00, 0.950, 0.00}},
    {"hip_l", 0, {0.09, 0.910, 0.00}},
    {"hip_r", 0, {-0.09, 0.910, 0.00}},
    {"spine1", 0, {0.00, 1.020, 0.00}},
    {"knee_l", 1, {0.10, 0.520, 0.00}},
    {"knee_r", 2, {-0.10, 0.520, 0.00}},
    {"spine2", 3, {0.00, 1.140, 0.00}},
    {"ankle_l", 4, {0.11, 0.090, 0.00}},
    {"ankle_r", 5, {-0.11, 0.090, 0.00}},
    {"spine3", 6, {0.00, 1.260, 0.00}},
    {"foot_l", 7, {0.11, 0.030, 0.11}},
    {"foot_r", 8, {-0.11, 0.030, 0.11}},
    {"neck", 9, {0.00, 1.400, 0.00}},
    {"collar_l", 9, {0.10, 1.385, 0.00}},
    {"collar_r", 9, {-0.10, 1.385, 0.00}},
    {"head", 12, {0.00, 1.470, 0.00}},
    {"shoulder_l", 13, {0.18, 1.400, 0.00}},
    {"shoulder_r", 14, {-0.18, 1.400, 0.00}},
    {"elbow_l", 16, {0.44, 1.400, 0.00}},
    {"elbow_r", 17, {-0.44, 1.400, 0.00}},
    {"wrist_l", 18, {0.68, 1.400, 0.00}},
    {"wrist_r", 19, {-0.68, 1.400, 0.00}},
    {"hand_l", 20, {0.76, 1.400, 0.00}},
    {"hand_r", 21, {-0.76, 1.400, 0.00}},
};

struct TubeSpec {
    int part = -1;  // = joint id
    Vec3 a, b;
    double ra = 0.05, rb = 0.05;
    Vec3 ellipse{1, 1, 1};  // world-aligned cross-section scale
    int blend_parent = -1;
    int blend_child = -1;
    double t_joint = 0.0;  // joint-regressor ring position along a..b
    double overlap = 0.0;  // extension beyond 'a' toward the parent part
    int rings = 12;
    int rows = 6;
};

struct Builder {
    BodyModel model;
    std::vector<std::vector<int>> joint_ring;  // regressor vertices per joint

    void add_tube(const TubeSpec& s) {
        const Vec3 axis = s.b - s.a;
        const double len = axis.norm();
        const Vec3 w = axis / len;
        const Vec3 ref = std::abs(w.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
        const Vec3 u = ref.cross(w).normalized();
        const Vec3 v = w.cross(u);

        // Axial stations: optional overlap row below t=0, the regular
        // rows, and a ring exactly at the joint position.
        std::vector<double> ts;
        if (s.overlap > 0.0) ts.push_back(-s.overlap / len);
        for (int i = 0; i <= s.rows; ++i) ts.push_back(double(i) / s.rows);
        ts.push_back(s.t_joint);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-9; }),
                 ts.end());

        const auto& rect = model.part_uv_rect[s.part];
        auto uv_at = [&](double uraw, double vraw) {
            return Vec2{rect[0] + uraw * rect[2], rect[1] + vraw * rect[3]};
        };

        auto weights_at = [&](double t) {
            std::vector<std::pair<int, double>> row;
            double tc = std::clamp(t, 0.0, 1.0);
            if (s.blend_parent >= 0 && tc < 0.18) {
                double wp = 0.5 * (1.0 - tc / 0.18);
                row = {{s.part, 1.0 - wp}, {s.blend_parent, wp}};
            } else if (s.blend_child >= 0 && tc > 0.82) {
                double wc = 0.5 * (tc - 0.82) / 0.18;
                row = {{s.part, 1.0 - wc}, {s.blend_child, wc}};
            } else {
                row = {{s.part, 1.0}};
            }
            return row;
        };

        std::vector<std::vector<int>> ring_ids(ts.size());
        for (size_t i = 0; i < ts.size(); ++i) {
            double t = ts[i];
            double tc = std::clamp(t, 0.0, 1.0);
            Vec3 center = s.a + axis * t;
            double radius = s.ra + (s.rb - s.ra) * tc;
            for (int k = 0; k < s.rings; ++k) {
                double phi = 2.0 * M_PI * k / s.rings;
                Vec3 radial = u * std::cos(phi) + v * std::sin(phi);
                Vec3 off{radial.x * s.ellipse.x, radial.y * s.ellipse.y, radial.z * s.ellipse.z};
                model.template_vertices.push_back(center + off * radius);
                double uraw = 1.0 - std::abs(2.0 * double(k) / s.rings - 1.0);
                model.uv_coords.push_back(uv_at(uraw, tc));
                model.skin_weights.push_back(weights_at(t));
                ring_ids[i].push_back(static_cast<int>(model.template_vertices.size()) - 1);
            }
            if (std::abs(t - s.t_joint) < 1e-9) joint_ring[s.part] = ring_ids[i];
        }

        // Side quads.
        for (size_t i = 0; i + 1 < ts.size(); ++i) {
            for (int k = 0; k < s.rings; ++k) {
                int k1 = (k + 1) % s.rings;
                int a0 = ring_ids[i][k], a1 = ring_ids[i][k1];
                int b0 = ring_ids[i + 1][k], b1 = ring_ids[i + 1][k1];
                add_face(a0, a1, b0, s.part);
                add_face(a1, b1, b0, s.part);
            }
        }

        // Flat end caps.
        auto add_cap = [&](size_t row, double t, bool flip) {
            Vec3 center = s.a + axis * t;
            model.template_vertices.push_back(center);
            model.uv_coords.push_back(uv_at(0.5, std::clamp(t, 0.0, 1.0)));
            model.skin_weights.push_back(weights_at(t));
            int c = static_cast<int>(model.template_vertices.size()) - 1;
            for (int k = 0; k < s.rings; ++k) {
                int k1 = (k + 1) % s.rings;
                if (flip)
                    add_face(c, ring_ids[row][k1], ring_ids[row][k], s.part);
                else
                    add_face(c, ring_ids[row][k], ring_ids[row][k1], s.part);
            }
        };
        add_cap(0, ts.front(), true);
        add_cap(ts.size() - 1, ts.back(), false);
    }

    void add_face(int i0, int i1, int i2, int part) {
        model.faces.push_back({i0, i1, i2});
        model.part_of_face.push_back(part);
    }
};

double bump(double y, double a, double b) {
    if (y <= a || y >= b) return 0.0;
    return 0.5 * (1.0 - std::cos(2.0 * M_PI * (y - a) / (b - a)));
}

double smoothstep(double a, double b, double y) {
    double t = std::clamp((y - a) / (b - a), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double sat(double v, double lim) { return std::clamp(v, -lim, lim); }

// Hand-authored displacement fields: height, girth, leg length, arm
// length, head size, shoulder width, belly, hip width, chest depth,
// overall scale.
Vec3 shape_displacement(int k, const Vec3& p) {
    double sx = p.x >= 0.0 ? 1.0 : -1.0;
    switch (k) {
        case 0: return {0.0, 0.06 * (p.y - 0.95), 0.0};
        case 1: {
            double g = bump(p.y, 0.85, 1.45);
            return {0.06 * g * sat(p.x, 0.16), 0.0, 0.08 * g * sat(p.z, 0.14)};
        }
        case 2:
            return p.y < 0.95 ? Vec3{0.0, -0.06 * (0.95 - p.y) / 0.95, 0.0} : Vec3{0, 0, 0};
        case 3: {
            if (std::abs(p.x) <= 0.20 || p.y <= 1.15) return {0, 0, 0};
            double s = std::clamp((std::abs(p.x) - 0.20) / 0.5, 0.0, 1.0);
            return {sx * 0.05 * s, 0.0, 0.0};
        }
        case 4: {
            double h = smoothstep(1.42, 1.50, p.y);
            return (p - Vec3{0.0, 1.56, 0.0}) * (0.12 * h);
        }
        case 5: {
            double s = bump(p.y, 1.30, 1.47) * std::clamp((std::abs(p.x) - 0.05) / 0.10, 0.0, 1.0);
            return {sx * 0.04 * s, 0.0, 0.0};
        }
        case 6: {
            double b = bump(p.y, 0.92, 1.25) * std::clamp(p.z / 0.12, 0.0, 1.0);
            return {0.0, 0.0, 0.05 * b};
        }
        case 7: {
            double b = bump(p.y, 0.82, 1.02) * std::min(std::abs(p.x), 0.10) / 0.10;
            return {sx * 0.04 * b, 0.0, 0.0};
        }
        case 8: {
            double b = bump(p.y, 1.20, 1.42);
            return {0.0, 0.0, 0.04 * b * sat(p.z, 0.13) / 0.13};
        }
        case 9: return (p - Vec3{0.0, 0.95, 0.0}) * 0.04;
        default: return {0, 0, 0};
    }
}

const char* kFingerNames[5] = {"thumb", "index", "middle", "ring", "pinky"};

}  // namespace

BodyModel build_desk_model(const DeskModelOptions& opts) {
    Builder b;
    BodyModel& m = b.model;
    m.name = opts.with_fingers ? "desk-humanoid-mhof" : "desk-humanoid-shof";

    // Joint table.
    for (const auto& j : kBodyJoints) {
        m.joint_names.push_back(j.name);
        m.parent.push_back(j.parent);
    }
    std::vector<Vec3> jpos(24);
    for (int j = 0; j < 24; ++j) jpos[j] = kBodyJoints[j].pos;

    struct Finger {
        int root_joint;  // first of the 3 chain joints
        Vec3 base;
        double scale;
        int hand;  // 22 or 23
    };
    std::vector<Finger> fingers;
    if (opts.with_fingers) {
        const double zoff[5] = {0.036, 0.018, 0.0, -0.018, -0.036};
        const double fscale[5] = {0.78, 1.0, 1.06, 0.96, 0.78};
        for (int side = 0; side < 2; ++side) {
            double sx = side == 0 ? 1.0 : -1.0;
            int hand = side == 0 ? kJointHandL : kJointHandR;
            for (int f = 0; f < 5; ++f) {
                Finger fing;
                fing.root_joint = static_cast<int>(m.parent.size());
                fing.base = {sx * 0.80, 1.40, zoff[f]};
                fing.scale = fscale[f];
                fing.hand = hand;
                fingers.push_back(fing);
                const double seglen[3] = {0.030 * fing.scale, 0.024 * fing.scale, 0.020 * fing.scale};
                Vec3 p = fing.base;
                int parent = hand;
                for (int seg = 0; seg < 3; ++seg) {
                    std::string name = std::string(kFingerNames[f]) + (side == 0 ? "_l_" : "_r_") +
                                       std::to_string(seg + 1);
                    m.joint_names.push_back(name);
                    m.parent.push_back(parent);
                    parent = static_cast<int>(m.parent.size()) - 1;
                    m.finger_joints.push_back(parent);
                    jpos.push_back(p);
                    p += Vec3{sx * seglen[seg], 0.0, 0.0};
                }
            }
        }
    }

    const int njoints = static_cast<int>(m.parent.size());
    m.part_names = m.joint_names;
    b.joint_ring.resize(njoints);

    // UV atlas: one grid cell per part.
    const int grid = static_cast<int>(std::ceil(std::sqrt(double(njoints))));
    m.part_uv_rect.resize(njoints);
    for (int p = 0; p < njoints; ++p) {
        double cell = 1.0 / grid;
        double x0 = (p % grid) * cell, y0 = (p / grid) * cell;
        m.part_uv_rect[p] = {x0 + 0.06 * cell, y0 + 0.06 * cell, 0.88 * cell, 0.88 * cell};
    }

    const int R = opts.body_rings, W = opts.body_rows;
    auto J = [&](int j) { return jpos[j]; };
    std::vector<TubeSpec> tubes;
    auto tube = [&](int part, Vec3 a, Vec3 bpt, double ra, double rb, Vec3 ell, int bp, int bc,
                    double tj, double ov) {
        tubes.push_back({part, a, bpt, ra, rb, ell, bp, bc, tj, ov, R, W});
    };

    // Torso column.
    tube(0, {0, 0.88, 0}, {0, 1.02, 0}, 0.140, 0.130, {1, 1, 0.72}, -1, 3, 0.5, 0.0);
    tube(3, {0, 1.02, 0}, {0, 1.14, 0}, 0.125, 0.120, {1, 1, 0.74}, 0, 6, 0.0, 0.015);
    tube(6, {0, 1.14, 0}, {0, 1.26, 0}, 0.120, 0.125, {1, 1, 0.76}, 3, 9, 0.0, 0.015);
    tube(9, {0, 1.26, 0}, {0, 1.40, 0}, 0.125, 0.120, {1, 1, 0.78}, 6, 12, 0.0, 0.015);
    tube(12, {0, 1.40, 0}, {0, 1.47, 0}, 0.045, 0.048, {1, 1, 1}, 9, 15, 0.0, 0.015);
    tube(15, {0, 1.47, 0}, {0, 1.655, 0}, 0.070, 0.058, {0.82, 1, 0.88}, 12, -1, 0.0, 0.012);

    // Legs and feet.
    for (int side = 0; side < 2; ++side) {
        int hip = 1 + side, knee = 4 + side, ankle = 7 + side, foot = 10 + side;
        double sx = side == 0 ? 1.0 : -1.0;
        tube(hip, J(hip), J(knee), 0.075, 0.055, {1, 1, 1}, 0, knee, 0.0, 0.015);
        tube(knee, J(knee), J(ankle), 0.052, 0.034, {1, 1, 1}, hip, ankle, 0.0, 0.015);
        tube(ankle, J(ankle), J(foot), 0.038, 0.032, {0.85, 1, 1}, knee, foot, 0.0, 0.010);
        tube(foot, J(foot), {sx * 0.11, 0.025, 0.185}, 0.032, 0.026, {1, 0.62, 1}, ankle, -1, 0.0,
             0.010);
    }

    // Shoulder girdle, arms, hands.
    for (int side = 0; side < 2; ++side) {
        int collar = 13 + side, sh = 16 + side, elbow = 18 + side, wrist = 20 + side,
            hand = 22 + side;
        double sx = side == 0 ? 1.0 : -1.0;
        tube(collar, J(collar), J(sh), 0.038, 0.040, {1, 1, 1}, 9, sh, 0.0, 0.010);
        tube(sh, J(sh), J(elbow), 0.042, 0.036, {1, 1, 1}, collar, elbow, 0.0, 0.012);
        tube(elbow, J(elbow), J(wrist), 0.034, 0.028, {1, 1, 1}, sh, wrist, 0.0, 0.012);
        tube(wrist, J(wrist), J(hand), 0.032, 0.030, {1, 1, 0.68}, elbow, hand, 0.0, 0.010);
        double hand_end = opts.with_fingers ? 0.80 : 0.88;
        double hand_rb = opts.with_fingers ? 0.028 : 0.026;
        tube(hand, J(hand), {sx * hand_end, 1.40, 0}, 0.030, hand_rb, {1, 1, 0.62}, wrist, -1, 0.0,
             0.008);
    }

    // Finger chains.
    const double fr[3] = {0.0080, 0.0075, 0.0070};
    const double fr2[3] = {0.0075, 0.0070, 0.0060};
    for (const auto& f : fingers) {
        for (int seg = 0; seg < 3; ++seg) {
            int joint = f.root_joint + seg;
            Vec3 a = jpos[joint];
            Vec3 bpt = seg < 2 ? jpos[joint + 1]
                               : jpos[joint] + Vec3{(f.base.x >= 0 ? 1.0 : -1.0) * 0.020 * f.scale,
                                                    0.0, 0.0};
            TubeSpec s;
            s.part = joint;
            s.a = a;
            s.b = bpt;
            s.ra = fr[seg];
            s.rb = fr2[seg];
            s.blend_parent = m.parent[joint];
            s.blend_child = seg < 2 ? joint + 1 : -1;
            s.overlap = 0.004;
            s.rings = opts.finger_rings;
            s.rows = opts.finger_rows;
            tubes.push_back(s);
        }
    }

    for (const auto& t : tubes) b.add_tube(t);

    // Joint regressor: uniform weights over the ring authored at each
    // joint position.
    m.joint_regressor.resize(njoints);
    for (int j = 0; j < njoints; ++j) {
        const auto& ring = b.joint_ring[j];
        double w = 1.0 / double(ring.size());
        for (int v : ring) m.joint_regressor[j].emplace_back(v, w);
    }

    // Shape basis sampled from the displacement fields.
    m.shape_basis.resize(opts.shape_dim);
    for (int k = 0; k < opts.shape_dim; ++k) {
        m.shape_basis[k].resize(m.template_vertices.size());
        for (size_t v = 0; v < m.template_vertices.size(); ++v)
            m.shape_basis[k][v] = shape_displacement(k, m.template_vertices[v]);
    }

    // Self-collision exemptions: parent-child pairs touch by
    // construction; the remaining entries are the classic
    // frequently-in-contact pairs plus the finger clusters.
    auto add_adj = [&](int a, int c) {
        if (a > c) std::swap(a, c);
        m.part_adjacency.insert({a, c});
    };
    for (int j = 0; j < njoints; ++j)
        if (m.parent[j] >= 0) add_adj(j, m.parent[j]);
    add_adj(1, 2);    // thighs
    add_adj(13, 14);  // clavicles
    add_adj(9, 16);
    add_adj(9, 17);  // torso vs upper arms
    add_adj(12, 13);
    add_adj(12, 14);  // neck vs clavicles
    if (opts.with_fingers) {
        for (int side = 0; side < 2; ++side) {
            std::vector<int> cluster{22 + side};
            for (int f = 0; f < 5; ++f)
                for (int seg = 0; seg < 3; ++seg) cluster.push_back(24 + side * 15 + f * 3 + seg);
            for (size_t i = 0; i < cluster.size(); ++i)
                for (size_t k = i + 1; k < cluster.size(); ++k) add_adj(cluster[i], cluster[k]);
        }
    }

    m.validate();
    return m;
}

}  // namespace mhof
