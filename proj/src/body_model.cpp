#include "mhof/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mhof/error.hpp"

namespace mhof {

using nlohmann::json;

std::string to_string(Gender g) { return g == Gender::female ? "female" : "male"; }

Gender gender_from_string(const std::string& s) {
    if (s == "female") return Gender::female;
    if (s == "male") return Gender::male;
    throw std::invalid_argument("unknown gender: " + s);
}

void BodyModel::validate() const {
    const int nv = static_cast<int>(template_vertices.size());
    const int nj = joint_count();
    if (nv == 0 || faces.empty()) throw std::invalid_argument("model: empty mesh");
    if (static_cast<int>(joint_names.size()) != nj ||
        static_cast<int>(joint_regressor.size()) != nj)
        throw std::invalid_argument("model: joint table size mismatch");
    if (static_cast<int>(skin_weights.size()) != nv ||
        static_cast<int>(uv_coords.size()) != nv)
        throw std::invalid_argument("model: per-vertex table size mismatch");
    if (part_of_face.size() != faces.size())
        throw std::invalid_argument("model: part_of_face size mismatch");

    // Kinematic tree: exactly one root, every parent a valid lower index
    // (so parents are processed before children).
    int roots = 0;
    for (int j = 0; j < nj; ++j) {
        if (parent[j] < 0) {
            ++roots;
        } else if (parent[j] >= j) {
            throw std::invalid_argument("model: parent index must precede child");
        }
    }
    if (roots != 1) throw std::invalid_argument("model: expected exactly one root joint");

    for (const auto& face : faces)
        for (int idx : face)
            if (idx < 0 || idx >= nv) throw std::invalid_argument("model: face vertex out of range");
    for (int p : part_of_face)
        if (p < 0 || p >= part_count()) throw std::invalid_argument("model: face part out of range");

    for (const auto& row : skin_weights) {
        double sum = 0.0;
        for (auto [j, w] : row) {
            if (j < 0 || j >= nj) throw std::invalid_argument("model: skin weight joint out of range");
            if (w < 0.0) throw std::invalid_argument("model: negative skin weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("model: skin weight row does not sum to 1");
    }
    for (const auto& basis : shape_basis)
        if (static_cast<int>(basis.size()) != nv)
            throw std::invalid_argument("model: shape basis size mismatch");
    for (int fj : finger_joints)
        if (fj < 0 || fj >= nj) throw std::invalid_argument("model: finger joint out of range");
}

GenderStats GenderStats::standard(Gender g, int dim) {
    GenderStats s;
    s.gender = g;
    s.mean.assign(dim, 0.0);
    s.stddev.assign(dim, 1.0);
    return s;
}

std::vector<Vec3> shape_mesh(const BodyModel& model, const ShapeVector& shape) {
    if (static_cast<int>(shape.beta.size()) != model.shape_dim())
        throw std::invalid_argument("shape_mesh: beta dimension mismatch");
    std::vector<Vec3> verts = model.template_vertices;
    for (int k = 0; k < model.shape_dim(); ++k) {
        double b = shape.beta[k];
        if (b == 0.0) continue;
        const auto& basis = model.shape_basis[k];
        for (size_t v = 0; v < verts.size(); ++v) verts[v] += basis[v] * b;
    }
    return verts;
}

std::vector<Vec3> joint_locations(const BodyModel& model, const std::vector<Vec3>& shaped_vertices) {
    if (shaped_vertices.size() != model.template_vertices.size())
        throw std::invalid_argument("joint_locations: vertex count mismatch");
    std::vector<Vec3> joints(model.joint_count());
    for (int j = 0; j < model.joint_count(); ++j) {
        Vec3 p{0, 0, 0};
        for (auto [v, w] : model.joint_regressor[j]) p += shaped_vertices[v] * w;
        joints[j] = p;
    }
    return joints;
}

PosedMesh pose_mesh(const BodyModel& model, const ShapeVector& shape, const PoseFrame& pose) {
    const int nj = model.joint_count();
    if (static_cast<int>(pose.joint_rotations.size()) != nj)
        throw std::invalid_argument("pose_mesh: joint count mismatch");
    if (!pose.root_translation.finite())
        throw std::invalid_argument("pose_mesh: non-finite root translation");
    for (const Vec3& r : pose.joint_rotations)
        if (!r.finite()) throw std::invalid_argument("pose_mesh: non-finite rotation");

    std::vector<Vec3> rest = shape_mesh(model, shape);
    std::vector<Vec3> joints = joint_locations(model, rest);

    // World rotation and world joint position per joint; parents precede
    // children by the model invariant.
    std::vector<Mat3> rot(nj);
    std::vector<Vec3> pos(nj);
    for (int j = 0; j < nj; ++j) {
        Mat3 local = axis_angle_to_matrix(pose.joint_rotations[j]);
        int p = model.parent[j];
        if (p < 0) {
            rot[j] = local;
            pos[j] = joints[j];
        } else {
            rot[j] = rot[p] * local;
            pos[j] = rot[p] * (joints[j] - joints[p]) + pos[p];
        }
    }

    PosedMesh out;
    out.joint_transforms.resize(nj);
    out.joints.resize(nj);
    for (int j = 0; j < nj; ++j) {
        // G_j(v) = R_j * (v - joint_j) + pos_j + root_translation
        out.joint_transforms[j].rot = rot[j];
        out.joint_transforms[j].trans = pos[j] - rot[j] * joints[j] + pose.root_translation;
        out.joints[j] = pos[j] + pose.root_translation;
    }

    out.vertices.resize(rest.size());
    for (size_t v = 0; v < rest.size(); ++v) {
        Vec3 acc{0, 0, 0};
        for (auto [j, w] : model.skin_weights[v])
            acc += out.joint_transforms[j].apply(rest[v]) * w;
        out.vertices[v] = acc;
    }
    return out;
}

ShapeVector sample_shape(Rng& rng, const GenderStats& stats, double bound) {
    if (!(bound > 0.0)) throw std::invalid_argument("sample_shape: bound must be positive");
    ShapeVector s;
    s.gender = stats.gender;
    s.beta.resize(stats.mean.size());
    for (size_t k = 0; k < stats.mean.size(); ++k) {
        double z = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            z = rng.normal();
            if (std::abs(z) <= bound) { ok = true; break; }
        }
        if (!ok) throw std::runtime_error("sample_shape: rejection cap exceeded");
        s.beta[k] = stats.mean[k] + stats.stddev[k] * z;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Model file (JSON)

static constexpr const char* kModelSchema = "mhof-model/1";

static json vec3_list(const std::vector<Vec3>& v) {
    json arr = json::array();
    for (const Vec3& p : v) arr.push_back({p.x, p.y, p.z});
    return arr;
}

static std::vector<Vec3> read_vec3_list(const json& arr) {
    std::vector<Vec3> v;
    v.reserve(arr.size());
    for (const auto& e : arr) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>());
    return v;
}

static json sparse_rows(const std::vector<std::vector<std::pair<int, double>>>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        json r = json::array();
        for (auto [i, w] : row) r.push_back({i, w});
        arr.push_back(std::move(r));
    }
    return arr;
}

static std::vector<std::vector<std::pair<int, double>>> read_sparse_rows(const json& arr) {
    std::vector<std::vector<std::pair<int, double>>> rows;
    rows.reserve(arr.size());
    for (const auto& r : arr) {
        std::vector<std::pair<int, double>> row;
        row.reserve(r.size());
        for (const auto& e : r) row.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_model(const BodyModel& model, const std::string& path) {
    json j;
    j["schema"] = kModelSchema;
    j["name"] = model.name;
    j["vertices"] = vec3_list(model.template_vertices);
    json faces = json::array();
    for (const auto& f : model.faces) faces.push_back({f[0], f[1], f[2]});
    j["faces"] = std::move(faces);
    json basis = json::array();
    for (const auto& b : model.shape_basis) basis.push_back(vec3_list(b));
    j["shape_basis"] = std::move(basis);
    j["joint_regressor"] = sparse_rows(model.joint_regressor);
    j["parent"] = model.parent;
    j["joint_names"] = model.joint_names;
    j["skin_weights"] = sparse_rows(model.skin_weights);
    json uv = json::array();
    for (const Vec2& p : model.uv_coords) uv.push_back({p.x, p.y});
    j["uv"] = std::move(uv);
    j["part_names"] = model.part_names;
    j["part_of_face"] = model.part_of_face;
    json adj = json::array();
    for (auto [a, b] : model.part_adjacency) adj.push_back({a, b});
    j["part_adjacency"] = std::move(adj);
    j["finger_joints"] = model.finger_joints;
    json rects = json::array();
    for (const auto& r : model.part_uv_rect) rects.push_back({r[0], r[1], r[2], r[3]});
    j["part_uv_rect"] = std::move(rects);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << j.dump();
}

BodyModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("model file is not valid JSON: " + std::string(e.what()));
    }
    if (j.value("schema", "") != kModelSchema)
        throw FormatError("model file schema mismatch: expected " + std::string(kModelSchema) +
                          ", got " + j.value("schema", "<missing>"));

    BodyModel m;
    m.name = j.value("name", "");
    m.template_vertices = read_vec3_list(j.at("vertices"));
    for (const auto& f : j.at("faces"))
        m.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    for (const auto& b : j.at("shape_basis")) m.shape_basis.push_back(read_vec3_list(b));
    m.joint_regressor = read_sparse_rows(j.at("joint_regressor"));
    m.parent = j.at("parent").get<std::vector<int>>();
    m.joint_names = j.at("joint_names").get<std::vector<std::string>>();
    m.skin_weights = read_sparse_rows(j.at("skin_weights"));
    for (const auto& p : j.at("uv")) m.uv_coords.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    m.part_names = j.at("part_names").get<std::vector<std::string>>();
    m.part_of_face = j.at("part_of_face").get<std::vector<int>>();
    for (const auto& a : j.at("part_adjacency")) {
        int lo = a.at(0).get<int>(), hi = a.at(1).get<int>();
        if (lo > hi) std::swap(lo, hi);
        m.part_adjacency.insert({lo, hi});
    }
    m.finger_joints = j.at("finger_joints").get<std::vector<int>>();
    for (const auto& r : j.at("part_uv_rect"))
        m.part_uv_rect.push_back({r.at(0).get<double>(), r.at(1).get<double>(),
                                  r.at(2).get<double>(), r.at(3).get<double>()});
    m.validate();
    return m;
}

}  // namespace mhof
