#pragma once

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mhof/rng.hpp"
#include "mhof/vec.hpp"

namespace mhof {

enum class Gender { female, male };

std::string to_string(Gender g);
Gender gender_from_string(const std::string& s);

// Shape coefficients in per-coefficient standard-deviation units.
struct ShapeVector {
    std::vector<double> beta;
    Gender gender = Gender::female;
};

// One sample of the articulated state: global translation plus one
// axis-angle rotation per joint.
struct PoseFrame {
    Vec3 root_translation;
    std::vector<Vec3> joint_rotations;
};

// Parametric articulated human. Part ids coincide with joint ids: part j
// is the surface region rigidly attached to joint j.
struct BodyModel {
    std::string name;
    std::vector<Vec3> template_vertices;
    std::vector<std::array<int, 3>> faces;
    // shape_basis[k][v] is the displacement of vertex v per unit of
    // shape coefficient k.
    std::vector<std::vector<Vec3>> shape_basis;
    // Sparse per-joint weights over vertices; joint = weighted vertex sum.
    std::vector<std::vector<std::pair<int, double>>> joint_regressor;
    std::vector<int> parent;  // -1 for the root
    std::vector<std::string> joint_names;
    // Sparse per-vertex weights over joints; each row sums to 1.
    std::vector<std::vector<std::pair<int, double>>> skin_weights;
    std::vector<Vec2> uv_coords;
    std::vector<std::string> part_names;
    std::vector<int> part_of_face;
    // Unordered part-id pairs exempt from self-collision checks.
    std::set<std::pair<int, int>> part_adjacency;
    // Joint indices holding finger articulation; empty for the body-only
    // variant.
    std::vector<int> finger_joints;
    // Normalized UV-atlas rectangle {x, y, w, h} per part; used by the
    // procedural texture generator and hand-region blits.
    std::vector<std::array<double, 4>> part_uv_rect;

    int joint_count() const { return static_cast<int>(parent.size()); }
    int shape_dim() const { return static_cast<int>(shape_basis.size()); }
    int part_count() const { return static_cast<int>(part_names.size()); }
    bool has_fingers() const { return !finger_joints.empty(); }

    bool adjacent_parts(int a, int b) const {
        if (a > b) std::swap(a, b);
        return part_adjacency.count({a, b}) > 0;
    }

    // Checks the structural invariants (weight rows, tree shape, index
    // ranges); throws std::invalid_argument on violation.
    void validate() const;
};

// Per-gender Gaussian statistics of the shape coefficients.
struct GenderStats {
    Gender gender = Gender::female;
    std::vector<double> mean;    // per coefficient
    std::vector<double> stddev;  // per coefficient

    static GenderStats standard(Gender g, int dim);
};

// template + shape_basis . beta
std::vector<Vec3> shape_mesh(const BodyModel& model, const ShapeVector& shape);

// joint j = sum_v regressor[j][v] * vertex[v]
std::vector<Vec3> joint_locations(const BodyModel& model, const std::vector<Vec3>& shaped_vertices);

struct PosedMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> joints;               // posed joint positions (world)
    std::vector<Transform> joint_transforms;  // world transform per joint
};

// Forward kinematics (axis-angle exponential map, pivot at the
// shape-dependent joint) followed by linear blend skinning and the root
// translation.
PosedMesh pose_mesh(const BodyModel& model, const ShapeVector& shape, const PoseFrame& pose);

// Draws each coefficient from the gender Gaussian, rejection-sampling
// until it falls within +-bound standard deviations.
ShapeVector sample_shape(Rng& rng, const GenderStats& stats, double bound);

// Model file I/O (JSON, schema "mhof-model/1").
void save_model(const BodyModel& model, const std::string& path);
BodyModel load_model(const std::string& path);

}  // namespace mhof
