#pragma once

#include <array>
#include <set>
#include <utility>
#include <vector>

#include "mhof/vec.hpp"

namespace mhof {

struct Aabb {
    Vec3 min{1e30, 1e30, 1e30};
    Vec3 max{-1e30, -1e30, -1e30};

    void expand(const Vec3& p) {
        min = mhof::min(min, p);
        max = mhof::max(max, p);
    }
    void expand(const Aabb& o) {
        min = mhof::min(min, o.min);
        max = mhof::max(max, o.max);
    }
    // Closed-box overlap: touching boxes overlap.
    bool overlaps(const Aabb& o) const {
        return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y &&
               min.z <= o.max.z && o.min.z <= max.z;
    }
    bool contains(const Aabb& o) const {
        return min.x <= o.min.x && min.y <= o.min.y && min.z <= o.min.z && max.x >= o.max.x &&
               max.y >= o.max.y && max.z >= o.max.z;
    }
};

using Face = std::array<int, 3>;

// True iff the closed triangles share at least one point (separating-axis
// test). Degenerate triangles (area below 1e-12 m^2) never intersect.
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                         const Vec3& b1, const Vec3& b2);

// Binary AABB tree over triangles; median split on the longest centroid
// axis, at most 4 triangles per leaf. Topology is fixed at build time;
// refit() recomputes bounds for deformed vertices.
class Bvh {
public:
    struct Node {
        Aabb bound;
        int left = -1, right = -1;  // internal children
        int first = 0, count = 0;   // leaf triangle range in triangle_order
        bool is_leaf() const { return count > 0; }
    };

    static Bvh build(const std::vector<Vec3>& vertices, const std::vector<Face>& faces);

    void refit(const std::vector<Vec3>& vertices, const std::vector<Face>& faces);

    // Original face indices whose AABB overlaps the query box.
    std::vector<int> query(const Aabb& box) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<int>& triangle_order() const { return order_; }

    friend std::vector<std::pair<int, int>> mesh_pair_collision(
        const Bvh&, const std::vector<Vec3>&, const std::vector<Face>&, const Bvh&,
        const std::vector<Vec3>&, const std::vector<Face>&);
    friend std::vector<std::pair<int, int>> self_collision(const Bvh&, const std::vector<Vec3>&,
                                                           const std::vector<Face>&,
                                                           const std::vector<int>&,
                                                           const std::set<std::pair<int, int>>&);

private:
    std::vector<Node> nodes_;
    std::vector<int> order_;
};

// All intersecting cross-mesh triangle pairs (face_a, face_b). BVHs must
// be refit against the given vertices by the caller.
std::vector<std::pair<int, int>> mesh_pair_collision(const Bvh& bvh_a,
                                                     const std::vector<Vec3>& verts_a,
                                                     const std::vector<Face>& faces_a,
                                                     const Bvh& bvh_b,
                                                     const std::vector<Vec3>& verts_b,
                                                     const std::vector<Face>& faces_b);

// Intersecting same-mesh pairs (i < j), excluding pairs that share a
// vertex index and pairs whose part ids are exempt via part_adjacency.
std::vector<std::pair<int, int>> self_collision(const Bvh& bvh, const std::vector<Vec3>& verts,
                                                const std::vector<Face>& faces,
                                                const std::vector<int>& part_of_face,
                                                const std::set<std::pair<int, int>>& part_adjacency);

// One actor's posed geometry over a whole subsequence.
struct ActorSubsequenceMesh {
    const std::vector<Face>* faces = nullptr;
    const std::vector<int>* part_of_face = nullptr;
    const std::set<std::pair<int, int>>* part_adjacency = nullptr;
    std::vector<std::vector<Vec3>> frame_vertices;  // [frame][vertex]
};

struct PlacementCheck {
    bool ok = true;                  // no inter-actor collision, nobody crosses the billboard
    int bad_frame = -1;              // first offending frame when !ok
    bool inter_actor = false;
    bool crossed_billboard = false;
    int self_collision_frames = 0;   // reported as a warning, never rejects
};

// Whole-subsequence placement validation: rejects inter-actor collisions
// on any frame and vertices crossing the billboard plane (z <=
// billboard_z in front of the camera at larger z).
PlacementCheck validate_placement(const std::vector<const ActorSubsequenceMesh*>& actors,
                                  double billboard_z, bool check_self = false);

}  // namespace mhof
