#include "mhof/collision.hpp"

#include <algorithm>
#include <stdexcept>

namespace mhof {

namespace {

Aabb triangle_aabb(const Vec3& a, const Vec3& b, const Vec3& c) {
    Aabb box;
    box.expand(a);
    box.expand(b);
    box.expand(c);
    return box;
}

// Projects both triangles on an axis; true when the projections are
// strictly separated (touching projections do not separate: closed sets).
bool axis_separates(const Vec3& axis, const Vec3* a, const Vec3* b) {
    double sq = axis.squared_norm();
    if (sq < 1e-18) return false;  // degenerate axis carries no information
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (int i = 0; i < 3; ++i) {
        double pa = axis.dot(a[i]);
        amin = std::min(amin, pa);
        amax = std::max(amax, pa);
        double pb = axis.dot(b[i]);
        bmin = std::min(bmin, pb);
        bmax = std::max(bmax, pb);
    }
    return amax < bmin || bmax < amin;
}

}  // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                         const Vec3& b1, const Vec3& b2) {
    const Vec3 a[3] = {a0, a1, a2};
    const Vec3 b[3] = {b0, b1, b2};
    const Vec3 ea[3] = {a1 - a0, a2 - a1, a0 - a2};
    const Vec3 eb[3] = {b1 - b0, b2 - b1, b0 - b2};
    const Vec3 na = ea[0].cross(a2 - a0);
    const Vec3 nb = eb[0].cross(b2 - b0);

    // Degenerate (area <= 1e-12 m^2) triangles report no intersection.
    if (na.norm() < 2e-12 || nb.norm() < 2e-12) return false;

    if (axis_separates(na, a, b)) return false;
    if (axis_separates(nb, a, b)) return false;
    for (const Vec3& eai : ea)
        for (const Vec3& ebj : eb)
            if (axis_separates(eai.cross(ebj), a, b)) return false;
    // In-plane edge normals cover the coplanar case, where the edge-edge
    // cross products above collapse onto the shared normal.
    for (const Vec3& eai : ea)
        if (axis_separates(na.cross(eai), a, b)) return false;
    for (const Vec3& ebj : eb)
        if (axis_separates(nb.cross(ebj), a, b)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// BVH

Bvh Bvh::build(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
    if (faces.empty()) throw std::invalid_argument("Bvh::build: empty mesh");
    for (const Face& f : faces)
        for (int idx : f)
            if (idx < 0 || idx >= static_cast<int>(vertices.size()))
                throw std::invalid_argument("Bvh::build: face vertex out of range");

    Bvh bvh;
    bvh.order_.resize(faces.size());
    for (size_t i = 0; i < faces.size(); ++i) bvh.order_[i] = static_cast<int>(i);

    std::vector<Vec3> centroids(faces.size());
    for (size_t i = 0; i < faces.size(); ++i) {
        const Face& f = faces[i];
        centroids[i] = (vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0;
    }

    struct Range {
        int node, first, count;
    };
    bvh.nodes_.push_back({});
    std::vector<Range> stack{{0, 0, static_cast<int>(faces.size())}};
    while (!stack.empty()) {
        Range r = stack.back();
        stack.pop_back();

        Aabb bound;
        Aabb cbound;
        for (int i = r.first; i < r.first + r.count; ++i) {
            const Face& f = faces[bvh.order_[i]];
            bound.expand(triangle_aabb(vertices[f[0]], vertices[f[1]], vertices[f[2]]));
            cbound.expand(centroids[bvh.order_[i]]);
        }
        bvh.nodes_[r.node].bound = bound;

        if (r.count <= 4) {
            bvh.nodes_[r.node].first = r.first;
            bvh.nodes_[r.node].count = r.count;
            continue;
        }

        Vec3 extent = cbound.max - cbound.min;
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > extent[axis]) axis = 2;

        int mid = r.first + r.count / 2;
        std::nth_element(bvh.order_.begin() + r.first, bvh.order_.begin() + mid,
                         bvh.order_.begin() + r.first + r.count,
                         [&](int lhs, int rhs) { return centroids[lhs][axis] < centroids[rhs][axis]; });

        int left = static_cast<int>(bvh.nodes_.size());
        bvh.nodes_.push_back({});
        bvh.nodes_.push_back({});
        bvh.nodes_[r.node].left = left;
        bvh.nodes_[r.node].right = left + 1;
        stack.push_back({left, r.first, mid - r.first});
        stack.push_back({left + 1, mid, r.first + r.count - mid});
    }
    return bvh;
}

void Bvh::refit(const std::vector<Vec3>& vertices, const std::vector<Face>& faces) {
    // Children always have larger indices than their parent, so a reverse
    // sweep updates leaves before internal nodes.
    for (int n = static_cast<int>(nodes_.size()) - 1; n >= 0; --n) {
        Node& node = nodes_[n];
        Aabb bound;
        if (node.is_leaf()) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                const Face& f = faces[order_[i]];
                bound.expand(triangle_aabb(vertices[f[0]], vertices[f[1]], vertices[f[2]]));
            }
        } else {
            bound.expand(nodes_[node.left].bound);
            bound.expand(nodes_[node.right].bound);
        }
        node.bound = bound;
    }
}

std::vector<int> Bvh::query(const Aabb& box) const {
    std::vector<int> hits;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        if (!node.bound.overlaps(box)) continue;
        if (node.is_leaf()) {
            for (int i = node.first; i < node.first + node.count; ++i) hits.push_back(order_[i]);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    return hits;
}

namespace {

bool share_vertex(const Face& a, const Face& b) {
    for (int i : a)
        for (int j : b)
            if (i == j) return true;
    return false;
}

}  // namespace

std::vector<std::pair<int, int>> mesh_pair_collision(const Bvh& bvh_a,
                                                     const std::vector<Vec3>& verts_a,
                                                     const std::vector<Face>& faces_a,
                                                     const Bvh& bvh_b,
                                                     const std::vector<Vec3>& verts_b,
                                                     const std::vector<Face>& faces_b) {
    std::vector<std::pair<int, int>> out;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [ia, ib] = stack.back();
        stack.pop_back();
        const Bvh::Node& na = bvh_a.nodes_[ia];
        const Bvh::Node& nb = bvh_b.nodes_[ib];
        if (!na.bound.overlaps(nb.bound)) continue;
        if (na.is_leaf() && nb.is_leaf()) {
            for (int i = na.first; i < na.first + na.count; ++i) {
                const Face& fa = faces_a[bvh_a.order_[i]];
                Aabb box_a = triangle_aabb(verts_a[fa[0]], verts_a[fa[1]], verts_a[fa[2]]);
                for (int j = nb.first; j < nb.first + nb.count; ++j) {
                    const Face& fb = faces_b[bvh_b.order_[j]];
                    Aabb box_b = triangle_aabb(verts_b[fb[0]], verts_b[fb[1]], verts_b[fb[2]]);
                    if (!box_a.overlaps(box_b)) continue;
                    if (triangles_intersect(verts_a[fa[0]], verts_a[fa[1]], verts_a[fa[2]],
                                            verts_b[fb[0]], verts_b[fb[1]], verts_b[fb[2]]))
                        out.emplace_back(bvh_a.order_[i], bvh_b.order_[j]);
                }
            }
        } else if (na.is_leaf()) {
            stack.push_back({ia, nb.left});
            stack.push_back({ia, nb.right});
        } else if (nb.is_leaf()) {
            stack.push_back({na.left, ib});
            stack.push_back({na.right, ib});
        } else {
            stack.push_back({na.left, nb.left});
            stack.push_back({na.left, nb.right});
            stack.push_back({na.right, nb.left});
            stack.push_back({na.right, nb.right});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::pair<int, int>> self_collision(const Bvh& bvh, const std::vector<Vec3>& verts,
                                                const std::vector<Face>& faces,
                                                const std::vector<int>& part_of_face,
                                                const std::set<std::pair<int, int>>& part_adjacency) {
    auto exempt = [&](int fa, int fb) {
        if (share_vertex(faces[fa], faces[fb])) return true;
        int pa = part_of_face[fa], pb = part_of_face[fb];
        if (pa > pb) std::swap(pa, pb);
        return part_adjacency.count({pa, pb}) > 0;
    };

    std::vector<std::pair<int, int>> out;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [ia, ib] = stack.back();
        stack.pop_back();
        const Bvh::Node& na = bvh.nodes_[ia];
        const Bvh::Node& nb = bvh.nodes_[ib];
        if (!na.bound.overlaps(nb.bound)) continue;
        if (na.is_leaf() && nb.is_leaf()) {
            for (int i = na.first; i < na.first + na.count; ++i) {
                const Face& fa = faces[bvh.order_[i]];
                Aabb box_a = triangle_aabb(verts[fa[0]], verts[fa[1]], verts[fa[2]]);
                int j0 = (ia == ib) ? i + 1 : nb.first;
                for (int j = j0; j < nb.first + nb.count; ++j) {
                    int face_a = bvh.order_[i], face_b = bvh.order_[j];
                    if (face_a == face_b) continue;
                    if (exempt(face_a, face_b)) continue;
                    const Face& fb = faces[face_b];
                    Aabb box_b = triangle_aabb(verts[fb[0]], verts[fb[1]], verts[fb[2]]);
                    if (!box_a.overlaps(box_b)) continue;
                    if (triangles_intersect(verts[fa[0]], verts[fa[1]], verts[fa[2]], verts[fb[0]],
                                            verts[fb[1]], verts[fb[2]])) {
                        out.emplace_back(std::min(face_a, face_b), std::max(face_a, face_b));
                    }
                }
            }
        } else if (ia == ib && !na.is_leaf()) {
            stack.push_back({na.left, na.left});
            stack.push_back({na.right, na.right});
            stack.push_back({na.left, na.right});
        } else if (na.is_leaf()) {
            stack.push_back({ia, nb.left});
            stack.push_back({ia, nb.right});
        } else if (nb.is_leaf()) {
            stack.push_back({na.left, ib});
            stack.push_back({na.right, ib});
        } else {
            stack.push_back({na.left, nb.left});
            stack.push_back({na.left, nb.right});
            stack.push_back({na.right, nb.left});
            stack.push_back({na.right, nb.right});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PlacementCheck validate_placement(const std::vector<const ActorSubsequenceMesh*>& actors,
                                  double billboard_z, bool check_self) {
    PlacementCheck result;
    if (actors.empty()) return result;
    const int n_frames = static_cast<int>(actors[0]->frame_vertices.size());

    std::vector<Bvh> bvhs;
    bvhs.reserve(actors.size());
    for (const auto* a : actors) bvhs.push_back(Bvh::build(a->frame_vertices[0], *a->faces));

    for (int t = 0; t < n_frames; ++t) {
        for (size_t i = 0; i < actors.size(); ++i) {
            for (const Vec3& v : actors[i]->frame_vertices[t]) {
                if (v.z <= billboard_z) {
                    result.ok = false;
                    result.crossed_billboard = true;
                    result.bad_frame = t;
                    return result;
                }
            }
            bvhs[i].refit(actors[i]->frame_vertices[t], *actors[i]->faces);
        }
        for (size_t i = 0; i < actors.size(); ++i) {
            for (size_t j = i + 1; j < actors.size(); ++j) {
                auto pairs = mesh_pair_collision(bvhs[i], actors[i]->frame_vertices[t],
                                                 *actors[i]->faces, bvhs[j],
                                                 actors[j]->frame_vertices[t], *actors[j]->faces);
                if (!pairs.empty()) {
                    result.ok = false;
                    result.inter_actor = true;
                    result.bad_frame = t;
                    return result;
                }
            }
            if (check_self) {
                auto pairs = self_collision(bvhs[i], actors[i]->frame_vertices[t], *actors[i]->faces,
                                            *actors[i]->part_of_face, *actors[i]->part_adjacency);
                if (!pairs.empty()) ++result.self_collision_frames;
            }
        }
    }
    return result;
}

}  // namespace mhof
