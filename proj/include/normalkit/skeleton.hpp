#pragma once

#include <vector>

#include "normalkit/triangulation.hpp"

namespace normalkit {

struct VertexSlot {
    int tet = 0;
    int vertex = 0;
    bool operator==(const VertexSlot&) const = default;
};

struct EdgeSlot {
    int tet = 0;
    int edge = 0;  // 0..5, see kEdgeVerts
    bool operator==(const EdgeSlot&) const = default;
};

struct EdgeClass {
    std::vector<EdgeSlot> slots;
    // +1 when the class orientation agrees with the slot's min->max vertex
    // direction, -1 otherwise; parallel to `slots`.
    std::vector<int> slot_sign;
    // False when some slot is identified with itself reversed; such an edge
    // cannot carry a consistent point order.
    bool orientation_consistent = true;
    int degree() const { return static_cast<int>(slots.size()); }
};

struct FaceClass {
    // slot 0 is the canonical representative; sides and arc types of the
    // class are labelled by the vertices of slots[0]'s face.
    int tet[2] = {-1, -1};
    int face[2] = {-1, -1};
    Perm4 perm01;  // vertex map from the slot-0 tet to the slot-1 tet
};

struct SkeletonIndex {
    std::vector<std::vector<VertexSlot>> vertex_classes;
    std::vector<EdgeClass> edge_classes;
    std::vector<FaceClass> face_classes;
    bool orientable = false;

    // Lookup tables: slot -> class index.
    std::vector<std::array<int, 4>> vertex_class_of;  // [tet][vertex]
    std::vector<std::array<int, 6>> edge_class_of;    // [tet][edge]
    std::vector<std::array<int, 6>> edge_sign_of;     // [tet][edge]
    std::vector<std::array<int, 4>> face_class_of;    // [tet][face]
    std::vector<std::array<int, 4>> face_slot_of;     // [tet][face] -> 0|1

    int vertex_count() const { return static_cast<int>(vertex_classes.size()); }
    int edge_count() const { return static_cast<int>(edge_classes.size()); }
    int face_count() const { return static_cast<int>(face_classes.size()); }
};

// Builds the full skeleton index of a valid closed triangulation.
SkeletonIndex compute_skeleton(const Triangulation& t);

}  // namespace normalkit
