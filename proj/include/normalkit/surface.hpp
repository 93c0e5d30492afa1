#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "normalkit/coords.hpp"

namespace normalkit {

// One instantiated disc of the reconstruction: the `copy` field is the
// 1-based parallel index within (tet, type) stacks.
struct PieceInstance {
    int tet = 0;
    PieceType type;
    int copy = 1;
};

// A corner of a piece boundary: a point on an edge class at a position in
// the linear order along that edge.
struct Corner {
    int edge_class = 0;
    int position = 0;
};

// An arc of the surface in a glued face. `cut_vertex` and `index` use the
// face class's canonical (slot 0) labelling; index counts parallel arcs of
// one type outward from the cut-off vertex, starting at 0.
struct SurfaceArc {
    int face_class = 0;
    int cut_vertex = 0;
    int index = 0;
    int corner[2] = {-1, -1};
    int end_side[2] = {-1, -1};    // canonical side of the face class per endpoint
    int piece_side[2] = {-1, -1};  // piece id bordering via face slot 0 / 1
};

// Boundary cycle entry of a piece: alternating corner and arc ids, starting
// with a corner; arcs are traversed from the preceding to the following
// corner in cycle order.
struct SurfaceComplex {
    System system = System::OneNormal;
    std::vector<PieceInstance> pieces;
    std::vector<Corner> corners;
    std::vector<std::vector<int>> corners_on_edge;  // per edge class, in order
    std::vector<SurfaceArc> arcs;
    std::vector<std::vector<int>> piece_corner_cycle;  // per piece
    std::vector<std::vector<int>> piece_arc_cycle;     // per piece, arc i joins corner i -> i+1

    int64_t weight() const;
    int64_t euler_characteristic() const;
};

// Realizes a matched admissible vector as a concrete cell complex, with
// triangles stacked innermost at the vertices and saddles ordered along
// their axis. Throws DomainError on inadmissible or unmatched input and on
// edges whose identification reverses orientation.
SurfaceComplex build_surface(const Triangulation& t, const SkeletonIndex& sk,
                             const CoordinateVector& v);

struct ComponentReport {
    int component_id = 0;
    CoordinateVector coords;
    int64_t chi = 0;
    bool orientable = false;
    std::optional<int64_t> genus;  // connected orientable components only
    bool is_vertex_link = false;
    // Pattern key: per tet, the set of piece types used (bitmask over codes).
    std::vector<uint16_t> pattern;
    std::vector<int> piece_ids;
};

std::vector<ComponentReport> components(const Triangulation& t, const SkeletonIndex& sk,
                                        const SurfaceComplex& sc);

struct DuplicateGroup {
    std::vector<uint16_t> pattern;
    std::vector<int> component_ids;
};

// Groups components by pattern and returns every group of size >= 2. By the
// Kneser--Haken finiteness bound, more than 20n components force at least
// one such group.
std::vector<DuplicateGroup> kneser_check(const std::vector<ComponentReport>& reports, int n_tets);

std::string component_report_to_json(const ComponentReport& r);

}  // namespace normalkit
