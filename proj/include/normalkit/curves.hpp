#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "normalkit/coords.hpp"
#include "normalkit/surface.hpp"

namespace normalkit {

// Shared immutable context: the triangulation, its skeleton, and the cyclic
// structure around every edge (alternating tetrahedron slots and face germs)
// that curve operations walk.
struct Germ {
    int face_class = -1;
    int side = -1;        // canonical side index 0..2 of the face class
    int slot_prev = -1;   // face slot (0|1) on the side facing the previous tet slot
    int slot_next = -1;   // face slot on the side facing the next tet slot
};

struct EdgeRing {
    std::vector<EdgeSlot> tet_slots;  // tet_slots[i] lies between germs[i-1] and germs[i]
    std::vector<Germ> germs;          // germs[i] lies between tet_slots[i] and tet_slots[i+1]
};

struct FaceSideInfo {
    int verts[2] = {-1, -1};  // canonical labels, ascending
    int edge_class = -1;
    int min_to_max_sign = 0;  // +1 when class orientation runs verts[0] -> verts[1]
    int ccw_forward_sign = 0; // class direction of the canonical boundary cycle
};

struct TriContext {
    Triangulation tri;
    SkeletonIndex sk;
    std::vector<EdgeRing> rings;                        // per edge class
    std::vector<std::array<FaceSideInfo, 3>> sides;     // per face class
    // side index by local edge: [face class][slot][local edge 0..5] -> 0..2 or -1
    std::vector<std::array<std::array<int, 6>, 2>> side_of_local;

    int ring_pos(int face_class, int side) const;  // index into the ring of that germ's edge
};

std::shared_ptr<const TriContext> make_context(const Triangulation& t);
std::shared_ptr<const TriContext> make_context(Triangulation&& t, SkeletonIndex&& sk);

// ---------------------------------------------------------------------------

enum class DiscSide : uint8_t { Upper, Lower };

// A surface presented by its intersection with the 2-skeleton: points on
// edges, arcs and circles in the glued faces, abstract piece labels per
// tetrahedron, and a transverse co-orientation where the surface is
// two-sided.
struct CurvePoint {
    int edge_class = -1;
    bool alive = false;
    // Upper side points towards the positive end of the edge class; absent
    // states carry no co-orientation (one-sided surfaces).
    std::optional<bool> co_up;
};

struct CurveArcEnd {
    int side = -1;   // canonical side of the face class
    int point = -1;  // point id
    bool operator==(const CurveArcEnd&) const = default;
};

struct CurveArc {
    int face_class = -1;
    CurveArcEnd end[2];
    int owner[2] = {-1, -1};  // piece id bordering via face slot 0 / 1
    bool alive = false;
};

struct CurveCircle {
    int face_class = -1;
    // Anchor: the circle lies against `anchor_side`, in the gap following
    // `anchor_after` (point id; -1 = before the first point) in edge-class
    // order. When a reduction slides a segment between the circle and its
    // edge, `behind_arc` records the separating arc. Cleared (-2) when the
    // circle is nested inside another circle, recorded by `parent`.
    int anchor_side = -2;
    int anchor_after = -2;
    int behind_arc = -1;
    int parent = -1;
    std::optional<bool> co_up_inside;
    int owner[2] = {-1, -1};
    bool alive = false;
};

struct CurvePiece {
    int tet = -1;
    int64_t chi = 0;
    bool alive = false;
};

struct CurveSystem {
    std::shared_ptr<const TriContext> ctx;
    System system = System::OneNormal;
    std::vector<CurvePoint> points;
    std::vector<std::vector<int>> points_on_edge;  // per edge class, class order
    std::vector<CurveArc> arcs;
    std::vector<CurveCircle> circles;
    std::vector<CurvePiece> pieces;

    int64_t weight() const;
    int64_t surface_euler_characteristic() const;
    int point_position(int point) const;  // position in its edge-class order
};

// ---------------------------------------------------------------------------
// Derived views.

// One closed curve on the boundary of a tetrahedron. Entries alternate
// implicitly: element i is an oriented pass through an arc (or a circle,
// which forms a whole curve alone); `crossing[i]` is the tet edge slot
// crossed between elements i and i+1.
struct TetCurve {
    int tet = -1;
    int piece = -1;
    bool is_circle = false;
    int circle = -1;
    std::vector<int> arc_ids;
    std::vector<int> arc_slot;     // face slot giving this tet's side
    std::vector<int> arc_dir;      // 0: end[0]->end[1], 1: reverse
    std::vector<EdgeSlot> crossing;
};

std::vector<TetCurve> tet_curves(const CurveSystem& cs);

// ---------------------------------------------------------------------------
// Operations.

// Realizes a matched admissible vector as a curve system: normal arcs only,
// disc pieces, co-orientation assigned per two-sided component (the lowest
// point of a component has its upper side towards the positive edge end).
CurveSystem from_coordinates(const Triangulation& t, const CoordinateVector& v);
CurveSystem from_coordinates(std::shared_ptr<const TriContext> ctx, const CoordinateVector& v);

// Joins two pieces of one tetrahedron with an unknotted tube in its
// interior. Face arrangements, weight and curves are untouched; the labels
// merge with chi = chi1 + chi2 - 2.
CurveSystem tube_in_tet(const CurveSystem& cs, int tet, int piece_a, int piece_b);

// Attaches a tube along a corridor between two arcs of one face. `corridor`
// selects the region the corridor runs through: 0 = the region on arc_a's
// left (travelling end 0 -> end 1 in the canonical face orientation),
// 1 = the region on its right. The chosen region must also border arc_b.
CurveSystem tube_in_face(const CurveSystem& cs, int face_class, int arc_a, int arc_b, int corridor);

struct ReturnArc {
    int face_class = -1;
    int arc = -1;
};

// All segments with both endpoints on one edge of their face.
std::vector<ReturnArc> find_returns(const CurveSystem& cs);

struct T2Disc {
    int face_class = -1;
    int side = -1;       // canonical side carrying the string
    int arc = -1;        // the return (base)
    int point_lo = -1;   // string endpoints, by class position
    int point_hi = -1;
    DiscSide disc_side = DiscSide::Upper;
    bool strict = false;
};

// The canonical compressing disc of every return whose surface side is
// co-oriented `side`: the region between the return and its edge, which
// meets the 1-skeleton exactly in the string. Strict iff that region is
// empty of the arrangement. Returns on un-co-oriented components are not
// reported.
std::vector<T2Disc> find_t2_discs(const CurveSystem& cs, DiscSide side);

// Pulls the surface across a strict disc: the string endpoints leave the
// edge, the return disappears, and in every other germ around the edge the
// two segments ending at the string concatenate (closing into a circle when
// they are the same segment). Weight drops by exactly 2.
CurveSystem elementary_reduction(const CurveSystem& cs, const T2Disc& disc);

struct ReductionStep {
    T2Disc disc;
    int64_t weight_before = 0;
    int64_t weight_after = 0;
};

enum class NormalizeOutcome : uint8_t { Normalized, Obstructed, StepLimit };

struct ReductionTrace {
    std::vector<ReductionStep> steps;
    NormalizeOutcome outcome = NormalizeOutcome::Normalized;
    std::optional<int> k;  // k-normality of the final system when Normalized
};

// Reduces along strict discs of one side until none remain, choosing the
// disc with the lowest (face class, side, string position) each step.
std::pair<CurveSystem, ReductionTrace> normalize(const CurveSystem& cs, DiscSide side,
                                                 int64_t step_limit);

struct KNormality {
    std::optional<int> k;         // empty: not almost-normal
    std::string obstruction;      // offending element when not almost-normal
};

// max over (tet, edge, boundary curve of a piece) of edge crossings; at
// least 1, so the empty surface counts as 1-normal.
KNormality k_normality(const CurveSystem& cs);

// Drops circle components and solves the per-tetrahedron piece counts from
// the normal-arc counts. Requires a return-free system.
CoordinateVector cut(const CurveSystem& cs);

// Structural consistency check used by tests after every mutation.
void validate_curve_system(const CurveSystem& cs);

}  // namespace normalkit
