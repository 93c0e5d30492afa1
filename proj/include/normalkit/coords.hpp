#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "normalkit/skeleton.hpp"
#include "normalkit/triangulation.hpp"

namespace normalkit {

// Piece types within one tetrahedron, in coordinate order:
//   0..3  triangle cutting off vertex v
//   4..6  quad missing the opposite-edge pair of axis a
//   7..9  octagon on axis a
// Axes: 0 = {01|23}, 1 = {02|13}, 2 = {03|12}. The axis names the pair of
// opposite edges the quad misses; the octagon crosses exactly those two
// edges twice.
enum class System : uint8_t { OneNormal, TwoNormal };

inline int coords_per_tet(System s) { return s == System::OneNormal ? 7 : 10; }

struct PieceType {
    int code = 0;  // 0..9

    bool is_triangle() const { return code < 4; }
    bool is_quad() const { return code >= 4 && code < 7; }
    bool is_octagon() const { return code >= 7; }
    int vertex() const { return code; }            // triangles only
    int axis() const { return (code - 4) % 3; }    // saddles only
    std::string str() const;
};

// Axis pair tables: axis_pairs[a] = {{lo0,lo1},{hi0,hi1}} with the low pair
// containing vertex 0. kAxisEdgeLo/Hi give the edge indices.
inline constexpr int kAxisPairs[3][2][2] = {
    {{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
inline constexpr int kAxisEdgeLo[3] = {0, 1, 2};
inline constexpr int kAxisEdgeHi[3] = {5, 4, 3};

// The vertex paired with v in the axis decomposition.
int axis_partner(int axis, int v);
// True when v lies in the low pair of the axis.
bool axis_in_low(int axis, int v);

// How many corners piece p has on edge e (0, 1 or 2).
int piece_corner_count(PieceType p, int edge);

// The normal-arc types of piece p in face f, as the list of cut-off
// vertices (empty, one, or two entries; octagons contribute two).
std::vector<int> piece_arc_table(PieceType p, int face);

struct CoordinateVector {
    System system = System::OneNormal;
    int tets = 0;
    std::vector<int64_t> counts;  // tets * coords_per_tet entries

    static CoordinateVector zero(System s, int n) {
        CoordinateVector v;
        v.system = s;
        v.tets = n;
        v.counts.assign(static_cast<size_t>(n * coords_per_tet(s)), 0);
        return v;
    }

    int64_t& at(int tet, int code) { return counts[static_cast<size_t>(tet * per_tet() + code)]; }
    int64_t at(int tet, int code) const {
        return counts[static_cast<size_t>(tet * per_tet() + code)];
    }
    int per_tet() const { return coords_per_tet(system); }
    bool is_zero() const;
    int64_t total_pieces() const;
    int64_t octagon_total() const;

    CoordinateVector& operator+=(const CoordinateVector& o);
    CoordinateVector operator+(const CoordinateVector& o) const;
    CoordinateVector operator*(int64_t k) const;
    bool operator==(const CoordinateVector& o) const = default;
    bool operator<(const CoordinateVector& o) const;  // lexicographic on counts
};

// One matching equation per (face class, arc type): arc counts computed on
// the two sides of the glued face agree, arc types transported by the
// gluing permutation. Matrix is 6n x (7n|10n), rows in face-class order.
std::vector<std::vector<int64_t>> matching_matrix(const Triangulation& t, const SkeletonIndex& sk,
                                                  System system);

bool is_matched(const Triangulation& t, const SkeletonIndex& sk, const CoordinateVector& v);

// At most one saddle type (quad or octagon) per tetrahedron may be nonzero.
bool is_admissible(const CoordinateVector& v);

// Number of intersection points with the 1-skeleton. Computes the corner
// count on every slot of each edge class and insists they agree, which is
// exactly the matching condition; throws DomainError otherwise.
int64_t weight(const Triangulation& t, const SkeletonIndex& sk, const CoordinateVector& v);

// Euler characteristic of the induced cell structure: corners on edges
// minus arcs in faces plus pieces.
int64_t euler_characteristic(const Triangulation& t, const SkeletonIndex& sk,
                             const CoordinateVector& v);

// The link of a vertex class: one triangle per incident (tet, vertex) slot.
CoordinateVector vertex_link(const Triangulation& t, const SkeletonIndex& sk, int vertex_class,
                             System system = System::OneNormal);

// JSON round trip per the documented format:
// {"system":"1N"|"2N","counts":[[t0,t1,t2,t3,q0,q1,q2(,o0,o1,o2)],...]}
std::string coordinates_to_json(const CoordinateVector& v);
CoordinateVector coordinates_from_json(const std::string& text);

}  // namespace normalkit
