#pragma once

#include <array>
#include <string>
#include <vector>

#include "normalkit/errors.hpp"
#include "normalkit/perm.hpp"

namespace normalkit {

// Fixed conventions:
//   * face f of a tetrahedron is the triangle opposite vertex f;
//   * edges are indexed 0..5 by the sorted vertex pair, lexicographically:
//     {0,1},{0,2},{0,3},{1,2},{1,3},{2,3}.
inline constexpr std::array<std::array<int, 2>, 6> kEdgeVerts = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

int edge_index(int a, int b);

// The three vertices of face f, ascending.
std::array<int, 3> face_vertices(int f);

struct FaceGluing {
    int tet = -1;
    Perm4 perm;  // vertex map v -> perm[v]; target face is perm[f]
};

// A closed triangulation: n tetrahedra, every face slot glued.
struct Triangulation {
    std::vector<std::array<FaceGluing, 4>> glu;
    std::string name;

    int size() const { return static_cast<int>(glu.size()); }
    const FaceGluing& gluing(int tet, int face) const {
        return glu[static_cast<size_t>(tet)][static_cast<size_t>(face)];
    }
};

// Parses the gluing file format:
//   comment lines start with '#';
//   one line per tetrahedron: `tet <i>: <g0> <g1> <g2> <g3>` where <gf> is
//   `<k>(<p0><p1><p2><p3>)`.
// Throws ParseError on malformed text and InvalidTriangulation when the
// gluing relation is not a fixed-point-free involution carrying inverse,
// face-to-face permutations.
Triangulation parse_triangulation(const std::string& text);

// Inverse of parse_triangulation; parse(serialize(T)) reproduces T exactly.
std::string serialize_triangulation(const Triangulation& t);

// Structural validation used by parse_triangulation; callable on values
// assembled in code.
void validate_triangulation(const Triangulation& t);

}  // namespace normalkit
