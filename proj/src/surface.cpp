#include "normalkit/surface.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "vendor_json.hpp"

namespace normalkit {

namespace {

struct TetCounts {
    int64_t tri[4] = {0, 0, 0, 0};
    int saddle_code = -1;  // 4..9 or -1
    int64_t saddle = 0;
};

TetCounts tet_counts(const CoordinateVector& v, int tet) {
    TetCounts c;
    for (int i = 0; i < 4; ++i) c.tri[i] = v.at(tet, i);
    for (int code = 4; code < v.per_tet(); ++code) {
        if (v.at(tet, code) > 0) {
            if (c.saddle_code >= 0) throw DomainError("inadmissible vector: two saddle types in a tet");
            c.saddle_code = code;
            c.saddle = v.at(tet, code);
        }
    }
    return c;
}

// Position of a piece corner along edge \{a,b\} (a<b) of its tet, counted
// from a. `near_b` selects the second crossing for octagon axis edges.
int64_t corner_position(const TetCounts& c, PieceType p, int copy, int edge, bool near_b) {
    int a = kEdgeVerts[static_cast<size_t>(edge)][0];
    int b = kEdgeVerts[static_cast<size_t>(edge)][1];
    int64_t ta = c.tri[a], tb = c.tri[b];
    int64_t s = c.saddle;
    if (p.is_triangle()) {
        if (p.vertex() == a) return copy - 1;
        int64_t n = ta + tb + s * (c.saddle_code >= 0 ? piece_corner_count(PieceType{c.saddle_code}, edge) : 0);
        return n - copy;
    }
    int ax = p.axis();
    bool lo_edge = (edge == kAxisEdgeLo[ax]);
    bool hi_edge = (edge == kAxisEdgeHi[ax]);
    if (p.is_quad()) {
        // the low pair's vertex of this edge is nearer the low axis edge
        bool a_in_low = axis_in_low(ax, a);
        return ta + (a_in_low ? copy - 1 : s - copy);
    }
    if (!lo_edge && !hi_edge) {
        bool a_in_low = axis_in_low(ax, a);
        return ta + (a_in_low ? copy - 1 : s - copy);
    }
    if (lo_edge) return near_b ? ta + 2 * s - copy : ta + (copy - 1);
    return near_b ? ta + s + (copy - 1) : ta + (s - copy);
}

// Index of a piece's arc within the (face, cut vertex) family, innermost
// copy (closest to the cut-off vertex) first.
int64_t arc_index(const TetCounts& c, PieceType p, int copy, int /*face*/, int w) {
    if (p.is_triangle()) return copy - 1;
    int64_t tw = c.tri[w];
    bool w_in_low = axis_in_low(p.axis(), w);
    return tw + (w_in_low ? copy - 1 : c.saddle - copy);
}

struct CycleEntry {
    int edge;     // corner: local edge index
    bool near_b;  // corner: which octagon axis crossing
    int face;     // following arc: local face
    int cut;      // following arc: cut vertex
};

// Boundary cycles of the three piece shapes, alternating corner/arc.
std::vector<CycleEntry> piece_cycle(PieceType p) {
    std::vector<CycleEntry> cyc;
    if (p.is_triangle()) {
        int v = p.vertex();
        std::array<int, 3> x{};
        int k = 0;
        for (int i = 0; i < 4; ++i)
            if (i != v) x[static_cast<size_t>(k++)] = i;
        cyc.push_back({edge_index(v, x[0]), false, x[2], v});
        cyc.push_back({edge_index(v, x[1]), false, x[0], v});
        cyc.push_back({edge_index(v, x[2]), false, x[1], v});
        return cyc;
    }
    int ax = p.axis();
    int a0 = kAxisPairs[ax][0][0], a1 = kAxisPairs[ax][0][1];
    int b0 = kAxisPairs[ax][1][0], b1 = kAxisPairs[ax][1][1];
    if (p.is_quad()) {
        cyc.push_back({edge_index(a0, b0), false, a1, a0});
        cyc.push_back({edge_index(a0, b1), false, b0, b1});
        cyc.push_back({edge_index(a1, b1), false, a0, a1});
        cyc.push_back({edge_index(a1, b0), false, b1, b0});
        return cyc;
    }
    int lo = kAxisEdgeLo[ax], hi = kAxisEdgeHi[ax];
    // near_b refers to the larger-numbered vertex of the axis edge
    bool a0_is_min_lo = kEdgeVerts[static_cast<size_t>(lo)][0] == a0;
    bool b0_is_min_hi = kEdgeVerts[static_cast<size_t>(hi)][0] == b0;
    cyc.push_back({edge_index(a0, b0), false, b1, a0});
    cyc.push_back({lo, !a0_is_min_lo, b0, a0});
    cyc.push_back({edge_index(a0, b1), false, a1, b1});
    cyc.push_back({hi, b0_is_min_hi, a0, b1});
    cyc.push_back({edge_index(a1, b1), false, b0, a1});
    cyc.push_back({lo, a0_is_min_lo, b1, a1});
    cyc.push_back({edge_index(a1, b0), false, a0, b0});
    cyc.push_back({hi, !b0_is_min_hi, a1, b0});
    return cyc;
}

}  // namespace

int64_t SurfaceComplex::weight() const { return static_cast<int64_t>(corners.size()); }

int64_t SurfaceComplex::euler_characteristic() const {
    return static_cast<int64_t>(corners.size()) - static_cast<int64_t>(arcs.size()) +
           static_cast<int64_t>(pieces.size());
}

SurfaceComplex build_surface(const Triangulation& t, const SkeletonIndex& sk,
                             const CoordinateVector& v) {
    const int n = t.size();
    if (v.tets != n) throw DomainError("vector size does not match triangulation");
    if (!is_admissible(v)) throw DomainError("vector is not admissible");

    SurfaceComplex sc;
    sc.system = v.system;

    std::vector<TetCounts> counts;
    counts.reserve(static_cast<size_t>(n));
    for (int tet = 0; tet < n; ++tet) counts.push_back(tet_counts(v, tet));

    // Pieces, in (tet, code, copy) order.
    std::vector<std::vector<std::vector<int>>> piece_id(static_cast<size_t>(n));
    for (int tet = 0; tet < n; ++tet) {
        piece_id[static_cast<size_t>(tet)].resize(10);
        for (int code = 0; code < v.per_tet(); ++code) {
            for (int64_t copy = 1; copy <= v.at(tet, code); ++copy) {
                piece_id[static_cast<size_t>(tet)][static_cast<size_t>(code)].push_back(
                    static_cast<int>(sc.pieces.size()));
                sc.pieces.push_back({tet, PieceType{code}, static_cast<int>(copy)});
            }
        }
    }

    // Corner ids per edge class. Counts must agree over all slots (matching);
    // invalid edges cannot carry a consistent order.
    std::vector<int64_t> edge_points(static_cast<size_t>(sk.edge_count()), 0);
    for (int ec = 0; ec < sk.edge_count(); ++ec) {
        const EdgeClass& cls = sk.edge_classes[static_cast<size_t>(ec)];
        int64_t c0 = -1;
        for (const EdgeSlot& s : cls.slots) {
            int64_t ci = 0;
            for (int code = 0; code < v.per_tet(); ++code)
                ci += v.at(s.tet, code) * piece_corner_count(PieceType{code}, s.edge);
            if (c0 < 0)
                c0 = ci;
            else if (ci != c0)
                throw DomainError("corner counts disagree across an edge class (matching violated)");
        }
        if (c0 > 0 && !cls.orientation_consistent)
            throw DomainError("edge class identified with itself reversed; surface order undefined");
        edge_points[static_cast<size_t>(ec)] = c0;
    }
    sc.corners_on_edge.resize(static_cast<size_t>(sk.edge_count()));
    for (int ec = 0; ec < sk.edge_count(); ++ec) {
        for (int64_t p = 0; p < edge_points[static_cast<size_t>(ec)]; ++p) {
            sc.corners_on_edge[static_cast<size_t>(ec)].push_back(static_cast<int>(sc.corners.size()));
            sc.corners.push_back({ec, static_cast<int>(p)});
        }
    }

    auto corner_id_at = [&](int tet, int edge, int64_t local_pos) {
        int ec = sk.edge_class_of[static_cast<size_t>(tet)][static_cast<size_t>(edge)];
        int sign = sk.edge_sign_of[static_cast<size_t>(tet)][static_cast<size_t>(edge)];
        int64_t num = edge_points[static_cast<size_t>(ec)];
        int64_t pos = sign > 0 ? local_pos : num - 1 - local_pos;
        if (pos < 0 || pos >= num) throw DomainError("internal: corner position out of range");
        return sc.corners_on_edge[static_cast<size_t>(ec)][static_cast<size_t>(pos)];
    };

    // Arc families: per (face class, canonical cut vertex), filled from both
    // slots; slot 0 creates the arcs, slot 1 must agree in count.
    std::map<std::pair<int, int>, std::vector<int>> family;  // (face class, w) -> arc ids
    for (int fc = 0; fc < sk.face_count(); ++fc) {
        const FaceClass& cls = sk.face_classes[static_cast<size_t>(fc)];
        for (int w : face_vertices(cls.face[0])) {
            int64_t k0 = 0, k1 = 0;
            for (int code = 0; code < v.per_tet(); ++code) {
                PieceType p{code};
                for (int arc : piece_arc_table(p, cls.face[0]))
                    if (arc == w) k0 += v.at(cls.tet[0], code);
                for (int arc : piece_arc_table(p, cls.face[1]))
                    if (arc == cls.perm01[w]) k1 += v.at(cls.tet[1], code);
            }
            if (k0 != k1) throw DomainError("arc counts disagree across a glued face (matching violated)");
            std::vector<int>& ids = family[{fc, w}];
            for (int64_t i = 0; i < k0; ++i) {
                ids.push_back(static_cast<int>(sc.arcs.size()));
                SurfaceArc a;
                a.face_class = fc;
                a.cut_vertex = w;
                a.index = static_cast<int>(i);
                sc.arcs.push_back(a);
            }
        }
    }

    // Canonical side index of a local edge within a face class.
    auto canonical_side = [&](int tet, int face, int local_edge) {
        int fc = sk.face_class_of[static_cast<size_t>(tet)][static_cast<size_t>(face)];
        int slot = sk.face_slot_of[static_cast<size_t>(tet)][static_cast<size_t>(face)];
        const FaceClass& cls = sk.face_classes[static_cast<size_t>(fc)];
        int a = kEdgeVerts[static_cast<size_t>(local_edge)][0];
        int b = kEdgeVerts[static_cast<size_t>(local_edge)][1];
        if (slot == 1) {
            Perm4 inv = cls.perm01.inverse();
            a = inv[a];
            b = inv[b];
            if (a > b) std::swap(a, b);
        }
        auto fv = face_vertices(cls.face[0]);
        // sides ordered 0={fv0,fv1}, 1={fv0,fv2}, 2={fv1,fv2}
        if (a == fv[0] && b == fv[1]) return 0;
        if (a == fv[0] && b == fv[2]) return 1;
        if (a == fv[1] && b == fv[2]) return 2;
        throw DomainError("internal: edge not on face");
    };

    // Walk every piece boundary, resolving corners and arcs to global ids.
    sc.piece_corner_cycle.resize(sc.pieces.size());
    sc.piece_arc_cycle.resize(sc.pieces.size());
    std::vector<std::vector<int>> cycle_edges(sc.pieces.size());
    for (size_t pid = 0; pid < sc.pieces.size(); ++pid) {
        const PieceInstance& pi = sc.pieces[pid];
        const TetCounts& c = counts[static_cast<size_t>(pi.tet)];
        for (const CycleEntry& e : piece_cycle(pi.type)) {
            int64_t pos = corner_position(c, pi.type, pi.copy, e.edge, e.near_b);
            sc.piece_corner_cycle[pid].push_back(corner_id_at(pi.tet, e.edge, pos));
            cycle_edges[pid].push_back(e.edge);

            int fc = sk.face_class_of[static_cast<size_t>(pi.tet)][static_cast<size_t>(e.face)];
            int slot = sk.face_slot_of[static_cast<size_t>(pi.tet)][static_cast<size_t>(e.face)];
            const FaceClass& cls = sk.face_classes[static_cast<size_t>(fc)];
            int w_canonical = slot == 0 ? e.cut : cls.perm01.inverse()[e.cut];
            int64_t idx = arc_index(c, pi.type, pi.copy, e.face, e.cut);
            const std::vector<int>& ids = family[{fc, w_canonical}];
            if (idx < 0 || idx >= static_cast<int64_t>(ids.size()))
                throw DomainError("internal: arc index out of range");
            int aid = ids[static_cast<size_t>(idx)];
            sc.piece_arc_cycle[pid].push_back(aid);
            if (sc.arcs[static_cast<size_t>(aid)].piece_side[slot] >= 0)
                throw DomainError("internal: arc side claimed twice");
            sc.arcs[static_cast<size_t>(aid)].piece_side[slot] = static_cast<int>(pid);
        }
    }

    // Resolve arc endpoints from the cycles and check both sides agree.
    for (size_t pid = 0; pid < sc.pieces.size(); ++pid) {
        const PieceInstance& pi = sc.pieces[pid];
        const auto& cyc_c = sc.piece_corner_cycle[pid];
        const auto& cyc_a = sc.piece_arc_cycle[pid];
        const auto cyc = piece_cycle(pi.type);
        const size_t m = cyc_a.size();
        for (size_t i = 0; i < m; ++i) {
            int u = cyc_c[i];
            int w = cyc_c[(i + 1) % m];
            int su = canonical_side(pi.tet, cyc[i].face, cycle_edges[pid][i]);
            int sw = canonical_side(pi.tet, cyc[i].face, cycle_edges[pid][(i + 1) % m]);
            SurfaceArc& a = sc.arcs[static_cast<size_t>(cyc_a[i])];
            if (a.corner[0] < 0) {
                a.corner[0] = u;
                a.corner[1] = w;
                a.end_side[0] = su;
                a.end_side[1] = sw;
            } else if (!((a.corner[0] == u && a.corner[1] == w && a.end_side[0] == su &&
                          a.end_side[1] == sw) ||
                         (a.corner[0] == w && a.corner[1] == u && a.end_side[0] == sw &&
                          a.end_side[1] == su))) {
                throw DomainError("internal: arc endpoint orders inconsistent across faces");
            }
        }
    }
    for (const SurfaceArc& a : sc.arcs)
        if (a.piece_side[0] < 0 || a.piece_side[1] < 0 || a.corner[0] < 0)
            throw DomainError("internal: dangling arc");

    return sc;
}

std::vector<ComponentReport> components(const Triangulation& t, const SkeletonIndex& sk,
                                        const SurfaceComplex& sc) {
    const size_t np = sc.pieces.size();
    std::vector<int> comp(np, -1);
    int n_comp = 0;
    for (size_t seed = 0; seed < np; ++seed) {
        if (comp[seed] >= 0) continue;
        std::queue<size_t> bfs;
        comp[seed] = n_comp;
        bfs.push(seed);
        while (!bfs.empty()) {
            size_t cur = bfs.front();
            bfs.pop();
            for (int aid : sc.piece_arc_cycle[cur]) {
                const SurfaceArc& a = sc.arcs[static_cast<size_t>(aid)];
                for (int side = 0; side < 2; ++side) {
                    size_t other = static_cast<size_t>(a.piece_side[side]);
                    if (comp[other] < 0) {
                        comp[other] = n_comp;
                        bfs.push(other);
                    }
                }
            }
        }
        ++n_comp;
    }

    // Orientation propagation: +-1 per piece; pieces crossing an arc in the
    // same direction must take opposite signs.
    std::vector<int> orient(np, 0);
    std::vector<bool> comp_orientable(static_cast<size_t>(n_comp), true);
    {
        // arc id -> (piece, direction) occurrences
        std::vector<std::vector<std::pair<size_t, std::pair<int, int>>>> occ(sc.arcs.size());
        for (size_t pid = 0; pid < np; ++pid) {
            const auto& cyc_c = sc.piece_corner_cycle[pid];
            const auto& cyc_a = sc.piece_arc_cycle[pid];
            for (size_t i = 0; i < cyc_a.size(); ++i) {
                occ[static_cast<size_t>(cyc_a[i])].push_back(
                    {pid, {cyc_c[i], cyc_c[(i + 1) % cyc_c.size()]}});
            }
        }
        for (size_t seed = 0; seed < np; ++seed) {
            if (orient[seed] != 0) continue;
            orient[seed] = 1;
            std::queue<size_t> bfs;
            bfs.push(seed);
            while (!bfs.empty()) {
                size_t cur = bfs.front();
                bfs.pop();
                for (int aid : sc.piece_arc_cycle[cur]) {
                    const auto& o = occ[static_cast<size_t>(aid)];
                    if (o.size() != 2) throw DomainError("internal: arc without two sides");
                    size_t p1 = o[0].first, p2 = o[1].first;
                    bool same_dir = o[0].second == o[1].second;
                    int s1 = orient[p1], s2 = orient[p2];
                    if (s1 == 0 && s2 == 0) continue;
                    if (s1 != 0 && s2 == 0) {
                        orient[p2] = same_dir ? -s1 : s1;
                        bfs.push(p2);
                    } else if (s2 != 0 && s1 == 0) {
                        orient[p1] = same_dir ? -s2 : s2;
                        bfs.push(p1);
                    } else if ((same_dir && s1 == s2) || (!same_dir && s1 != s2)) {
                        comp_orientable[static_cast<size_t>(comp[p1])] = false;
                    }
                }
            }
        }
    }

    std::vector<CoordinateVector> link_vectors;
    for (int vc = 0; vc < sk.vertex_count(); ++vc)
        link_vectors.push_back(vertex_link(t, sk, vc, sc.system));

    std::vector<ComponentReport> out;
    for (int c = 0; c < n_comp; ++c) {
        ComponentReport r;
        r.component_id = c;
        r.coords = CoordinateVector::zero(sc.system, t.size());
        r.pattern.assign(static_cast<size_t>(t.size()), 0);
        int64_t n_corners = 0, n_arcs = 0, n_pieces = 0;
        std::vector<bool> corner_seen(sc.corners.size(), false);
        for (size_t pid = 0; pid < np; ++pid) {
            if (comp[pid] != c) continue;
            const PieceInstance& pi = sc.pieces[pid];
            r.piece_ids.push_back(static_cast<int>(pid));
            r.coords.at(pi.tet, pi.type.code) += 1;
            r.pattern[static_cast<size_t>(pi.tet)] |= static_cast<uint16_t>(1u << pi.type.code);
            ++n_pieces;
            for (int cid : sc.piece_corner_cycle[pid]) {
                if (!corner_seen[static_cast<size_t>(cid)]) {
                    corner_seen[static_cast<size_t>(cid)] = true;
                    ++n_corners;
                }
            }
        }
        for (const SurfaceArc& a : sc.arcs)
            if (comp[static_cast<size_t>(a.piece_side[0])] == c) ++n_arcs;
        r.chi = n_corners - n_arcs + n_pieces;
        r.orientable = comp_orientable[static_cast<size_t>(c)];
        if (r.orientable) r.genus = (2 - r.chi) / 2;
        r.is_vertex_link = std::any_of(link_vectors.begin(), link_vectors.end(),
                                       [&](const CoordinateVector& lv) { return lv == r.coords; });
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DuplicateGroup> kneser_check(const std::vector<ComponentReport>& reports, int n_tets) {
    (void)n_tets;
    std::map<std::vector<uint16_t>, std::vector<int>> groups;
    for (const ComponentReport& r : reports) groups[r.pattern].push_back(r.component_id);
    std::vector<DuplicateGroup> out;
    for (auto& [pattern, ids] : groups) {
        if (ids.size() >= 2) {
            std::sort(ids.begin(), ids.end());
            out.push_back({pattern, ids});
        }
    }
    return out;
}

std::string component_report_to_json(const ComponentReport& r) {
    nlohmann::ordered_json j;
    j["componentId"] = r.component_id;
    j["coords"] = nlohmann::ordered_json::parse(coordinates_to_json(r.coords));
    j["chi"] = r.chi;
    j["orientable"] = r.orientable;
    if (r.genus)
        j["genus"] = *r.genus;
    else
        j["genus"] = nullptr;
    j["isVertexLink"] = r.is_vertex_link;
    auto pat = nlohmann::ordered_json::array();
    for (uint16_t mask : r.pattern) {
        auto types = nlohmann::ordered_json::array();
        for (int code = 0; code < 10; ++code)
            if (mask & (1u << code)) types.push_back(PieceType{code}.str());
        pat.push_back(std::move(types));
    }
    j["pattern"] = std::move(pat);
    return j.dump();
}

}  // namespace normalkit
