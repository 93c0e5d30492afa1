#include "normalkit/curves.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace normalkit {

// ---------------------------------------------------------------------------
// Context.

int TriContext::ring_pos(int face_class, int side) const {
    int ec = sides[static_cast<size_t>(face_class)][static_cast<size_t>(side)].edge_class;
    const EdgeRing& ring = rings[static_cast<size_t>(ec)];
    for (size_t i = 0; i < ring.germs.size(); ++i)
        if (ring.germs[i].face_class == face_class && ring.germs[i].side == side)
            return static_cast<int>(i);
    throw DomainError("internal: germ not on its edge ring");
}

namespace {

int side_index_of_pair(const std::array<int, 3>& fv, int a, int b) {
    if (a > b) std::swap(a, b);
    if (a == fv[0] && b == fv[1]) return 0;
    if (a == fv[0] && b == fv[2]) return 1;
    if (a == fv[1] && b == fv[2]) return 2;
    return -1;
}

}  // namespace

std::shared_ptr<const TriContext> make_context(const Triangulation& t) {
    Triangulation copy = t;
    SkeletonIndex sk = compute_skeleton(copy);
    return make_context(std::move(copy), std::move(sk));
}

std::shared_ptr<const TriContext> make_context(Triangulation&& t, SkeletonIndex&& sk) {
    auto ctx = std::make_shared<TriContext>();
    ctx->tri = std::move(t);
    ctx->sk = std::move(sk);
    const SkeletonIndex& s = ctx->sk;

    // Side tables per face class.
    ctx->sides.resize(static_cast<size_t>(s.face_count()));
    ctx->side_of_local.resize(static_cast<size_t>(s.face_count()));
    for (int fc = 0; fc < s.face_count(); ++fc) {
        const FaceClass& cls = s.face_classes[static_cast<size_t>(fc)];
        auto fv = face_vertices(cls.face[0]);
        const int pairs[3][2] = {{fv[0], fv[1]}, {fv[0], fv[2]}, {fv[1], fv[2]}};
        for (int j = 0; j < 3; ++j) {
            FaceSideInfo info;
            info.verts[0] = pairs[j][0];
            info.verts[1] = pairs[j][1];
            int e = edge_index(pairs[j][0], pairs[j][1]);
            info.edge_class = s.edge_class_of[static_cast<size_t>(cls.tet[0])][static_cast<size_t>(e)];
            info.min_to_max_sign =
                s.edge_sign_of[static_cast<size_t>(cls.tet[0])][static_cast<size_t>(e)];
            // canonical boundary cycle fv0 -> fv1 -> fv2 -> fv0
            if (j == 0)
                info.ccw_forward_sign = info.min_to_max_sign;       // fv0 -> fv1
            else if (j == 2)
                info.ccw_forward_sign = info.min_to_max_sign;       // fv1 -> fv2
            else
                info.ccw_forward_sign = -info.min_to_max_sign;      // fv2 -> fv0
            ctx->sides[static_cast<size_t>(fc)][static_cast<size_t>(j)] = info;
        }
        for (int slot = 0; slot < 2; ++slot) {
            auto& table = ctx->side_of_local[static_cast<size_t>(fc)][static_cast<size_t>(slot)];
            table.fill(-1);
            Perm4 to_canonical = slot == 0 ? Perm4::identity() : cls.perm01.inverse();
            for (int e = 0; e < 6; ++e) {
                int a = kEdgeVerts[static_cast<size_t>(e)][0];
                int b = kEdgeVerts[static_cast<size_t>(e)][1];
                int f_local = cls.face[slot];
                if (a == f_local || b == f_local) continue;  // edge not on this face
                table[static_cast<size_t>(e)] = side_index_of_pair(fv, to_canonical[a], to_canonical[b]);
            }
        }
    }

    // Edge rings: walk around each edge class.
    ctx->rings.resize(static_cast<size_t>(s.edge_count()));
    for (int ec = 0; ec < s.edge_count(); ++ec) {
        const EdgeClass& cls = s.edge_classes[static_cast<size_t>(ec)];
        EdgeRing ring;
        EdgeSlot start = cls.slots[0];
        int a = kEdgeVerts[static_cast<size_t>(start.edge)][0];
        int b = kEdgeVerts[static_cast<size_t>(start.edge)][1];
        std::array<int, 2> faces{};
        int k = 0;
        for (int f = 0; f < 4; ++f)
            if (f != a && f != b) faces[static_cast<size_t>(k++)] = f;
        int cur_tet = start.tet, cur_a = a, cur_b = b, enter = faces[0];
        for (;;) {
            int cur_edge = edge_index(cur_a, cur_b);
            int exit = -1;
            for (int f = 0; f < 4; ++f)
                if (f != cur_a && f != cur_b && f != enter) exit = f;
            ring.tet_slots.push_back({cur_tet, cur_edge});
            Germ g;
            g.face_class = s.face_class_of[static_cast<size_t>(cur_tet)][static_cast<size_t>(exit)];
            int slot = s.face_slot_of[static_cast<size_t>(cur_tet)][static_cast<size_t>(exit)];
            g.side = ctx->side_of_local[static_cast<size_t>(g.face_class)][static_cast<size_t>(slot)]
                                       [static_cast<size_t>(cur_edge)];
            g.slot_prev = slot;
            g.slot_next = 1 - slot;
            ring.germs.push_back(g);
            const FaceGluing& glu = ctx->tri.gluing(cur_tet, exit);
            int na = glu.perm[cur_a], nb = glu.perm[cur_b];
            int nenter = glu.perm[exit];
            cur_tet = glu.tet;
            cur_a = na;
            cur_b = nb;
            enter = nenter;
            if (cur_tet == start.tet && edge_index(cur_a, cur_b) == start.edge && enter == faces[0])
                break;
            if (ring.germs.size() > cls.slots.size() + 1)
                throw DomainError("internal: edge ring walk did not close");
        }
        if (ring.germs.size() != cls.slots.size())
            throw DomainError("internal: edge ring length mismatch");
        ctx->rings[static_cast<size_t>(ec)] = std::move(ring);
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// Basic queries.

int64_t CurveSystem::weight() const {
    int64_t w = 0;
    for (const auto& pts : points_on_edge) w += static_cast<int64_t>(pts.size());
    return w;
}

int64_t CurveSystem::surface_euler_characteristic() const {
    int64_t chi = 0;
    std::map<int, int> curve_count;
    for (const TetCurve& c : tet_curves(*this)) curve_count[c.piece] += 1;
    for (size_t p = 0; p < pieces.size(); ++p)
        if (pieces[p].alive) chi += pieces[p].chi;
    return chi;
}

int CurveSystem::point_position(int point) const {
    const auto& order = points_on_edge[static_cast<size_t>(points[static_cast<size_t>(point)].edge_class)];
    for (size_t i = 0; i < order.size(); ++i)
        if (order[i] == point) return static_cast<int>(i);
    throw DomainError("internal: point not on its edge order");
}

namespace {

// (face class, side, point) -> (arc id, end index). Every live point has
// exactly one entry per germ of its edge class.
using GermEndIndex = std::map<std::tuple<int, int, int>, std::pair<int, int>>;

GermEndIndex germ_end_index(const CurveSystem& cs) {
    GermEndIndex idx;
    for (size_t a = 0; a < cs.arcs.size(); ++a) {
        if (!cs.arcs[a].alive) continue;
        for (int e = 0; e < 2; ++e) {
            const CurveArcEnd& end = cs.arcs[a].end[e];
            auto key = std::make_tuple(cs.arcs[a].face_class, end.side, end.point);
            if (!idx.emplace(key, std::make_pair(static_cast<int>(a), e)).second)
                throw DomainError("internal: two segment ends share one germ point");
        }
    }
    return idx;
}

int left_sign_at_end(const TriContext& ctx, const CurveArc& arc, int end) {
    const FaceSideInfo& info =
        ctx.sides[static_cast<size_t>(arc.face_class)][static_cast<size_t>(arc.end[end].side)];
    // Travelling end 0 -> end 1, the left side points ccw-backward at the
    // start and ccw-forward at the finish.
    return end == 0 ? -info.ccw_forward_sign : info.ccw_forward_sign;
}

}  // namespace

// ---------------------------------------------------------------------------
// Curve traversal.

std::vector<TetCurve> tet_curves(const CurveSystem& cs) {
    const TriContext& ctx = *cs.ctx;
    GermEndIndex ends = germ_end_index(cs);
    std::vector<TetCurve> out;

    // visited[(arc, slot)] tracked as 2*arc + slot
    std::set<int64_t> visited;
    for (size_t a0 = 0; a0 < cs.arcs.size(); ++a0) {
        if (!cs.arcs[a0].alive) continue;
        for (int slot0 = 0; slot0 < 2; ++slot0) {
            if (visited.count(2 * static_cast<int64_t>(a0) + slot0)) continue;
            // A curve on the boundary of the tet seen by (a0, slot0). The
            // traversal direction along the first arc fixes the curve's
            // orientation; both directions yield the same curve.
            TetCurve curve;
            const FaceClass& fcls0 = ctx.sk.face_classes[static_cast<size_t>(cs.arcs[a0].face_class)];
            curve.tet = fcls0.tet[slot0];
            curve.piece = cs.arcs[a0].owner[slot0];
            int arc = static_cast<int>(a0);
            int slot = slot0;
            int dir = 0;
            for (;;) {
                visited.insert(2 * static_cast<int64_t>(arc) + slot);
                curve.arc_ids.push_back(arc);
                curve.arc_slot.push_back(slot);
                curve.arc_dir.push_back(dir);
                const CurveArc& cur = cs.arcs[static_cast<size_t>(arc)];
                const CurveArcEnd& out_end = cur.end[1 - dir];
                int ring_i = ctx.ring_pos(cur.face_class, out_end.side);
                int ec = ctx.sides[static_cast<size_t>(cur.face_class)][static_cast<size_t>(out_end.side)]
                             .edge_class;
                const EdgeRing& ring = ctx.rings[static_cast<size_t>(ec)];
                const int d = static_cast<int>(ring.germs.size());
                const Germ& g = ring.germs[static_cast<size_t>(ring_i)];
                int next_germ, enter_slot;
                EdgeSlot crossing{};
                if (g.slot_prev == slot) {
                    crossing = ring.tet_slots[static_cast<size_t>(ring_i)];
                    next_germ = (ring_i - 1 + d) % d;
                    enter_slot = ring.germs[static_cast<size_t>(next_germ)].slot_next;
                } else if (g.slot_next == slot) {
                    crossing = ring.tet_slots[static_cast<size_t>((ring_i + 1) % d)];
                    next_germ = (ring_i + 1) % d;
                    enter_slot = ring.germs[static_cast<size_t>(next_germ)].slot_prev;
                } else {
                    throw DomainError("internal: arc slot not adjacent to its germ");
                }
                curve.crossing.push_back(crossing);
                const Germ& ng = ring.germs[static_cast<size_t>(next_germ)];
                auto it = ends.find(std::make_tuple(ng.face_class, ng.side, out_end.point));
                if (it == ends.end()) throw DomainError("internal: missing germ end");
                int narc = it->second.first;
                int nend = it->second.second;
                arc = narc;
                slot = enter_slot;
                dir = nend;  // entering at `nend`, travelling to the other end
                if (arc == static_cast<int>(a0) && slot == slot0 && dir == 0) break;
            }
            out.push_back(std::move(curve));
        }
    }

    for (size_t c = 0; c < cs.circles.size(); ++c) {
        if (!cs.circles[c].alive) continue;
        const FaceClass& fcls =
            ctx.sk.face_classes[static_cast<size_t>(cs.circles[c].face_class)];
        for (int slot = 0; slot < 2; ++slot) {
            TetCurve curve;
            curve.tet = fcls.tet[slot];
            curve.piece = cs.circles[c].owner[slot];
            curve.is_circle = true;
            curve.circle = static_cast<int>(c);
            out.push_back(std::move(curve));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation.

void validate_curve_system(const CurveSystem& cs) {
    const TriContext& ctx = *cs.ctx;
    // Point order lists hold exactly the live points of their class.
    for (size_t ec = 0; ec < cs.points_on_edge.size(); ++ec) {
        for (int p : cs.points_on_edge[ec]) {
            if (!cs.points[static_cast<size_t>(p)].alive ||
                cs.points[static_cast<size_t>(p)].edge_class != static_cast<int>(ec))
                throw DomainError("validator: edge order lists a dead or foreign point");
        }
    }
    // Each live point has exactly one end per germ of its edge class.
    GermEndIndex ends = germ_end_index(cs);
    for (size_t p = 0; p < cs.points.size(); ++p) {
        if (!cs.points[p].alive) continue;
        int ec = cs.points[p].edge_class;
        const EdgeRing& ring = ctx.rings[static_cast<size_t>(ec)];
        for (const Germ& g : ring.germs) {
            if (!ends.count(std::make_tuple(g.face_class, g.side, static_cast<int>(p))))
                throw DomainError("validator: point missing a segment end in some germ");
        }
    }
    // Arc ends live on the right edge classes; owners alive; co-orientation
    // parity holds along every arc.
    for (const CurveArc& a : cs.arcs) {
        if (!a.alive) continue;
        for (int e = 0; e < 2; ++e) {
            const CurvePoint& pt = cs.points[static_cast<size_t>(a.end[e].point)];
            if (!pt.alive) throw DomainError("validator: arc ends at a dead point");
            const FaceSideInfo& info =
                ctx.sides[static_cast<size_t>(a.face_class)][static_cast<size_t>(a.end[e].side)];
            if (info.edge_class != pt.edge_class)
                throw DomainError("validator: arc end on wrong edge class");
        }
        for (int s = 0; s < 2; ++s)
            if (a.owner[s] < 0 || !cs.pieces[static_cast<size_t>(a.owner[s])].alive)
                throw DomainError("validator: arc owned by a dead piece");
        auto b0 = cs.points[static_cast<size_t>(a.end[0].point)].co_up;
        auto b1 = cs.points[static_cast<size_t>(a.end[1].point)].co_up;
        if (b0.has_value() != b1.has_value())
            throw DomainError("validator: half co-oriented arc");
        if (b0.has_value()) {
            bool l0 = left_sign_at_end(ctx, a, 0) > 0;
            bool l1 = left_sign_at_end(ctx, a, 1) > 0;
            if ((*b0 ^ *b1) != (l0 ^ l1))
                throw DomainError("validator: co-orientation parity violated along an arc");
        }
    }
    for (const CurveCircle& c : cs.circles) {
        if (!c.alive) continue;
        for (int s = 0; s < 2; ++s)
            if (c.owner[s] < 0 || !cs.pieces[static_cast<size_t>(c.owner[s])].alive)
                throw DomainError("validator: circle owned by a dead piece");
        if (c.parent >= 0) {
            if (!cs.circles[static_cast<size_t>(c.parent)].alive)
                throw DomainError("validator: circle nested in a dead circle");
        } else {
            if (c.anchor_side < 0) throw DomainError("validator: top-level circle without anchor");
            if (c.anchor_after >= 0 && !cs.points[static_cast<size_t>(c.anchor_after)].alive)
                throw DomainError("validator: circle anchored after a dead point");
            if (c.behind_arc >= 0 && !cs.arcs[static_cast<size_t>(c.behind_arc)].alive)
                throw DomainError("validator: circle behind a dead arc");
        }
    }
    // Curves close up, stay within one piece, and give integral genus.
    std::map<int, int> curves_of_piece;
    for (const TetCurve& c : tet_curves(cs)) {
        if (c.piece < 0 || !cs.pieces[static_cast<size_t>(c.piece)].alive)
            throw DomainError("validator: curve without live piece");
        if (cs.pieces[static_cast<size_t>(c.piece)].tet != c.tet)
            throw DomainError("validator: curve in the wrong tetrahedron");
        for (size_t i = 0; i < c.arc_ids.size(); ++i) {
            int owner = cs.arcs[static_cast<size_t>(c.arc_ids[i])].owner[c.arc_slot[i]];
            if (owner != c.piece)
                throw DomainError("validator: curve crosses pieces");
        }
        curves_of_piece[c.piece] += 1;
    }
    for (size_t p = 0; p < cs.pieces.size(); ++p) {
        if (!cs.pieces[p].alive) continue;
        int64_t c = curves_of_piece[static_cast<int>(p)];
        if (c == 0) throw DomainError("validator: piece without boundary curves");
        int64_t two_g = 2 - cs.pieces[p].chi - c;
        if (two_g < 0 || two_g % 2 != 0)
            throw DomainError("validator: piece with non-integral or negative genus");
    }
}

// ---------------------------------------------------------------------------
// Construction from coordinates.

CurveSystem from_coordinates(const Triangulation& t, const CoordinateVector& v) {
    return from_coordinates(make_context(t), v);
}

CurveSystem from_coordinates(std::shared_ptr<const TriContext> ctx, const CoordinateVector& v) {
    const TriContext& c = *ctx;
    SurfaceComplex sc = build_surface(c.tri, c.sk, v);

    CurveSystem cs;
    cs.ctx = ctx;
    cs.system = v.system;
    cs.points.resize(sc.corners.size());
    cs.points_on_edge = sc.corners_on_edge;
    for (size_t i = 0; i < sc.corners.size(); ++i) {
        cs.points[i].edge_class = sc.corners[i].edge_class;
        cs.points[i].alive = true;
    }
    cs.pieces.resize(sc.pieces.size());
    for (size_t i = 0; i < sc.pieces.size(); ++i) {
        cs.pieces[i].tet = sc.pieces[i].tet;
        cs.pieces[i].chi = 1;  // every normal piece is a disc
        cs.pieces[i].alive = true;
    }
    cs.arcs.resize(sc.arcs.size());
    for (size_t i = 0; i < sc.arcs.size(); ++i) {
        CurveArc& a = cs.arcs[i];
        a.face_class = sc.arcs[i].face_class;
        a.alive = true;
        for (int e = 0; e < 2; ++e) {
            a.end[e].side = sc.arcs[i].end_side[e];
            a.end[e].point = sc.arcs[i].corner[e];
        }
        a.owner[0] = sc.arcs[i].piece_side[0];
        a.owner[1] = sc.arcs[i].piece_side[1];
    }

    // Co-orientation: parity propagation over the point graph, one
    // component at a time, anchored at its lowest point id.
    {
        const size_t np = cs.points.size();
        std::vector<std::vector<std::pair<int, bool>>> adj(np);  // (other point, parity)
        for (const CurveArc& a : cs.arcs) {
            bool l0 = left_sign_at_end(c, a, 0) > 0;
            bool l1 = left_sign_at_end(c, a, 1) > 0;
            bool parity = l0 ^ l1;  // bit(p0) ^ bit(p1) must equal this
            adj[static_cast<size_t>(a.end[0].point)].push_back({a.end[1].point, parity});
            adj[static_cast<size_t>(a.end[1].point)].push_back({a.end[0].point, parity});
        }
        std::vector<int> state(np, -1);  // -1 unseen, else 0/1 candidate bit
        for (size_t seed = 0; seed < np; ++seed) {
            if (state[seed] != -1) continue;
            std::vector<size_t> comp;
            bool consistent = true;
            state[seed] = 1;
            std::vector<size_t> stack{seed};
            comp.push_back(seed);
            while (!stack.empty()) {
                size_t cur = stack.back();
                stack.pop_back();
                for (auto [other, parity] : adj[cur]) {
                    int want = state[cur] ^ (parity ? 1 : 0);
                    if (state[static_cast<size_t>(other)] == -1) {
                        state[static_cast<size_t>(other)] = want;
                        stack.push_back(static_cast<size_t>(other));
                        comp.push_back(static_cast<size_t>(other));
                    } else if (state[static_cast<size_t>(other)] != want) {
                        consistent = false;
                    }
                }
            }
            for (size_t p : comp) {
                if (consistent)
                    cs.points[p].co_up = state[p] == 1;
                else
                    cs.points[p].co_up = std::nullopt;
            }
        }
    }
    return cs;
}

// ---------------------------------------------------------------------------
// Piece merging helper: a tiny union-find over piece ids living inside one
// operation; merged pieces accumulate chi and the losers are marked dead.

namespace {

struct PieceMerge {
    CurveSystem& cs;
    std::map<int, int> parent;

    explicit PieceMerge(CurveSystem& cs_) : cs(cs_) {}

    int find(int p) {
        auto it = parent.find(p);
        if (it == parent.end() || it->second == p) return p;
        int r = find(it->second);
        parent[p] = r;
        return r;
    }

    // Joins two pieces with a band: chi decreases by one. Joining a piece to
    // itself attaches the band to one piece.
    void band(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) {
            cs.pieces[static_cast<size_t>(ra)].chi -= 1;
            return;
        }
        int keep = std::min(ra, rb), lose = std::max(ra, rb);
        cs.pieces[static_cast<size_t>(keep)].chi +=
            cs.pieces[static_cast<size_t>(lose)].chi - 1;
        cs.pieces[static_cast<size_t>(lose)].alive = false;
        parent[lose] = keep;
    }

    void remap_owners() {
        for (CurveArc& a : cs.arcs) {
            if (!a.alive) continue;
            a.owner[0] = find(a.owner[0]);
            a.owner[1] = find(a.owner[1]);
        }
        for (CurveCircle& c : cs.circles) {
            if (!c.alive) continue;
            c.owner[0] = find(c.owner[0]);
            c.owner[1] = find(c.owner[1]);
        }
    }
};

// Surface components for co-orientation flips: union-find over points,
// circles and pieces, connected through arcs and ownership.
struct SurfaceComponents {
    std::vector<int> parent;
    int n_points, n_circles;

    explicit SurfaceComponents(const CurveSystem& cs) {
        n_points = static_cast<int>(cs.points.size());
        n_circles = static_cast<int>(cs.circles.size());
        parent.resize(static_cast<size_t>(n_points + n_circles + cs.pieces.size()));
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        for (const CurveArc& a : cs.arcs) {
            if (!a.alive) continue;
            unite(a.end[0].point, a.end[1].point);
            unite(a.end[0].point, piece_node(a.owner[0], cs));
            unite(a.end[0].point, piece_node(a.owner[1], cs));
        }
        for (size_t c = 0; c < cs.circles.size(); ++c) {
            if (!cs.circles[c].alive) continue;
            unite(circle_node(static_cast<int>(c)), piece_node(cs.circles[c].owner[0], cs));
            unite(circle_node(static_cast<int>(c)), piece_node(cs.circles[c].owner[1], cs));
        }
    }
    int circle_node(int c) const { return n_points + c; }
    int piece_node(int p, const CurveSystem&) const { return n_points + n_circles + p; }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<size_t>(a)] = b;
    }
};

void flip_component(CurveSystem& cs, SurfaceComponents& comps, int point_in_component) {
    int root = comps.find(point_in_component);
    for (size_t p = 0; p < cs.points.size(); ++p) {
        if (!cs.points[p].alive || !cs.points[p].co_up) continue;
        if (comps.find(static_cast<int>(p)) == root) cs.points[p].co_up = !*cs.points[p].co_up;
    }
    for (size_t c = 0; c < cs.circles.size(); ++c) {
        if (!cs.circles[c].alive || !cs.circles[c].co_up_inside) continue;
        if (comps.find(comps.circle_node(static_cast<int>(c))) == root)
            cs.circles[c].co_up_inside = !*cs.circles[c].co_up_inside;
    }
}

void clear_component_coorientation(CurveSystem& cs, SurfaceComponents& comps, int node) {
    int root = comps.find(node);
    for (size_t p = 0; p < cs.points.size(); ++p)
        if (cs.points[p].alive && comps.find(static_cast<int>(p)) == root)
            cs.points[p].co_up = std::nullopt;
    for (size_t c = 0; c < cs.circles.size(); ++c)
        if (cs.circles[c].alive && comps.find(comps.circle_node(static_cast<int>(c))) == root)
            cs.circles[c].co_up_inside = std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tubes.

CurveSystem tube_in_tet(const CurveSystem& in, int tet, int piece_a, int piece_b) {
    if (piece_a == piece_b) throw DomainError("tube_in_tet needs two distinct pieces");
    auto check = [&](int p) {
        if (p < 0 || p >= static_cast<int>(in.pieces.size()) ||
            !in.pieces[static_cast<size_t>(p)].alive)
            throw DomainError("tube_in_tet: no such piece");
        if (in.pieces[static_cast<size_t>(p)].tet != tet)
            throw DomainError("tube_in_tet: piece not in that tetrahedron");
    };
    check(piece_a);
    check(piece_b);
    CurveSystem cs = in;
    // The tube is an annulus in the tetrahedron's interior: arrangements and
    // weight are untouched, the labels merge with two discs removed.
    int keep = std::min(piece_a, piece_b), lose = std::max(piece_a, piece_b);
    cs.pieces[static_cast<size_t>(keep)].chi +=
        cs.pieces[static_cast<size_t>(lose)].chi - 2;
    cs.pieces[static_cast<size_t>(lose)].alive = false;
    for (CurveArc& a : cs.arcs) {
        if (!a.alive) continue;
        for (int s = 0; s < 2; ++s)
            if (a.owner[s] == lose) a.owner[s] = keep;
    }
    for (CurveCircle& c : cs.circles) {
        if (!c.alive) continue;
        for (int s = 0; s < 2; ++s)
            if (c.owner[s] == lose) c.owner[s] = keep;
    }
    return cs;
}

namespace {

// Region walk: the cyclic boundary of the region on the left of arc
// `a0` travelled end `from0` -> other end. Yields the arcs on the region
// boundary with their traversal direction.
struct RegionElement {
    int arc = -1;
    int enter_end = -1;  // the end the region-walk enters the arc at
};

std::vector<RegionElement> region_of(const CurveSystem& cs, int face_class, int a0, int from0) {
    const TriContext& ctx = *cs.ctx;
    // Boundary order of points along each side in ccw direction.
    std::array<std::vector<int>, 3> ccw_points;
    for (int j = 0; j < 3; ++j) {
        const FaceSideInfo& info =
            ctx.sides[static_cast<size_t>(face_class)][static_cast<size_t>(j)];
        ccw_points[static_cast<size_t>(j)] =
            cs.points_on_edge[static_cast<size_t>(info.edge_class)];
        if (info.ccw_forward_sign < 0)
            std::reverse(ccw_points[static_cast<size_t>(j)].begin(),
                         ccw_points[static_cast<size_t>(j)].end());
    }
    // ccw side order around the canonical triangle fv0 -> fv1 -> fv2 -> fv0:
    // side 0 = {fv0,fv1}, side 2 = {fv1,fv2}, side 1 = {fv2,fv0}.
    static constexpr int side_cycle[3] = {0, 2, 1};
    // (side, point) -> arc end of this face's arrangement
    std::map<std::pair<int, int>, std::pair<int, int>> at;
    for (size_t a = 0; a < cs.arcs.size(); ++a) {
        if (!cs.arcs[a].alive || cs.arcs[a].face_class != face_class) continue;
        for (int e = 0; e < 2; ++e)
            at[{cs.arcs[a].end[e].side, cs.arcs[a].end[e].point}] = {static_cast<int>(a), e};
    }
    auto next_point_ccw = [&](int side, int point) -> std::pair<int, int> {
        // next boundary point strictly after `point` on this side, walking
        // ccw and wrapping across corners to the following sides
        int j = side;
        const auto& pts = ccw_points[static_cast<size_t>(j)];
        size_t i = 0;
        while (i < pts.size() && pts[i] != point) ++i;
        ++i;
        for (int hop = 0; hop < 4; ++hop) {
            const auto& cur = ccw_points[static_cast<size_t>(j)];
            if (i < cur.size()) return {j, cur[i]};
            // advance to the next side in the ccw cycle
            int pos = 0;
            while (side_cycle[pos] != j) ++pos;
            j = side_cycle[(pos + 1) % 3];
            i = 0;
        }
        throw DomainError("internal: empty face boundary walk");
    };

    std::vector<RegionElement> cycle;
    int arc = a0, enter = from0;
    for (;;) {
        cycle.push_back({arc, enter});
        const CurveArc& cur = cs.arcs[static_cast<size_t>(arc)];
        int exit = 1 - enter;
        auto [side, point] = std::pair<int, int>{cur.end[exit].side, cur.end[exit].point};
        auto [nside, npoint] = next_point_ccw(side, point);
        auto it = at.find({nside, npoint});
        if (it == at.end()) throw DomainError("internal: boundary point without arc end");
        arc = it->second.first;
        enter = it->second.second;
        if (arc == a0 && enter == from0) break;
        if (cycle.size() > 2 * cs.arcs.size() + 2)
            throw DomainError("internal: region walk did not close");
    }
    return cycle;
}

}  // namespace

CurveSystem tube_in_face(const CurveSystem& in, int face_class, int arc_a, int arc_b,
                         int corridor) {
    const TriContext& ctx = *in.ctx;
    auto check_arc = [&](int a) {
        if (a < 0 || a >= static_cast<int>(in.arcs.size()) || !in.arcs[static_cast<size_t>(a)].alive)
            throw DomainError("tube_in_face: no such arc");
        if (in.arcs[static_cast<size_t>(a)].face_class != face_class)
            throw DomainError("tube_in_face: arc not in that face");
    };
    check_arc(arc_a);
    check_arc(arc_b);
    if (arc_a == arc_b) throw DomainError("tube_in_face needs two distinct arcs");
    if (corridor != 0 && corridor != 1) throw DomainError("tube_in_face: corridor must be 0 or 1");
    for (const CurveCircle& c : in.circles)
        if (c.alive && (c.behind_arc == arc_a || c.behind_arc == arc_b))
            throw DomainError("tube_in_face: arc shields nested circles; tube not supported here");

    // corridor 0: region on arc_a's left (travelling end0 -> end1), i.e. the
    // walk entering at end 0; corridor 1: entering at end 1.
    auto cycle = region_of(in, face_class, arc_a, corridor == 0 ? 0 : 1);
    int b_pos = -1;
    for (size_t i = 0; i < cycle.size(); ++i)
        if (cycle[i].arc == arc_b) b_pos = static_cast<int>(i);
    if (b_pos < 0)
        throw DomainError("tube_in_face: corridor crosses an arrangement element (arcs share no region)");

    const CurveArc& A = in.arcs[static_cast<size_t>(arc_a)];
    const CurveArc& B = in.arcs[static_cast<size_t>(arc_b)];
    // Travelling directions within the region cycle.
    int a_enter = corridor == 0 ? 0 : 1;
    int a_exit = 1 - a_enter;
    int b_enter = cycle[static_cast<size_t>(b_pos)].enter_end;
    int b_exit = 1 - b_enter;

    CurveSystem cs = in;

    // Side classification for the co-orientation bookkeeping.
    auto b0a = in.points[static_cast<size_t>(A.end[0].point)].co_up;
    auto b0b = in.points[static_cast<size_t>(B.end[0].point)].co_up;
    SurfaceComponents comps(in);
    bool both_oriented = b0a.has_value() && b0b.has_value();
    if (both_oriented) {
        bool upper_left_a = (*b0a == (left_sign_at_end(ctx, A, 0) > 0));
        bool upper_left_b = (*b0b == (left_sign_at_end(ctx, B, 0) > 0));
        // region is on a's left iff the walk entered at end 0
        bool region_upper_a = (a_enter == 0) ? upper_left_a : !upper_left_a;
        bool region_upper_b = (b_enter == 0) ? upper_left_b : !upper_left_b;
        if (region_upper_a != region_upper_b) {
            int ra = comps.find(A.end[0].point);
            int rb = comps.find(B.end[0].point);
            if (ra == rb) {
                // a side-reversing handle on one component: one-sided now
                clear_component_coorientation(cs, comps, A.end[0].point);
            } else {
                flip_component(cs, comps, B.end[0].point);
            }
        }
    } else {
        clear_component_coorientation(cs, comps, A.end[0].point);
        clear_component_coorientation(cs, comps, B.end[0].point);
    }

    // Pieces on both sides of the face merge along the tube walls.
    PieceMerge merge(cs);
    for (int s = 0; s < 2; ++s) merge.band(A.owner[s], B.owner[s]);
    merge.remap_owners();

    // Rewire: the halves adjacent along the region boundary join.
    CurveArc n1, n2;
    n1.face_class = face_class;
    n1.alive = true;
    n1.end[0] = A.end[a_exit];
    n1.end[1] = B.end[b_enter];
    n2.face_class = face_class;
    n2.alive = true;
    n2.end[0] = A.end[a_enter];
    n2.end[1] = B.end[b_exit];
    for (int s = 0; s < 2; ++s) {
        n1.owner[s] = merge.find(A.owner[s]);
        n2.owner[s] = merge.find(A.owner[s]);
    }
    cs.arcs[static_cast<size_t>(arc_a)].alive = false;
    cs.arcs[static_cast<size_t>(arc_b)].alive = false;
    cs.arcs.push_back(n1);
    cs.arcs.push_back(n2);
    return cs;
}

// ---------------------------------------------------------------------------
// Returns and discs.

std::vector<ReturnArc> find_returns(const CurveSystem& cs) {
    std::vector<ReturnArc> out;
    for (size_t a = 0; a < cs.arcs.size(); ++a) {
        if (!cs.arcs[a].alive) continue;
        if (cs.arcs[a].end[0].side == cs.arcs[a].end[1].side)
            out.push_back({cs.arcs[a].face_class, static_cast<int>(a)});
    }
    std::sort(out.begin(), out.end(), [](const ReturnArc& x, const ReturnArc& y) {
        if (x.face_class != y.face_class) return x.face_class < y.face_class;
        return x.arc < y.arc;
    });
    return out;
}

namespace {

std::optional<T2Disc> classify_return(const CurveSystem& cs, int arc_id) {
    const CurveArc& a = cs.arcs[static_cast<size_t>(arc_id)];
    T2Disc d;
    d.face_class = a.face_class;
    d.side = a.end[0].side;
    d.arc = arc_id;
    int p0 = a.end[0].point, p1 = a.end[1].point;
    int q0 = cs.point_position(p0), q1 = cs.point_position(p1);
    d.point_lo = q0 < q1 ? p0 : p1;
    d.point_hi = q0 < q1 ? p1 : p0;
    auto bit = cs.points[static_cast<size_t>(d.point_lo)].co_up;
    if (!bit) return std::nullopt;  // un-co-oriented component: side unknown
    // The region lies towards the higher point, i.e. on the lower point's
    // positive side.
    d.disc_side = *bit ? DiscSide::Upper : DiscSide::Lower;
    bool adjacent = cs.point_position(d.point_hi) == cs.point_position(d.point_lo) + 1;
    bool circle_blocked = false;
    for (const CurveCircle& c : cs.circles) {
        if (!c.alive || c.parent >= 0) continue;
        if (c.behind_arc == arc_id) circle_blocked = true;
        if (c.behind_arc < 0 && c.face_class == a.face_class && c.anchor_side == d.side &&
            c.anchor_after == d.point_lo)
            circle_blocked = true;
    }
    d.strict = adjacent && !circle_blocked;
    return d;
}

}  // namespace

std::vector<T2Disc> find_t2_discs(const CurveSystem& cs, DiscSide side) {
    std::vector<T2Disc> out;
    for (const ReturnArc& r : find_returns(cs)) {
        auto d = classify_return(cs, r.arc);
        if (d && d->disc_side == side) out.push_back(*d);
    }
    std::sort(out.begin(), out.end(), [&](const T2Disc& x, const T2Disc& y) {
        if (x.face_class != y.face_class) return x.face_class < y.face_class;
        if (x.side != y.side) return x.side < y.side;
        return cs.point_position(x.point_lo) < cs.point_position(y.point_lo);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Elementary reduction.

CurveSystem elementary_reduction(const CurveSystem& in, const T2Disc& disc) {
    const TriContext& ctx = *in.ctx;
    // Staleness checks: the disc must still describe a strict return.
    if (disc.arc < 0 || disc.arc >= static_cast<int>(in.arcs.size()) ||
        !in.arcs[static_cast<size_t>(disc.arc)].alive)
        throw DomainError("elementary_reduction: stale disc (arc gone)");
    const CurveArc beta = in.arcs[static_cast<size_t>(disc.arc)];
    if (beta.end[0].side != beta.end[1].side || beta.end[0].side != disc.side ||
        beta.face_class != disc.face_class)
        throw DomainError("elementary_reduction: stale disc (not that return)");
    {
        std::set<int> want{disc.point_lo, disc.point_hi};
        std::set<int> have{beta.end[0].point, beta.end[1].point};
        if (want != have) throw DomainError("elementary_reduction: stale disc (endpoints moved)");
    }
    auto fresh = classify_return(in, disc.arc);
    if (!fresh || !fresh->strict)
        throw DomainError("elementary_reduction: disc is not strict");

    const int p = disc.point_lo;
    const int q = disc.point_hi;
    const int ec =
        ctx.sides[static_cast<size_t>(disc.face_class)][static_cast<size_t>(disc.side)].edge_class;
    const EdgeRing& ring = ctx.rings[static_cast<size_t>(ec)];
    const int d = static_cast<int>(ring.germs.size());
    const int i0 = ctx.ring_pos(disc.face_class, disc.side);

    CurveSystem cs = in;
    GermEndIndex ends = germ_end_index(in);
    auto end_at = [&](const Germ& g, int point) {
        auto it = ends.find(std::make_tuple(g.face_class, g.side, point));
        if (it == ends.end()) throw DomainError("internal: missing germ end");
        return it->second;  // (arc, end index)
    };

    // Pieces through p and q join across every tetrahedron around the edge
    // except the two bounding the disc's face germ.
    PieceMerge merge(cs);
    for (int k = 0; k < d; ++k) {
        if (k == i0 || k == (i0 + 1) % d) continue;
        const Germ& g = ring.germs[static_cast<size_t>(k)];  // germ after slot k
        auto [ap, ep] = end_at(g, p);
        auto [aq, eq] = end_at(g, q);
        (void)ep;
        (void)eq;
        int side_slot = g.slot_prev;  // faces tet_slots[k]
        merge.band(cs.arcs[static_cast<size_t>(ap)].owner[side_slot],
                   cs.arcs[static_cast<size_t>(aq)].owner[side_slot]);
    }
    merge.remap_owners();

    // Capture the inside co-orientation before the points die.
    auto bit_p = in.points[static_cast<size_t>(p)].co_up;

    // Rewire every germ other than the disc's.
    for (int k = 0; k < d; ++k) {
        if (k == i0) continue;
        const Germ& g = ring.germs[static_cast<size_t>(k)];
        auto [ap, ep] = end_at(g, p);
        auto [aq, eq] = end_at(g, q);
        if (ap == static_cast<int>(disc.arc) || aq == static_cast<int>(disc.arc))
            throw DomainError("internal: base return appears in a foreign germ");
        if (ap == aq) {
            // A return from p to q hugging this germ closes into a circle.
            CurveCircle circ;
            circ.face_class = g.face_class;
            circ.alive = true;
            circ.anchor_side = g.side;
            circ.behind_arc = -1;
            circ.owner[0] = cs.arcs[static_cast<size_t>(ap)].owner[0];
            circ.owner[1] = cs.arcs[static_cast<size_t>(ap)].owner[1];
            if (bit_p) circ.co_up_inside = *bit_p;
            int circ_id = static_cast<int>(cs.circles.size());
            // Circles parked in the closing gap, or shielded behind the
            // closing return, nest inside the new circle.
            for (size_t c = 0; c < cs.circles.size(); ++c) {
                CurveCircle& other = cs.circles[c];
                if (!other.alive || other.parent >= 0) continue;
                bool swallowed = other.behind_arc == ap ||
                                 (other.behind_arc < 0 && other.face_class == g.face_class &&
                                  other.anchor_side == g.side && other.anchor_after == p);
                if (swallowed) {
                    other.parent = circ_id;
                    other.anchor_side = -2;
                    other.anchor_after = -2;
                    other.behind_arc = -1;
                }
            }
            cs.arcs[static_cast<size_t>(ap)].alive = false;
            cs.circles.push_back(circ);
        } else {
            const CurveArc& A = cs.arcs[static_cast<size_t>(ap)];
            const CurveArc& B = cs.arcs[static_cast<size_t>(aq)];
            CurveArc joined;
            joined.face_class = g.face_class;
            joined.alive = true;
            joined.end[0] = A.end[1 - ep];
            joined.end[1] = B.end[1 - eq];
            for (int s = 0; s < 2; ++s) {
                if (A.owner[s] != B.owner[s])
                    throw DomainError("internal: concatenation across distinct pieces");
                joined.owner[s] = A.owner[s];
            }
            int joined_id = static_cast<int>(cs.arcs.size());
            // Circles parked in the (p,q) gap of this germ slide behind the
            // joined segment; shields carry over.
            for (CurveCircle& other : cs.circles) {
                if (!other.alive || other.parent >= 0) continue;
                if (other.face_class == g.face_class && other.anchor_side == g.side &&
                    other.anchor_after == p && other.behind_arc < 0) {
                    other.behind_arc = joined_id;
                } else if (other.behind_arc == ap || other.behind_arc == aq) {
                    other.behind_arc = joined_id;
                }
            }
            cs.arcs[static_cast<size_t>(ap)].alive = false;
            cs.arcs[static_cast<size_t>(aq)].alive = false;
            cs.arcs.push_back(joined);
        }
    }
    cs.arcs[static_cast<size_t>(disc.arc)].alive = false;

    // Remove the string endpoints and rebase circle anchors that referenced
    // them.
    int pred = -1;
    {
        auto& order = cs.points_on_edge[static_cast<size_t>(ec)];
        int pos_p = cs.point_position(p);
        if (pos_p > 0) pred = order[static_cast<size_t>(pos_p - 1)];
        order.erase(std::remove_if(order.begin(), order.end(),
                                   [&](int x) { return x == p || x == q; }),
                    order.end());
    }
    cs.points[static_cast<size_t>(p)].alive = false;
    cs.points[static_cast<size_t>(q)].alive = false;
    for (CurveCircle& c : cs.circles) {
        if (!c.alive || c.parent >= 0) continue;
        if (c.anchor_after == p || c.anchor_after == q) c.anchor_after = pred;
    }
    return cs;
}

// ---------------------------------------------------------------------------
// Normalization loop.

std::pair<CurveSystem, ReductionTrace> normalize(const CurveSystem& in, DiscSide side,
                                                 int64_t step_limit) {
    if (step_limit < 0) throw DomainError("normalize: step_limit must be >= 0");
    CurveSystem cs = in;
    ReductionTrace trace;
    for (;;) {
        std::vector<T2Disc> discs = find_t2_discs(cs, side);
        const T2Disc* pick = nullptr;
        for (const T2Disc& d : discs) {
            if (d.strict) {
                pick = &d;
                break;  // discs are already in canonical order
            }
        }
        if (!pick) {
            if (find_returns(cs).empty()) {
                trace.outcome = NormalizeOutcome::Normalized;
                trace.k = k_normality(cs).k;
            } else {
                trace.outcome = NormalizeOutcome::Obstructed;
            }
            return {std::move(cs), std::move(trace)};
        }
        if (static_cast<int64_t>(trace.steps.size()) >= step_limit) {
            trace.outcome = NormalizeOutcome::StepLimit;
            return {std::move(cs), std::move(trace)};
        }
        ReductionStep step;
        step.disc = *pick;
        step.weight_before = cs.weight();
        cs = elementary_reduction(cs, *pick);
        step.weight_after = cs.weight();
        trace.steps.push_back(step);
    }
}

// ---------------------------------------------------------------------------
// k-normality and cut.

KNormality k_normality(const CurveSystem& cs) {
    KNormality out;
    auto returns = find_returns(cs);
    if (!returns.empty()) {
        out.obstruction = "return in face class " + std::to_string(returns[0].face_class) +
                          " (arc " + std::to_string(returns[0].arc) + ")";
        return out;
    }
    int k = 1;  // the empty surface is 1-normal
    for (const TetCurve& c : tet_curves(cs)) {
        if (c.is_circle) continue;
        std::map<std::pair<int, int>, int> crossings;  // (tet, local edge) -> count
        for (const EdgeSlot& s : c.crossing) crossings[{s.tet, s.edge}] += 1;
        for (const auto& [slot, count] : crossings) k = std::max(k, count);
    }
    out.k = k;
    return out;
}

CoordinateVector cut(const CurveSystem& cs) {
    const TriContext& ctx = *cs.ctx;
    if (!find_returns(cs).empty()) throw DomainError("cut requires a system without returns");
    const int n = ctx.tri.size();
    const int per = coords_per_tet(cs.system);

    // Count normal arcs per (face class, canonical cut vertex).
    std::map<std::pair<int, int>, int64_t> arc_count;
    for (const CurveArc& a : cs.arcs) {
        if (!a.alive) continue;
        const FaceSideInfo& s0 =
            ctx.sides[static_cast<size_t>(a.face_class)][static_cast<size_t>(a.end[0].side)];
        const FaceSideInfo& s1 =
            ctx.sides[static_cast<size_t>(a.face_class)][static_cast<size_t>(a.end[1].side)];
        int w = -1;
        for (int u : {s0.verts[0], s0.verts[1]})
            for (int v : {s1.verts[0], s1.verts[1]})
                if (u == v) w = u;
        if (w < 0) throw DomainError("internal: normal arc without a cut vertex");
        arc_count[{a.face_class, w}] += 1;
    }

    auto local_count = [&](int tet, int face, int v) -> int64_t {
        int fc = ctx.sk.face_class_of[static_cast<size_t>(tet)][static_cast<size_t>(face)];
        int slot = ctx.sk.face_slot_of[static_cast<size_t>(tet)][static_cast<size_t>(face)];
        int w = slot == 0 ? v : ctx.sk.face_classes[static_cast<size_t>(fc)].perm01.inverse()[v];
        auto it = arc_count.find({fc, w});
        return it == arc_count.end() ? 0 : it->second;
    };

    CoordinateVector out = CoordinateVector::zero(cs.system, n);
    for (int tet = 0; tet < n; ++tet) {
        // The 12 equations count(f, v) = t_v + s * inc(kind, f, v) determine
        // the per-tet counts; try every saddle kind and insist on a unique
        // solution.
        std::vector<std::array<int64_t, 10>> solutions;
        for (int kind = -1; kind < per; kind = kind < 4 ? 4 : kind + 1) {
            std::array<int64_t, 10> sol{};
            bool ok = true;
            int64_t s = -1;
            // inc table for this kind
            auto inc = [&](int f, int v) -> int {
                if (kind < 0) return 0;
                for (int arcv : piece_arc_table(PieceType{kind}, f))
                    if (arcv == v) return 1;
                return 0;
            };
            // t_v from a saddle-free equation
            for (int v = 0; v < 4 && ok; ++v) {
                int64_t tv = -1;
                for (int f = 0; f < 4; ++f) {
                    if (f == v || inc(f, v)) continue;
                    tv = local_count(tet, f, v);
                    break;
                }
                if (tv < 0) ok = false;
                else sol[static_cast<size_t>(v)] = tv;
            }
            // s from any saddled equation
            if (ok && kind >= 0) {
                for (int f = 0; f < 4 && s < 0; ++f)
                    for (int v : face_vertices(f))
                        if (inc(f, v)) {
                            s = local_count(tet, f, v) - sol[static_cast<size_t>(v)];
                            break;
                        }
                if (s < 1) ok = false;  // zero saddles duplicates kind = -1
                else sol[static_cast<size_t>(kind)] = s;
            }
            // verify all equations
            for (int f = 0; f < 4 && ok; ++f)
                for (int v : face_vertices(f)) {
                    int64_t want = sol[static_cast<size_t>(v)] +
                                   (kind >= 0 ? sol[static_cast<size_t>(kind)] * inc(f, v) : 0);
                    if (want != local_count(tet, f, v)) ok = false;
                }
            if (ok) {
                bool dup = false;
                for (const auto& prev : solutions)
                    if (prev == sol) dup = true;
                if (!dup) solutions.push_back(sol);
            }
        }
        if (solutions.empty())
            throw DomainError("cut: arc counts not realizable by normal pieces in tet " +
                              std::to_string(tet));
        if (solutions.size() > 1)
            throw DomainError("cut: ambiguous piece counts in tet " + std::to_string(tet));
        for (int code = 0; code < per; ++code)
            out.at(tet, code) = solutions[0][static_cast<size_t>(code)];
    }

    if (!is_matched(ctx.tri, ctx.sk, out))
        throw DomainError("internal: cut produced an unmatched vector");
    if (weight(ctx.tri, ctx.sk, out) != cs.weight())
        throw DomainError("internal: cut changed the weight");
    return out;
}

}  // namespace normalkit
