#include "normalkit/skeleton.hpp"

#include <algorithm>
#include <queue>

namespace normalkit {

namespace {

// Plain union-find over dense int ids.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
    }
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
        if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

SkeletonIndex compute_skeleton(const Triangulation& t) {
    const int n = t.size();
    SkeletonIndex sk;
    sk.vertex_class_of.assign(static_cast<size_t>(n), {-1, -1, -1, -1});
    sk.edge_class_of.assign(static_cast<size_t>(n), {-1, -1, -1, -1, -1, -1});
    sk.edge_sign_of.assign(static_cast<size_t>(n), {0, 0, 0, 0, 0, 0});
    sk.face_class_of.assign(static_cast<size_t>(n), {-1, -1, -1, -1});
    sk.face_slot_of.assign(static_cast<size_t>(n), {-1, -1, -1, -1});

    // Face classes: one per glued pair, canonical slot = smallest (tet, face).
    for (int i = 0; i < n; ++i) {
        for (int f = 0; f < 4; ++f) {
            if (sk.face_class_of[static_cast<size_t>(i)][static_cast<size_t>(f)] >= 0) continue;
            const FaceGluing& g = t.gluing(i, f);
            FaceClass fc;
            fc.tet[0] = i;
            fc.face[0] = f;
            fc.tet[1] = g.tet;
            fc.face[1] = g.perm[f];
            fc.perm01 = g.perm;
            int id = static_cast<int>(sk.face_classes.size());
            sk.face_classes.push_back(fc);
            sk.face_class_of[static_cast<size_t>(i)][static_cast<size_t>(f)] = id;
            sk.face_slot_of[static_cast<size_t>(i)][static_cast<size_t>(f)] = 0;
            sk.face_class_of[static_cast<size_t>(fc.tet[1])][static_cast<size_t>(fc.face[1])] = id;
            sk.face_slot_of[static_cast<size_t>(fc.tet[1])][static_cast<size_t>(fc.face[1])] = 1;
        }
    }

    // Vertex classes: union over face gluings.
    {
        UnionFind uf(4 * n);
        auto vid = [](int tet, int v) { return 4 * tet + v; };
        for (int i = 0; i < n; ++i) {
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = t.gluing(i, f);
                for (int v = 0; v < 4; ++v)
                    if (v != f) uf.unite(vid(i, v), vid(g.tet, g.perm[v]));
            }
        }
        std::vector<int> root_to_class(static_cast<size_t>(4 * n), -1);
        for (int i = 0; i < n; ++i) {
            for (int v = 0; v < 4; ++v) {
                int r = uf.find(vid(i, v));
                if (root_to_class[static_cast<size_t>(r)] < 0) {
                    root_to_class[static_cast<size_t>(r)] = static_cast<int>(sk.vertex_classes.size());
                    sk.vertex_classes.emplace_back();
                }
                int c = root_to_class[static_cast<size_t>(r)];
                sk.vertex_class_of[static_cast<size_t>(i)][static_cast<size_t>(v)] = c;
                sk.vertex_classes[static_cast<size_t>(c)].push_back({i, v});
            }
        }
    }

    // Edge classes with orientation signs, by BFS so the sign is relative to
    // the first slot encountered (the canonical one).
    {
        auto eid = [](int tet, int e) { return 6 * tet + e; };
        std::vector<int> cls(static_cast<size_t>(6 * n), -1);
        std::vector<int> sgn(static_cast<size_t>(6 * n), 0);
        for (int i = 0; i < n; ++i) {
            for (int e = 0; e < 6; ++e) {
                if (cls[static_cast<size_t>(eid(i, e))] >= 0) continue;
                EdgeClass ec;
                int cid = static_cast<int>(sk.edge_classes.size());
                std::queue<int> bfs;
                cls[static_cast<size_t>(eid(i, e))] = cid;
                sgn[static_cast<size_t>(eid(i, e))] = 1;
                bfs.push(eid(i, e));
                while (!bfs.empty()) {
                    int cur = bfs.front();
                    bfs.pop();
                    int ct = cur / 6, ce = cur % 6;
                    ec.slots.push_back({ct, ce});
                    ec.slot_sign.push_back(sgn[static_cast<size_t>(cur)]);
                    int a = kEdgeVerts[static_cast<size_t>(ce)][0];
                    int b = kEdgeVerts[static_cast<size_t>(ce)][1];
                    for (int f = 0; f < 4; ++f) {
                        if (f == a || f == b) continue;  // gluing must contain the edge
                        const FaceGluing& g = t.gluing(ct, f);
                        int a2 = g.perm[a], b2 = g.perm[b];
                        int e2 = edge_index(a2, b2);
                        int s = ((a < b) == (a2 < b2)) ? 1 : -1;
                        int nxt = eid(g.tet, e2);
                        int want = sgn[static_cast<size_t>(cur)] * s;
                        if (cls[static_cast<size_t>(nxt)] < 0) {
                            cls[static_cast<size_t>(nxt)] = cid;
                            sgn[static_cast<size_t>(nxt)] = want;
                            bfs.push(nxt);
                        } else if (sgn[static_cast<size_t>(nxt)] != want) {
                            ec.orientation_consistent = false;
                        }
                    }
                }
                sk.edge_classes.push_back(std::move(ec));
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int e = 0; e < 6; ++e) {
                sk.edge_class_of[static_cast<size_t>(i)][static_cast<size_t>(e)] =
                    cls[static_cast<size_t>(eid(i, e))];
                sk.edge_sign_of[static_cast<size_t>(i)][static_cast<size_t>(e)] =
                    sgn[static_cast<size_t>(eid(i, e))];
            }
        }
    }

    // Orientability: try assigning +-1 per tet with or(t)*or(t') = -sign(perm).
    {
        std::vector<int> col(static_cast<size_t>(n), 0);
        bool ok = true;
        for (int start = 0; start < n && ok; ++start) {
            if (col[static_cast<size_t>(start)] != 0) continue;
            col[static_cast<size_t>(start)] = 1;
            std::queue<int> bfs;
            bfs.push(start);
            while (!bfs.empty() && ok) {
                int cur = bfs.front();
                bfs.pop();
                for (int f = 0; f < 4; ++f) {
                    const FaceGluing& g = t.gluing(cur, f);
                    int want = -g.perm.sign() * col[static_cast<size_t>(cur)];
                    if (col[static_cast<size_t>(g.tet)] == 0) {
                        col[static_cast<size_t>(g.tet)] = want;
                        bfs.push(g.tet);
                    } else if (col[static_cast<size_t>(g.tet)] != want) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        sk.orientable = ok;
    }

    return sk;
}

}  // namespace normalkit
