#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "normalkit/skeleton.hpp"
#include "normalkit/triangulation.hpp"

using namespace normalkit;

namespace {

// Independent union-find oracle used to re-derive skeleton classes from the
// raw gluing data.
struct Oracle {
    std::map<std::pair<int, int>, std::pair<int, int>> parent;
    std::pair<int, int> find(std::pair<int, int> x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void add(std::pair<int, int> x) {
        if (!parent.count(x)) parent[x] = x;
    }
    void unite(std::pair<int, int> a, std::pair<int, int> b) {
        add(a);
        add(b);
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    }
};

}  // namespace

TEST_CASE("corpus files parse and validate") {
    for (const auto& name : testutil::corpus_names()) {
        CAPTURE(name);
        Triangulation t = testutil::load_corpus(name);
        CHECK(t.size() >= 1);
        validate_triangulation(t);
    }
}

TEST_CASE("two_tet_a has n=2") {
    Triangulation t = testutil::load_corpus("two_tet_a.tri");
    CHECK(t.size() == 2);
}

TEST_CASE("non-involutive gluing is rejected") {
    // tet 0 face 0 -> tet 1 with perm 0123, but tet 1 face 0 returns with a
    // permutation that is not the inverse
    std::string text =
        "tet 0: 1(0123) 1(0123) 1(0123) 1(0123)\n"
        "tet 1: 0(0132) 0(0123) 0(0123) 0(0123)\n";
    CHECK_THROWS_AS(parse_triangulation(text), InvalidTriangulation);
}

TEST_CASE("syntax errors carry line/column information") {
    try {
        parse_triangulation("tet 0: 1(0123) 1(0123) 1(0123 1(0123)\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.col > 1);
    }
}

TEST_CASE("unglued faces are rejected") {
    // truncated line: only two gluings
    CHECK_THROWS_AS(parse_triangulation("tet 0: 0(1023) 0(1023)\n"), ParseError);
    // gluing target out of range
    CHECK_THROWS_AS(parse_triangulation("tet 0: 1(1023) 0(1023) 0(1230) 0(3012)\n"),
                    InvalidTriangulation);
    // a face glued to itself
    CHECK_THROWS_AS(parse_triangulation("tet 0: 0(0123) 0(1023) 0(1230) 0(3012)\n"),
                    InvalidTriangulation);
}

TEST_CASE("one-tetrahedron file with valid pairings parses (oracle-checked)") {
    Triangulation t = testutil::load_corpus("one_tet_a.tri");
    CHECK(t.size() == 1);
    // oracle: the face-slot pairing must be a fixed-point-free involution
    Oracle uf;
    std::map<std::pair<int, int>, int> cls;
    for (int f = 0; f < 4; ++f) uf.add({0, f});
    for (int f = 0; f < 4; ++f) {
        const FaceGluing& g = t.gluing(0, f);
        CHECK(std::make_pair(g.tet, (int)g.perm[f]) != std::make_pair(0, f));
        uf.unite({0, f}, {g.tet, g.perm[f]});
    }
    std::map<std::pair<int, int>, int> sizes;
    for (int f = 0; f < 4; ++f) sizes[uf.find({0, f})]++;
    for (auto& [root, size] : sizes) CHECK(size == 2);
}

TEST_CASE("parse/serialize round trip is exact") {
    for (const auto& name : testutil::corpus_names()) {
        CAPTURE(name);
        Triangulation t = testutil::load_corpus(name);
        std::string s = serialize_triangulation(t);
        Triangulation t2 = parse_triangulation(s);
        REQUIRE(t2.size() == t.size());
        for (int i = 0; i < t.size(); ++i)
            for (int f = 0; f < 4; ++f) {
                CHECK(t.gluing(i, f).tet == t2.gluing(i, f).tet);
                CHECK(t.gluing(i, f).perm == t2.gluing(i, f).perm);
            }
        CHECK(serialize_triangulation(t2) == s);
    }
}

TEST_CASE("skeleton counts: 2n face classes, 6n edge slots, degrees sum") {
    for (const auto& name : testutil::corpus_names()) {
        CAPTURE(name);
        Triangulation t = testutil::load_corpus(name);
        SkeletonIndex sk = compute_skeleton(t);
        CHECK(sk.face_count() == 2 * t.size());
        int64_t deg_sum = 0;
        for (const EdgeClass& ec : sk.edge_classes) {
            CHECK(ec.degree() >= 1);
            deg_sum += ec.degree();
        }
        CHECK(deg_sum == 6 * t.size());
    }
}

TEST_CASE("skeleton classes match the union-find oracle") {
    for (const auto& name : testutil::corpus_names()) {
        CAPTURE(name);
        Triangulation t = testutil::load_corpus(name);
        SkeletonIndex sk = compute_skeleton(t);

        // vertex classes
        Oracle vuf;
        for (int i = 0; i < t.size(); ++i)
            for (int v = 0; v < 4; ++v) vuf.add({4 * i + v, 0});
        for (int i = 0; i < t.size(); ++i)
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = t.gluing(i, f);
                for (int v = 0; v < 4; ++v)
                    if (v != f) vuf.unite({4 * i + v, 0}, {4 * g.tet + g.perm[v], 0});
            }
        std::map<std::pair<int, int>, int> vroots;
        for (int i = 0; i < t.size(); ++i)
            for (int v = 0; v < 4; ++v) vroots[vuf.find({4 * i + v, 0})]++;
        CHECK((int)vroots.size() == sk.vertex_count());

        // edge classes
        Oracle euf;
        for (int i = 0; i < t.size(); ++i)
            for (int e = 0; e < 6; ++e) euf.add({6 * i + e, 0});
        for (int i = 0; i < t.size(); ++i)
            for (int f = 0; f < 4; ++f) {
                const FaceGluing& g = t.gluing(i, f);
                for (int e = 0; e < 6; ++e) {
                    int a = kEdgeVerts[e][0], b = kEdgeVerts[e][1];
                    if (a == f || b == f) continue;
                    euf.unite({6 * i + e, 0}, {6 * g.tet + edge_index(g.perm[a], g.perm[b]), 0});
                }
            }
        std::map<std::pair<int, int>, int> eroots;
        for (int i = 0; i < t.size(); ++i)
            for (int e = 0; e < 6; ++e) eroots[euf.find({6 * i + e, 0})]++;
        CHECK((int)eroots.size() == sk.edge_count());
        // degree multisets agree
        std::vector<int> oracle_degs, sk_degs;
        for (auto& [r, d] : eroots) oracle_degs.push_back(d);
        for (const EdgeClass& ec : sk.edge_classes) sk_degs.push_back(ec.degree());
        std::sort(oracle_degs.begin(), oracle_degs.end());
        std::sort(sk_degs.begin(), sk_degs.end());
        CHECK(oracle_degs == sk_degs);
    }
}

TEST_CASE("one-vertex corpus triangulations have one vertex class") {
    for (const auto& name : {"one_tet_a.tri", "two_tet_b.tri", "three_tet_a.tri"}) {
        CAPTURE(name);
        SkeletonIndex sk = compute_skeleton(testutil::load_corpus(name));
        CHECK(sk.vertex_count() == 1);
    }
}

TEST_CASE("orientability via the orientation-propagation oracle") {
    for (const auto& name : testutil::corpus_names()) {
        CAPTURE(name);
        Triangulation t = testutil::load_corpus(name);
        SkeletonIndex sk = compute_skeleton(t);
        // oracle: brute-force over all sign assignments (n <= 4 here)
        int n = t.size();
        bool any = false;
        for (int mask = 0; mask < (1 << n) && !any; ++mask) {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i)
                for (int f = 0; f < 4 && ok; ++f) {
                    const FaceGluing& g = t.gluing(i, f);
                    int si = (mask >> i) & 1 ? 1 : -1;
                    int sj = (mask >> g.tet) & 1 ? 1 : -1;
                    if (si * sj != -g.perm.sign()) ok = false;
                }
            any = any || ok;
        }
        CHECK(sk.orientable == any);
        CHECK(sk.orientable);  // the corpus is orientable by construction
    }
}

TEST_CASE("relabelling tetrahedra preserves skeleton class sizes") {
    Triangulation t = testutil::load_corpus("three_tet_a.tri");
    // relabel by the cycle 0 -> 1 -> 2 -> 0
    auto relabel = [&](int x) { return (x + 1) % 3; };
    Triangulation r;
    r.glu.resize(3);
    for (int i = 0; i < 3; ++i)
        for (int f = 0; f < 4; ++f) {
            FaceGluing g = t.gluing(i, f);
            g.tet = relabel(g.tet);
            r.glu[static_cast<size_t>(relabel(i))][static_cast<size_t>(f)] = g;
        }
    validate_triangulation(r);
    SkeletonIndex a = compute_skeleton(t);
    SkeletonIndex b = compute_skeleton(r);
    auto sizes = [](const SkeletonIndex& sk) {
        std::vector<size_t> v, e;
        for (auto& c : sk.vertex_classes) v.push_back(c.size());
        for (auto& c : sk.edge_classes) e.push_back(c.slots.size());
        std::sort(v.begin(), v.end());
        std::sort(e.begin(), e.end());
        return std::make_pair(v, e);
    };
    CHECK(sizes(a) == sizes(b));
    CHECK(a.orientable == b.orientable);
}
