#include "normalkit/triangulation.hpp"

#include <cctype>
#include <sstream>

namespace normalkit {

int edge_index(int a, int b) {
    if (a > b) std::swap(a, b);
    static constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return table[a][b];
}

std::array<int, 3> face_vertices(int f) {
    std::array<int, 3> out{};
    int k = 0;
    for (int v = 0; v < 4; ++v)
        if (v != f) out[static_cast<size_t>(k++)] = v;
    return out;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool eof() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    void advance() {
        if (s[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
    void skip_ws_in_line() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
};

int parse_int(Cursor& c) {
    c.skip_ws_in_line();
    if (c.eof() || !std::isdigit(static_cast<unsigned char>(c.peek()))) c.fail("expected integer");
    long v = 0;
    while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
        v = v * 10 + (c.peek() - '0');
        if (v > 1000000) c.fail("integer out of range");
        c.advance();
    }
    return static_cast<int>(v);
}

FaceGluing parse_gluing(Cursor& c) {
    FaceGluing g;
    g.tet = parse_int(c);
    c.skip_ws_in_line();
    if (c.eof() || c.peek() != '(') c.fail("expected '('");
    c.advance();
    bool seen[4] = {false, false, false, false};
    for (int i = 0; i < 4; ++i) {
        if (c.eof() || c.peek() < '0' || c.peek() > '3') c.fail("expected digit 0-3");
        int d = c.peek() - '0';
        if (seen[d]) c.fail("permutation repeats a digit");
        seen[d] = true;
        g.perm.img[static_cast<size_t>(i)] = static_cast<uint8_t>(d);
        c.advance();
    }
    if (c.eof() || c.peek() != ')') c.fail("expected ')'");
    c.advance();
    return g;
}

}  // namespace

Triangulation parse_triangulation(const std::string& text) {
    Triangulation t;
    Cursor c{text};
    int expect_tet = 0;
    while (!c.eof()) {
        c.skip_ws_in_line();
        if (c.eof()) break;
        if (c.peek() == '\n') {
            c.advance();
            continue;
        }
        if (c.peek() == '#') {
            while (!c.eof() && c.peek() != '\n') c.advance();
            continue;
        }
        // `tet <i>: g0 g1 g2 g3`
        static const std::string kw = "tet";
        for (char ch : kw) {
            if (c.eof() || c.peek() != ch) c.fail("expected 'tet'");
            c.advance();
        }
        int idx = parse_int(c);
        if (idx != expect_tet) c.fail("tetrahedra must be numbered consecutively from 0");
        c.skip_ws_in_line();
        if (c.eof() || c.peek() != ':') c.fail("expected ':'");
        c.advance();
        std::array<FaceGluing, 4> row;
        for (int f = 0; f < 4; ++f) row[static_cast<size_t>(f)] = parse_gluing(c);
        c.skip_ws_in_line();
        if (!c.eof() && c.peek() != '\n') c.fail("trailing characters after gluings");
        t.glu.push_back(row);
        ++expect_tet;
    }
    if (t.glu.empty()) throw ParseError("no tetrahedra", c.line, c.col);
    validate_triangulation(t);
    return t;
}

std::string serialize_triangulation(const Triangulation& t) {
    std::ostringstream os;
    if (!t.name.empty()) os << "# " << t.name << "\n";
    for (int i = 0; i < t.size(); ++i) {
        os << "tet " << i << ":";
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = t.gluing(i, f);
            os << " " << g.tet << "(" << g.perm.str() << ")";
        }
        os << "\n";
    }
    return os.str();
}

void validate_triangulation(const Triangulation& t) {
    const int n = t.size();
    if (n == 0) throw InvalidTriangulation("empty triangulation");
    for (int i = 0; i < n; ++i) {
        for (int f = 0; f < 4; ++f) {
            const FaceGluing& g = t.gluing(i, f);
            if (g.tet < 0 || g.tet >= n)
                throw InvalidTriangulation("unglued face or bad target: tet " + std::to_string(i) +
                                           " face " + std::to_string(f));
            int f2 = g.perm[f];
            if (g.tet == i && f2 == f)
                throw InvalidTriangulation("face glued to itself: tet " + std::to_string(i) +
                                           " face " + std::to_string(f));
            const FaceGluing& back = t.gluing(g.tet, f2);
            if (back.tet != i || back.perm != g.perm.inverse() || back.perm[f2] != f)
                throw InvalidTriangulation("non-involutive gluing at tet " + std::to_string(i) +
                                           " face " + std::to_string(f));
        }
    }
}

}  // namespace normalkit
