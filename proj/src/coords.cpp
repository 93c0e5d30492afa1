#include "normalkit/coords.hpp"

#include <algorithm>
#include <numeric>

#include "vendor_json.hpp"

namespace normalkit {

std::string PieceType::str() const {
    static const char* names[10] = {"t0", "t1", "t2", "t3", "q01|23", "q02|13",
                                    "q03|12", "o01|23", "o02|13", "o03|12"};
    return names[code];
}

int axis_partner(int axis, int v) {
    for (const auto& pair : kAxisPairs[axis]) {
        if (pair[0] == v) return pair[1];
        if (pair[1] == v) return pair[0];
    }
    return -1;
}

bool axis_in_low(int axis, int v) {
    return kAxisPairs[axis][0][0] == v || kAxisPairs[axis][0][1] == v;
}

int piece_corner_count(PieceType p, int edge) {
    int a = kEdgeVerts[static_cast<size_t>(edge)][0];
    int b = kEdgeVerts[static_cast<size_t>(edge)][1];
    if (p.is_triangle()) return (a == p.vertex() || b == p.vertex()) ? 1 : 0;
    int ax = p.axis();
    bool is_axis_edge = (edge == kAxisEdgeLo[ax] || edge == kAxisEdgeHi[ax]);
    if (p.is_quad()) return is_axis_edge ? 0 : 1;
    return is_axis_edge ? 2 : 1;
}

std::vector<int> piece_arc_table(PieceType p, int face) {
    if (p.is_triangle()) {
        if (p.vertex() == face) return {};
        return {p.vertex()};
    }
    int ax = p.axis();
    int partner = axis_partner(ax, face);
    if (p.is_quad()) return {partner};
    // Octagon: both vertices of the pair not containing the face vertex.
    const auto& pair = axis_in_low(ax, face) ? kAxisPairs[ax][1] : kAxisPairs[ax][0];
    int w0 = pair[0], w1 = pair[1];
    if (w0 > w1) std::swap(w0, w1);
    return {w0, w1};
}

bool CoordinateVector::is_zero() const {
    return std::all_of(counts.begin(), counts.end(), [](int64_t c) { return c == 0; });
}

int64_t CoordinateVector::total_pieces() const {
    return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

int64_t CoordinateVector::octagon_total() const {
    if (system == System::OneNormal) return 0;
    int64_t s = 0;
    for (int t = 0; t < tets; ++t)
        for (int c = 7; c < 10; ++c) s += at(t, c);
    return s;
}

CoordinateVector& CoordinateVector::operator+=(const CoordinateVector& o) {
    if (system != o.system || tets != o.tets) throw DomainError("coordinate systems differ");
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
}

CoordinateVector CoordinateVector::operator+(const CoordinateVector& o) const {
    CoordinateVector r = *this;
    r += o;
    return r;
}

CoordinateVector CoordinateVector::operator*(int64_t k) const {
    CoordinateVector r = *this;
    for (auto& c : r.counts) c *= k;
    return r;
}

bool CoordinateVector::operator<(const CoordinateVector& o) const {
    return counts < o.counts;
}

std::vector<std::vector<int64_t>> matching_matrix(const Triangulation& t, const SkeletonIndex& sk,
                                                  System system) {
    const int n = t.size();
    const int per = coords_per_tet(system);
    std::vector<std::vector<int64_t>> rows;
    rows.reserve(static_cast<size_t>(6 * n));
    for (const FaceClass& fc : sk.face_classes) {
        for (int w : face_vertices(fc.face[0])) {
            std::vector<int64_t> row(static_cast<size_t>(n * per), 0);
            int w1 = fc.perm01[w];
            for (int code = 0; code < per; ++code) {
                PieceType p{code};
                for (int arc : piece_arc_table(p, fc.face[0]))
                    if (arc == w) row[static_cast<size_t>(fc.tet[0] * per + code)] += 1;
                for (int arc : piece_arc_table(p, fc.face[1]))
                    if (arc == w1) row[static_cast<size_t>(fc.tet[1] * per + code)] -= 1;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

bool is_matched(const Triangulation& t, const SkeletonIndex& sk, const CoordinateVector& v) {
    auto rows = matching_matrix(t, sk, v.system);
    for (const auto& row : rows) {
        int64_t dot = 0;
        for (size_t i = 0; i < row.size(); ++i) dot += row[i] * v.counts[i];
        if (dot != 0) return false;
    }
    return true;
}

bool is_admissible(const CoordinateVector& v) {
    const int per = v.per_tet();
    for (int t = 0; t < v.tets; ++t) {
        int saddles = 0;
        for (int code = 4; code < per; ++code)
            if (v.at(t, code) > 0) ++saddles;
        if (saddles > 1) return false;
    }
    return true;
}

namespace {

int64_t corner_count_at_slot(const CoordinateVector& v, int tet, int edge) {
    int64_t c = 0;
    for (int code = 0; code < v.per_tet(); ++code)
        c += v.at(tet, code) * piece_corner_count(PieceType{code}, edge);
    return c;
}

}  // namespace

int64_t weight(const Triangulation& t, const SkeletonIndex& sk, const CoordinateVector& v) {
    (void)t;
    int64_t total = 0;
    for (const EdgeClass& ec : sk.edge_classes) {
        int64_t c0 = corner_count_at_slot(v, ec.slots[0].tet, ec.slots[0].edge);
        for (size_t i = 1; i < ec.slots.size(); ++i) {
            int64_t ci = corner_count_at_slot(v, ec.slots[i].tet, ec.slots[i].edge);
            if (ci != c0)
                throw DomainError("corner counts disagree across an edge class (matching violated)");
        }
        total += c0;
    }
    return total;
}

int64_t euler_characteristic(const Triangulation& t, const SkeletonIndex& sk,
                             const CoordinateVector& v) {
    int64_t corners = weight(t, sk, v);
    int64_t arcs = 0;
    for (const FaceClass& fc : sk.face_classes) {
        for (int code = 0; code < v.per_tet(); ++code) {
            arcs += v.at(fc.tet[0], code) *
                    static_cast<int64_t>(piece_arc_table(PieceType{code}, fc.face[0]).size());
        }
    }
    return corners - arcs + v.total_pieces();
}

CoordinateVector vertex_link(const Triangulation& t, const SkeletonIndex& sk, int vertex_class,
                             System system) {
    CoordinateVector v = CoordinateVector::zero(system, t.size());
    for (const VertexSlot& s : sk.vertex_classes[static_cast<size_t>(vertex_class)])
        v.at(s.tet, s.vertex) += 1;
    return v;
}

std::string coordinates_to_json(const CoordinateVector& v) {
    nlohmann::ordered_json j;
    j["system"] = v.system == System::OneNormal ? "1N" : "2N";
    auto counts = nlohmann::ordered_json::array();
    for (int t = 0; t < v.tets; ++t) {
        auto row = nlohmann::ordered_json::array();
        for (int c = 0; c < v.per_tet(); ++c) row.push_back(v.at(t, c));
        counts.push_back(std::move(row));
    }
    j["counts"] = std::move(counts);
    return j.dump();
}

CoordinateVector coordinates_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what(), 1, 1);
    }
    if (!j.is_object() || !j.contains("system") || !j.contains("counts"))
        throw ParseError("expected object with 'system' and 'counts'", 1, 1);
    std::string sys = j["system"].get<std::string>();
    System system;
    if (sys == "1N")
        system = System::OneNormal;
    else if (sys == "2N")
        system = System::TwoNormal;
    else
        throw ParseError("system must be '1N' or '2N'", 1, 1);
    const auto& counts = j["counts"];
    if (!counts.is_array() || counts.empty()) throw ParseError("counts must be a non-empty array", 1, 1);
    CoordinateVector v = CoordinateVector::zero(system, static_cast<int>(counts.size()));
    for (int t = 0; t < v.tets; ++t) {
        const auto& row = counts[static_cast<size_t>(t)];
        if (!row.is_array() || static_cast<int>(row.size()) != v.per_tet())
            throw ParseError("each counts row needs " + std::to_string(v.per_tet()) + " entries", 1, 1);
        for (int c = 0; c < v.per_tet(); ++c) {
            int64_t x = row[static_cast<size_t>(c)].get<int64_t>();
            if (x < 0) throw ParseError("counts must be non-negative", 1, 1);
            v.at(t, c) = x;
        }
    }
    return v;
}

}  // namespace normalkit
