#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "normalkit/coords.hpp"
#include "normalkit/surface.hpp"

namespace normalkit {

struct EnumerationStats {
    int64_t rays_examined = 0;  // extreme rays of the matching cone
    int64_t rays_kept = 0;      // after the admissibility filter
    int64_t steps = 0;          // pair combinations tested by double description
};

struct EnumerationResult {
    std::vector<CoordinateVector> rays;  // admissible, primitive, sorted by (weight, counts)
    EnumerationStats stats;
};

// Extreme rays of {v >= 0, matching(v) = 0} by the double description
// method in exact big-integer arithmetic, scaled primitive, then filtered
// for admissibility. Rows are inserted sparsest-first. `ray_cap` bounds the
// intermediate ray count; DomainError when exceeded.
EnumerationResult enumerate_vertex_surfaces(const Triangulation& t, const SkeletonIndex& sk,
                                            System system, int64_t ray_cap = 200000);

// Exhaustive branch-and-bound: all matched admissible vectors of weight at
// most max_weight (and, when given, total octagon count exactly
// octagon_total), sorted by (weight, counts). The zero vector qualifies.
// `threads` <= 0 means use the NORMALKIT_THREADS environment setting or the
// hardware default.
std::vector<CoordinateVector> enumerate_bounded(const Triangulation& t, const SkeletonIndex& sk,
                                                System system, int64_t max_weight,
                                                std::optional<int64_t> octagon_total = std::nullopt,
                                                int threads = 0);

struct OctagonCandidate {
    CoordinateVector coords;
    int64_t chi = 0;
    int component_count = 0;
};

// All matched admissible 2-normal vectors of weight <= max_weight carrying
// exactly one octagon, with derived data.
std::vector<OctagonCandidate> find_octagonal_candidates(const Triangulation& t,
                                                        const SkeletonIndex& sk, int64_t max_weight,
                                                        int threads = 0);

// Connected 1-normal sphere candidates among vertex surfaces and their
// small sums (multisets of at most sum_depth rays, admissible).
std::vector<CoordinateVector> find_normal_spheres(const Triangulation& t, const SkeletonIndex& sk,
                                                  int sum_depth = 2);

// Resolves the effective thread count (>=1) from an explicit request or the
// NORMALKIT_THREADS environment variable.
int resolve_threads(int requested);

}  // namespace normalkit
