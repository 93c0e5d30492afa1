#include "normalkit/enumerate.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>

namespace normalkit {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NORMALKIT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

namespace {

// ---------------------------------------------------------------------------
// Double description on the cone {x >= 0, Ax = 0}.

struct BigRay {
    std::vector<mpz_class> x;
    uint64_t zero_mask = 0;  // bit i set iff x[i] == 0 (dimension <= 64 here)
};

void make_primitive(std::vector<mpz_class>& x) {
    mpz_class g = 0;
    for (const auto& c : x) g = gcd(g, c);
    if (g > 1)
        for (auto& c : x) c /= g;
}

uint64_t zero_mask_of(const std::vector<mpz_class>& x) {
    uint64_t m = 0;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] == 0) m |= (uint64_t{1} << i);
    return m;
}

}  // namespace

EnumerationResult enumerate_vertex_surfaces(const Triangulation& t, const SkeletonIndex& sk,
                                            System system, int64_t ray_cap) {
    const int n = t.size();
    const int d = n * coords_per_tet(system);
    if (d > 64) throw DomainError("triangulation too large for this enumerator (more than 64 coordinates)");

    auto rows = matching_matrix(t, sk, system);
    // Sparsest rows first, ties lexicographic, for small intermediate sets
    // and a deterministic pivot order.
    std::stable_sort(rows.begin(), rows.end(),
                     [](const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
                         auto nz = [](const std::vector<int64_t>& r) {
                             return std::count_if(r.begin(), r.end(),
                                                  [](int64_t v) { return v != 0; });
                         };
                         auto na = nz(a), nb = nz(b);
                         if (na != nb) return na < nb;
                         return a < b;
                     });

    EnumerationResult res;
    std::vector<BigRay> rays;
    rays.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        BigRay r;
        r.x.assign(static_cast<size_t>(d), 0);
        r.x[static_cast<size_t>(i)] = 1;
        r.zero_mask = zero_mask_of(r.x);
        rays.push_back(std::move(r));
    }

    for (const auto& row : rows) {
        std::vector<mpz_class> dot(rays.size());
        for (size_t i = 0; i < rays.size(); ++i) {
            mpz_class s = 0;
            for (int j = 0; j < d; ++j)
                if (row[static_cast<size_t>(j)] != 0)
                    s += mpz_class(static_cast<long>(row[static_cast<size_t>(j)])) *
                         rays[i].x[static_cast<size_t>(j)];
            dot[i] = s;
        }
        std::vector<size_t> pos, neg, zero;
        for (size_t i = 0; i < rays.size(); ++i) {
            int c = sgn(dot[i]);
            if (c > 0)
                pos.push_back(i);
            else if (c < 0)
                neg.push_back(i);
            else
                zero.push_back(i);
        }
        std::vector<BigRay> next;
        next.reserve(zero.size() + pos.size() * neg.size() / 4 + 1);
        for (size_t ip : pos) {
            for (size_t in : neg) {
                ++res.stats.steps;
                // Combinatorial adjacency: no third ray's zero set contains
                // the common zero set of the pair.
                uint64_t common = rays[ip].zero_mask & rays[in].zero_mask;
                bool adjacent = true;
                for (size_t k = 0; k < rays.size() && adjacent; ++k) {
                    if (k == ip || k == in) continue;
                    if ((rays[k].zero_mask & common) == common) adjacent = false;
                }
                if (!adjacent) continue;
                BigRay r;
                r.x.assign(static_cast<size_t>(d), 0);
                for (int j = 0; j < d; ++j)
                    r.x[static_cast<size_t>(j)] = dot[ip] * rays[in].x[static_cast<size_t>(j)] -
                                                  dot[in] * rays[ip].x[static_cast<size_t>(j)];
                make_primitive(r.x);
                r.zero_mask = zero_mask_of(r.x);
                next.push_back(std::move(r));
                if (static_cast<int64_t>(next.size() + zero.size()) > ray_cap)
                    throw DomainError("double description ray cap exceeded");
            }
        }
        for (size_t i : zero) next.push_back(std::move(rays[i]));
        rays = std::move(next);
    }

    res.stats.rays_examined = static_cast<int64_t>(rays.size());

    std::vector<CoordinateVector> kept;
    for (const BigRay& r : rays) {
        CoordinateVector v = CoordinateVector::zero(system, n);
        bool fits = true;
        for (int j = 0; j < d && fits; ++j) {
            if (!r.x[static_cast<size_t>(j)].fits_slong_p())
                fits = false;
            else
                v.counts[static_cast<size_t>(j)] =
                    static_cast<int64_t>(r.x[static_cast<size_t>(j)].get_si());
        }
        if (!fits) throw DomainError("extreme ray does not fit in 64-bit counts");
        if (is_admissible(v)) kept.push_back(std::move(v));
    }
    res.stats.rays_kept = static_cast<int64_t>(kept.size());

    std::sort(kept.begin(), kept.end(), [&](const CoordinateVector& a, const CoordinateVector& b) {
        int64_t wa = weight(t, sk, a), wb = weight(t, sk, b);
        if (wa != wb) return wa < wb;
        return a.counts < b.counts;
    });
    res.rays = std::move(kept);
    return res;
}

// ---------------------------------------------------------------------------
// Exhaustive bounded enumeration.

namespace {

class BoundedSearch {
  public:
    BoundedSearch(const Triangulation& t, const SkeletonIndex& sk, System sys, int64_t w,
                  std::optional<int64_t> oct)
        : tri_(t), sk_(sk), system_(sys), max_weight_(w), octagon_total_(oct) {
        n_ = tri_.size();
        per_ = coords_per_tet(system_);
        slots_of_class_.resize(static_cast<size_t>(sk_.edge_count()));
        classes_after_tet_.assign(static_cast<size_t>(n_), {});
        for (int ec = 0; ec < sk_.edge_count(); ++ec) {
            int last = 0;
            for (const EdgeSlot& s : sk_.edge_classes[static_cast<size_t>(ec)].slots) {
                slots_of_class_[static_cast<size_t>(ec)].push_back(6 * s.tet + s.edge);
                last = std::max(last, s.tet);
            }
            classes_after_tet_[static_cast<size_t>(last)].push_back(ec);
        }
        rows_ = matching_matrix(tri_, sk_, system_);
        rows_after_tet_.assign(static_cast<size_t>(n_), {});
        for (size_t r = 0; r < rows_.size(); ++r) {
            const FaceClass& fc = sk_.face_classes[r / 3];
            rows_after_tet_[static_cast<size_t>(std::max(fc.tet[0], fc.tet[1]))].push_back(
                static_cast<int>(r));
        }
    }

    struct State {
        std::vector<int64_t> v;
        std::vector<int64_t> slot_sum;
        std::vector<int64_t> class_max;
        int64_t lb = 0;
        int64_t oct_sum = 0;
    };

    State fresh_state() const {
        State s;
        s.v.assign(static_cast<size_t>(n_ * per_), 0);
        s.slot_sum.assign(static_cast<size_t>(6 * n_), 0);
        s.class_max.assign(static_cast<size_t>(sk_.edge_count()), 0);
        return s;
    }

    int tets() const { return n_; }
    int per_tet() const { return per_; }
    System system() const { return system_; }
    std::optional<int64_t> octagon_total() const { return octagon_total_; }

    void apply(State& s, int tet, int code, int64_t delta) const {
        PieceType p{code};
        for (int e = 0; e < 6; ++e) {
            int cc = piece_corner_count(p, e);
            if (cc == 0) continue;
            int flat = 6 * tet + e;
            s.slot_sum[static_cast<size_t>(flat)] += delta * cc;
            int ec = sk_.edge_class_of[static_cast<size_t>(tet)][static_cast<size_t>(e)];
            int64_t m = 0;
            for (int sl : slots_of_class_[static_cast<size_t>(ec)])
                m = std::max(m, s.slot_sum[static_cast<size_t>(sl)]);
            s.lb += m - s.class_max[static_cast<size_t>(ec)];
            s.class_max[static_cast<size_t>(ec)] = m;
        }
        if (p.is_octagon()) s.oct_sum += delta;
    }

    bool checks_after_tet(const State& s, int tet) const {
        for (int r : rows_after_tet_[static_cast<size_t>(tet)]) {
            int64_t dot = 0;
            const auto& row = rows_[static_cast<size_t>(r)];
            for (size_t j = 0; j < row.size(); ++j)
                if (row[j] != 0) dot += row[j] * s.v[j];
            if (dot != 0) return false;
        }
        for (int ec : classes_after_tet_[static_cast<size_t>(tet)]) {
            const auto& slots = slots_of_class_[static_cast<size_t>(ec)];
            for (size_t i = 1; i < slots.size(); ++i)
                if (s.slot_sum[static_cast<size_t>(slots[i])] !=
                    s.slot_sum[static_cast<size_t>(slots[0])])
                    return false;
        }
        return true;
    }

    // DFS over codes of tets [tet_from, tet_to); calls leaf() when done.
    void dfs(State& s, int tet_from, int tet_to, const std::function<void(State&)>& leaf) const {
        if (tet_from == tet_to) {
            leaf(s);
            return;
        }
        dfs_code(s, tet_from, 0, tet_to, leaf);
    }

  private:
    void dfs_code(State& s, int tet, int code, int tet_to,
                  const std::function<void(State&)>& leaf) const {
        if (code == per_) {
            if (checks_after_tet(s, tet)) dfs(s, tet + 1, tet_to, leaf);
            return;
        }
        bool blocked = false;
        if (code >= 4) {
            for (int c2 = 4; c2 < per_; ++c2)
                if (c2 != code && s.v[static_cast<size_t>(tet * per_ + c2)] > 0) {
                    blocked = true;
                    break;
                }
        }
        int64_t val = 0;
        for (;;) {
            s.v[static_cast<size_t>(tet * per_ + code)] = val;
            dfs_code(s, tet, code + 1, tet_to, leaf);
            if (blocked) break;
            apply(s, tet, code, 1);
            ++val;
            if (s.lb > max_weight_ || (octagon_total_ && s.oct_sum > *octagon_total_)) break;
        }
        apply(s, tet, code, -val);
        s.v[static_cast<size_t>(tet * per_ + code)] = 0;
    }

    const Triangulation& tri_;
    const SkeletonIndex& sk_;
    System system_;
    int64_t max_weight_;
    std::optional<int64_t> octagon_total_;
    int n_ = 0;
    int per_ = 0;
    std::vector<std::vector<int>> slots_of_class_;
    std::vector<std::vector<int>> rows_after_tet_;
    std::vector<std::vector<int>> classes_after_tet_;
    std::vector<std::vector<int64_t>> rows_;
};

}  // namespace

std::vector<CoordinateVector> enumerate_bounded(const Triangulation& t, const SkeletonIndex& sk,
                                                System system, int64_t max_weight,
                                                std::optional<int64_t> octagon_total, int threads) {
    if (max_weight < 0) throw DomainError("max_weight must be >= 0");
    BoundedSearch bs(t, sk, system, max_weight, octagon_total);

    // Tet-0 assignments become parallel work items; the final sort makes the
    // output independent of the schedule.
    std::vector<std::vector<int64_t>> prefixes;
    {
        BoundedSearch::State s = bs.fresh_state();
        bs.dfs(s, 0, 1, [&](BoundedSearch::State& st) {
            prefixes.emplace_back(st.v.begin(), st.v.begin() + bs.per_tet());
        });
    }

    const int nthreads =
        std::max(1, std::min(resolve_threads(threads),
                             static_cast<int>(prefixes.empty() ? 1 : prefixes.size())));
    std::vector<std::vector<CoordinateVector>> results(prefixes.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= prefixes.size()) break;
            BoundedSearch::State s = bs.fresh_state();
            for (int code = 0; code < bs.per_tet(); ++code) {
                int64_t val = prefixes[i][static_cast<size_t>(code)];
                if (val != 0) bs.apply(s, 0, code, val);
                s.v[static_cast<size_t>(code)] = val;
            }
            bs.dfs(s, 1, bs.tets(), [&](BoundedSearch::State& st) {
                if (bs.octagon_total() && st.oct_sum != *bs.octagon_total()) return;
                CoordinateVector cv = CoordinateVector::zero(system, bs.tets());
                cv.counts = st.v;
                results[i].push_back(std::move(cv));
            });
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<CoordinateVector> out;
    for (auto& part : results)
        for (auto& v : part) out.push_back(std::move(v));
    std::sort(out.begin(), out.end(), [&](const CoordinateVector& a, const CoordinateVector& b) {
        int64_t wa = weight(t, sk, a), wb = weight(t, sk, b);
        if (wa != wb) return wa < wb;
        return a.counts < b.counts;
    });
    return out;
}

std::vector<OctagonCandidate> find_octagonal_candidates(const Triangulation& t,
                                                        const SkeletonIndex& sk, int64_t max_weight,
                                                        int threads) {
    std::vector<OctagonCandidate> out;
    for (CoordinateVector& v :
         enumerate_bounded(t, sk, System::TwoNormal, max_weight, int64_t{1}, threads)) {
        OctagonCandidate cand;
        cand.chi = euler_characteristic(t, sk, v);
        SurfaceComplex scx = build_surface(t, sk, v);
        cand.component_count = static_cast<int>(components(t, sk, scx).size());
        cand.coords = std::move(v);
        out.push_back(std::move(cand));
    }
    return out;
}

std::vector<CoordinateVector> find_normal_spheres(const Triangulation& t, const SkeletonIndex& sk,
                                                  int sum_depth) {
    if (!sk.orientable) throw DomainError("find_normal_spheres requires an orientable triangulation");
    if (sum_depth < 1) throw DomainError("sum_depth must be >= 1");
    EnumerationResult base = enumerate_vertex_surfaces(t, sk, System::OneNormal);

    std::vector<CoordinateVector> candidates;
    std::function<void(size_t, const CoordinateVector&, int)> rec =
        [&](size_t from, const CoordinateVector& acc, int depth) {
            if (depth > 0) candidates.push_back(acc);
            if (depth == sum_depth) return;
            for (size_t i = from; i < base.rays.size(); ++i) rec(i, acc + base.rays[i], depth + 1);
        };
    rec(0, CoordinateVector::zero(System::OneNormal, t.size()), 0);

    std::vector<CoordinateVector> out;
    for (const CoordinateVector& v : candidates) {
        if (!is_admissible(v)) continue;
        if (euler_characteristic(t, sk, v) != 2) continue;
        SurfaceComplex scx = build_surface(t, sk, v);
        if (components(t, sk, scx).size() != 1) continue;
        out.push_back(v);
    }
    std::sort(out.begin(), out.end(), [&](const CoordinateVector& a, const CoordinateVector& b) {
        int64_t wa = weight(t, sk, a), wb = weight(t, sk, b);
        if (wa != wb) return wa < wb;
        return a.counts < b.counts;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace normalkit
