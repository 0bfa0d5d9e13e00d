#ifndef TILER_KTT_HPP
#define TILER_KTT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "decompose.hpp"
#include "graph.hpp"
#include "matching.hpp"
#include "packing.hpp"
#include "params.hpp"

namespace tiler {

// two-sided tail bound for a hypergeometric variable with mean mu
inline double hypergeometric_tail_bound(double eps, double mu) {
    return 2.0 * std::exp(-eps * eps * mu / 3.0);
}

// --- unbalanced biclique search ---

namespace detail {

// enumerate t-subsets of `pool` (vector of ids), calling cb(subset) until it
// returns true; subsets visited in the order induced by the pool ordering
template <typename F>
inline bool for_each_subset(const std::vector<int>& pool, int t, F cb) {
    int n = int(pool.size());
    if (t > n) return false;
    std::vector<int> idx(t);
    for (int i = 0; i < t; ++i) idx[i] = i;
    for (;;) {
        std::vector<int> sub(t);
        for (int i = 0; i < t; ++i) sub[i] = pool[idx[i]];
        if (cb(sub)) return true;
        int i = t - 1;
        while (i >= 0 && idx[i] == n - t + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int j = i + 1; j < t; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

// K_{t,t} with sideB a t-subset of Y and sideA a t-subset of their common
// neighborhood in X. Subsets of Y tried by descending common-neighborhood
// size; exhaustive for |Y| <= 24, else restricted to the 24 highest-degree
// Y-vertices.
inline KttCopy find_ktt_unbalanced(const Graph& G, const VertexSet& X, const VertexSet& Y,
                                   int t, const std::string& tag = "K") {
    std::vector<int> Yv = Y.to_vector();
    std::sort(Yv.begin(), Yv.end(), [&](int a, int b) {
        int da = G.deg_in(a, X), db = G.deg_in(b, X);
        return da != db ? da > db : a < b;
    });
    if (int(Yv.size()) > 24) Yv.resize(24);

    // gather candidate subsets with their common-neighborhood sizes
    std::vector<std::pair<int, std::vector<int>>> cands;
    detail::for_each_subset(Yv, t, [&](const std::vector<int>& sub) {
        VertexSet common = X;
        for (int y : sub) common &= G.adj[y];
        int c = common.count();
        if (c >= t) cands.push_back({c, sub});
        return false;
    });
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [c, sub] : cands) {
        VertexSet common = X;
        for (int y : sub) common &= G.adj[y];
        // sideA must avoid sideB (X and Y may overlap in principle)
        for (int y : sub) common.reset(y);
        if (common.count() < t) continue;
        std::vector<int> A;
        for (int v = common.first(); v >= 0 && int(A.size()) < t; v = common.next(v))
            A.push_back(v);
        KttCopy k;
        k.sideA = A;
        k.sideB = sub;
        k.tag = tag;
        if (!k.valid_in(G)) throw InvariantError("find_ktt_unbalanced: invalid copy built");
        return k;
    }
    throw NotFound("find_ktt_unbalanced: no K_{t,t} found (precondition not met?)", false);
}

// K_{t,t} with both sides inside S (within-cluster copy)
inline std::optional<KttCopy> find_ktt_within(const Graph& G, const VertexSet& S, int t,
                                              const std::string& tag = "K") {
    std::vector<int> Sv = S.to_vector();
    std::sort(Sv.begin(), Sv.end(), [&](int a, int b) {
        int da = G.deg_in(a, S), db = G.deg_in(b, S);
        return da != db ? da > db : a < b;
    });
    if (int(Sv.size()) > 24) Sv.resize(24);
    std::optional<KttCopy> out;
    detail::for_each_subset(Sv, t, [&](const std::vector<int>& sub) {
        VertexSet common = S;
        for (int y : sub) common &= G.adj[y];
        for (int y : sub) common.reset(y);
        if (common.count() < t) return false;
        std::vector<int> A;
        for (int v = common.first(); v >= 0 && int(A.size()) < t; v = common.next(v))
            A.push_back(v);
        KttCopy k;
        k.sideA = A;
        k.sideB = sub;
        k.tag = tag;
        assert(k.valid_in(G));
        out = k;
        return true;
    });
    return out;
}

// --- regularity machinery ---

inline double pair_density(const Graph& G, const VertexSet& A, const VertexSet& B) {
    long long a = A.count(), b = B.count();
    if (a == 0 || b == 0) return 0.0;
    return double(G.e_between(A, B)) / (double(a) * double(b));
}

// Exhaustive for |A|,|B| <= 14 (incremental subset sums), else 2000 seeded
// samples at the minimal qualifying size and at half size. The tolerance
// carries a finite-sample allowance of 2.5/sqrt(|X||Y|) (five sigma at the
// worst-case cell variance 1/4): tiny subsets are pure sampling noise at
// these scales, and without the allowance no dense random pair would ever
// qualify.
inline bool eps_regular_test(const Graph& G, const VertexSet& A, const VertexSet& B,
                             double eps, uint64_t seed = 1) {
    std::vector<int> Av = A.to_vector(), Bv = B.to_vector();
    int a = int(Av.size()), b = int(Bv.size());
    assert(a > 0 && b > 0 && !A.intersects(B));
    double d0 = pair_density(G, A, B);
    int minX = std::max(1, int(std::ceil(eps * a)));
    int minY = std::max(1, int(std::ceil(eps * b)));
    if (a <= 14 && b <= 14) {
        std::vector<int> degX(b);
        std::vector<long long> esum(size_t(1) << b);
        for (uint32_t mx = 1; mx < (uint32_t{1} << a); ++mx) {
            int xc = std::popcount(mx);
            if (xc < minX) continue;
            for (int j = 0; j < b; ++j) {
                int dj = 0;
                for (int i = 0; i < a; ++i)
                    if ((mx >> i) & 1 && G.has_edge(Av[i], Bv[j])) ++dj;
                degX[j] = dj;
            }
            esum[0] = 0;
            for (uint32_t my = 1; my < (uint32_t{1} << b); ++my) {
                int low = std::countr_zero(my);
                esum[my] = esum[my & (my - 1)] + degX[low];
                int yc = std::popcount(my);
                if (yc < minY) continue;
                double dd = double(esum[my]) / (double(xc) * double(yc));
                if (std::abs(dd - d0) >= eps + 2.5 / std::sqrt(double(xc) * yc))
                    return false;
            }
        }
        return true;
    }
    std::mt19937_64 rng(seed);
    for (int it = 0; it < 2000; ++it) {
        int sx = (it % 2 == 0) ? minX : std::max(minX, a / 2);
        int sy = (it % 2 == 0) ? minY : std::max(minY, b / 2);
        std::shuffle(Av.begin(), Av.end(), rng);
        std::shuffle(Bv.begin(), Bv.end(), rng);
        VertexSet X(G.n), Y(G.n);
        for (int i = 0; i < sx; ++i) X.set(Av[i]);
        for (int i = 0; i < sy; ++i) Y.set(Bv[i]);
        if (std::abs(pair_density(G, X, Y) - d0) >= eps + 2.5 / std::sqrt(double(sx) * sy))
            return false;
    }
    return true;
}

// Remove low-cross-degree vertices so every survivor clears the
// super-regularity floor (d - 2 eps) * |opposite side|.
inline std::pair<VertexSet, VertexSet> make_super_regular(const Graph& G, const VertexSet& A,
                                                          const VertexSet& B, double eps) {
    double d0 = pair_density(G, A, B);
    if (d0 <= 2 * eps)
        throw TooIrregular("make_super_regular: density <= 2*eps");
    auto prune = [&](const VertexSet& S, const VertexSet& O) {
        VertexSet keep(G.n);
        int removed = 0;
        for (int v = S.first(); v >= 0; v = S.next(v)) {
            if (G.deg_in(v, O) < (d0 - eps) * O.count()) ++removed;
            else keep.set(v);
        }
        if (removed > eps * S.count())
            throw TooIrregular("make_super_regular: more than eps-fraction below floor");
        return keep;
    };
    VertexSet A2 = prune(A, B), B2 = prune(B, A);
    for (int v = A2.first(); v >= 0; v = A2.next(v))
        if (G.deg_in(v, B2) <= (d0 - 2 * eps) * B2.count())
            throw TooIrregular("make_super_regular: floor violated after pruning");
    for (int v = B2.first(); v >= 0; v = B2.next(v))
        if (G.deg_in(v, A2) <= (d0 - 2 * eps) * A2.count())
            throw TooIrregular("make_super_regular: floor violated after pruning");
    return {A2, B2};
}

// --- cluster system ---

struct ClusterSystem {
    VertexSet V0;                       // exceptional set, |V0| divisible by 2t
    std::vector<VertexSet> clusters;    // U_1..U_{2m}, equal sizes divisible by 2t
    Graph Gprime;                       // working subgraph on the full universe
    std::vector<std::pair<int,int>> pair_edges;   // dense cluster pairs (reduced adjacency)
    std::vector<std::pair<int,int>> matched_pairs; // perfect matching on cluster indices

    void check_invariants(const VertexSet& Z, int t) const {
        VertexSet all = V0;
        int sz = -1;
        for (const auto& U : clusters) {
            if (U.intersects(all)) throw ValidationError("ClusterSystem: clusters overlap");
            all |= U;
            if (sz == -1) sz = U.count();
            if (U.count() != sz) throw ValidationError("ClusterSystem: unequal cluster sizes");
            if (sz % (2 * t) != 0) throw ValidationError("ClusterSystem: size not divisible by 2t");
        }
        if (!(all == Z)) throw ValidationError("ClusterSystem: V0 + clusters != Z");
        if (V0.count() % (2 * t) != 0) throw ValidationError("ClusterSystem: |V0| not divisible by 2t");
        std::vector<bool> seen(clusters.size(), false);
        for (auto [i, j] : matched_pairs) {
            if (seen[i] || seen[j]) throw ValidationError("ClusterSystem: matched pair reuse");
            seen[i] = seen[j] = true;
        }
        for (bool s : seen)
            if (!s) throw ValidationError("ClusterSystem: cluster unmatched");
    }
};

struct SplitPlan {
    // parts[i][p] for p in 0..4 = U_i^(1..5)
    std::vector<std::array<VertexSet, 5>> parts;

    VertexSet part_union(int p, int n) const {
        VertexSet u(n);
        for (const auto& ps : parts) u |= ps[p];
        return u;
    }
};

struct DivisibilityTarget {
    std::vector<int> f; // per cluster, residue in 0..t-1
};

namespace detail {

// deterministic seeded equal partition of ids into parts of the given sizes
inline std::vector<VertexSet> seeded_partition(int n, std::vector<int> ids,
                                               const std::vector<int>& sizes, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<VertexSet> out;
    size_t pos = 0;
    for (int s : sizes) {
        VertexSet p(n);
        for (int i = 0; i < s; ++i) p.set(ids[pos++]);
        out.push_back(p);
    }
    assert(pos == ids.size());
    return out;
}

} // namespace detail

// Desk-scale surrogate for the regularity partition. |Z| must be divisible
// by 2t. Bipartite classes keep their sides as clusters; general classes use
// an equal seeded split, a perfect 2-matching of the density-reduced graph,
// and the 2-lift. Remainders go to V0 (possibly empty).
inline ClusterSystem build_cluster_system(const Graph& G, const VertexSet& Z,
                                          const std::optional<std::pair<VertexSet, VertexSet>>& sides,
                                          int t, const ParamPack& p, uint64_t seed,
                                          bool direct_halves = false) {
    int nc = Z.count();
    if (nc % (2 * t) != 0)
        throw ValidationError("build_cluster_system: |Z| not divisible by 2t");
    int k = nc / (2 * t);
    ClusterSystem sys;
    sys.V0 = VertexSet(G.n);

    // working subgraph: drop within-side edges for almost-bipartite classes
    sys.Gprime = Graph(G.n);
    for (int u = Z.first(); u >= 0; u = Z.next(u)) {
        VertexSet nb = G.adj[u] & Z;
        for (int v = nb.next(u); v >= 0; v = nb.next(v)) {
            if (sides) {
                bool cross = sides->first.test(u) != sides->first.test(v);
                if (!cross) continue;
            }
            sys.Gprime.add_edge(u, v);
        }
    }

    if (sides) {
        if (k % 2 != 0)
            throw ValidationError("build_cluster_system: bipartite class needs even |Z|/2t");
        if (sides->first.count() != sides->second.count())
            throw ValidationError("build_cluster_system: bipartite sides unbalanced");
        sys.clusters = {sides->first, sides->second};
        sys.pair_edges = {{0, 1}};
        sys.matched_pairs = {{0, 1}};
    } else if (k % 2 == 0) {
        // try reduced clusters + 2-matching + lift with m in {4, 3, 2}
        bool built = false;
        for (int m : {4, 3, 2}) {
            if (direct_halves) break;
            if ((k / 2) % m != 0) continue;
            int csize = nc / m; // divisible by 4t
            auto Vs = detail::seeded_partition(G.n, Z.to_vector(), std::vector<int>(m, csize), seed);
            Graph Gamma(m);
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    if (pair_density(sys.Gprime, Vs[i], Vs[j]) >= p.mu) Gamma.add_edge(i, j);
            auto tm = perfect_two_matching(Gamma);
            if (!tm) continue;
            Matching lifted = lift_two_matching(m, *tm); // vertices 2i, 2i+1
            // split V_i into halves U_{2i}, U_{2i+1}
            std::vector<VertexSet> halves;
            for (int i = 0; i < m; ++i) {
                auto hs = detail::seeded_partition(G.n, Vs[i].to_vector(),
                                                   {csize / 2, csize / 2}, seed + 101 + i);
                halves.push_back(hs[0]);
                halves.push_back(hs[1]);
            }
            sys.clusters = halves;
            for (int i = 0; i < 2 * m; ++i)
                for (int j = i + 1; j < 2 * m; ++j)
                    if (pair_density(sys.Gprime, halves[i], halves[j]) >= p.mu)
                        sys.pair_edges.emplace_back(i, j);
            for (auto [u, v] : lifted.edges)
                sys.matched_pairs.emplace_back(std::min(u, v), std::max(u, v));
            built = true;
            break;
        }
        if (!built) {
            // direct two random halves
            int csize = nc / 2; // = t*k, k even -> divisible by 2t
            auto hs = detail::seeded_partition(G.n, Z.to_vector(), {csize, csize}, seed);
            sys.clusters = {hs[0], hs[1]};
            sys.pair_edges = {{0, 1}};
            sys.matched_pairs = {{0, 1}};
        }
    } else {
        // odd k: four clusters plus a 2t-divisible exceptional set
        int s = k / 4; // clusters of size 2t*s
        if (s < 1)
            throw ValidationError("build_cluster_system: class too small for the V0 route");
        int csize = 2 * t * s;
        int v0size = nc - 4 * csize; // = 2t*(k - 4s), in {2t, 6t}
        auto ids = Z.to_vector();
        std::mt19937_64 rng(seed);
        std::shuffle(ids.begin(), ids.end(), rng);
        VertexSet V0(G.n);
        for (int i = 0; i < v0size; ++i) V0.set(ids[i]);
        sys.V0 = V0;
        std::vector<int> rest(ids.begin() + v0size, ids.end());
        auto Us = detail::seeded_partition(G.n, rest, std::vector<int>(4, csize), seed + 7);
        sys.clusters = Us;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (pair_density(sys.Gprime, Us[i], Us[j]) >= p.mu)
                    sys.pair_edges.emplace_back(i, j);
        sys.matched_pairs = {{0, 1}, {2, 3}};
    }

    sys.check_invariants(Z, t);
    for (auto [i, j] : sys.matched_pairs) {
        double d0 = pair_density(sys.Gprime, sys.clusters[i], sys.clusters[j]);
        if (d0 < p.mu)
            throw ValidationError("build_cluster_system: matched pair density " +
                                  std::to_string(d0) + " below mu");
        if (!eps_regular_test(sys.Gprime, sys.clusters[i], sys.clusters[j], p.eps, seed + 13))
            throw ValidationError("build_cluster_system: matched pair fails eps-regularity");
    }
    return sys;
}

// Five disjoint parts per cluster. Default sizes floor(xi q), floor(xi q),
// q/2t, min(floor(2q/3), rest), remainder. When V0 is nonempty, parts 1 and 2
// are widened (they must host the exceptional cover and the divisibility
// fixer) and part 4 absorbs all remaining slack.
inline SplitPlan five_way_split(const Graph& G, const ClusterSystem& sys, double xi, int t,
                                uint64_t seed, double eps_prop = 0.5, int max_resample = 50) {
    SplitPlan plan;
    bool v0route = sys.V0.any();
    for (size_t ci = 0; ci < sys.clusters.size(); ++ci) {
        const VertexSet& U = sys.clusters[ci];
        int q = U.count();
        int s3 = q / (2 * t);
        int s1 = int(std::floor(xi * q)), s2 = s1;
        if (v0route) {
            s1 = std::min(std::max(s1, 8 * t), q / 8);
            s2 = s1;
        }
        int rest = q - s1 - s2 - s3;
        int s4 = v0route ? rest : std::min(int(std::floor(2.0 * q / 3.0)), rest);
        int s5 = rest - s4;
        assert(s1 >= 0 && s4 >= 0 && s5 >= 0 && s1 + s2 + s3 + s4 + s5 == q);

        for (int attempt = 0;; ++attempt) {
            auto ps = detail::seeded_partition(G.n, U.to_vector(), {s1, s2, s3, s4, s5},
                                               seed + 997 * ci + attempt);
            // (U5)-style proportionality for high-degree vertices within the class
            bool ok = true;
            VertexSet others(G.n);
            for (const auto& U2 : sys.clusters) others |= U2;
            for (int v = others.first(); v >= 0 && ok; v = others.next(v)) {
                int dU = G.deg_in(v, U);
                if (dU < eps_prop * q) continue;
                double frac3 = double(s3) / q;
                int d3 = G.deg_in(v, ps[2]);
                if (d3 < (1 - eps_prop) * frac3 * dU - 1 || d3 > (1 + eps_prop) * frac3 * dU + 1)
                    ok = false;
            }
            if (ok) {
                plan.parts.push_back({ps[0], ps[1], ps[2], ps[3], ps[4]});
                break;
            }
            if (attempt >= max_resample)
                throw ConcentrationError("five_way_split: proportionality failed after resamples");
        }
    }
    return plan;
}

// K_1: greedy cover of V0, one exceptional vertex per copy, the rest from
// the first split parts.
inline KttPacking cover_exceptional(const Graph& G, const ClusterSystem& sys,
                                    const SplitPlan& split, int t) {
    KttPacking K1;
    if (!sys.V0.any()) return K1;
    VertexSet avail = split.part_union(0, G.n);
    for (int v = sys.V0.first(); v >= 0; v = sys.V0.next(v)) {
        // copy with v on sideA: sideB = t-subset of N(v) in avail, sideA =
        // v + (t-1) common neighbors in avail
        VertexSet nb = G.adj[v] & avail;
        std::vector<int> nbv = nb.to_vector();
        std::sort(nbv.begin(), nbv.end(), [&](int a, int b) {
            int da = G.deg_in(a, avail), db = G.deg_in(b, avail);
            return da != db ? da > db : a < b;
        });
        bool placed = false;
        detail::for_each_subset(nbv, t, [&](const std::vector<int>& B) {
            VertexSet common = avail;
            for (int y : B) common &= G.adj[y];
            for (int y : B) common.reset(y);
            if (common.count() < t - 1) return false;
            KttCopy k;
            k.sideA = {v};
            for (int u = common.first(); u >= 0 && int(k.sideA.size()) < t; u = common.next(u))
                k.sideA.push_back(u);
            k.sideB = B;
            k.tag = "K1";
            if (!k.valid_in(G)) return false;
            for (int u : k.sideA)
                if (u != v) avail.reset(u);
            for (int u : k.sideB) avail.reset(u);
            K1.copies.push_back(k);
            placed = true;
            return true;
        });
        if (!placed)
            throw CoverageError("cover_exceptional: vertex " + std::to_string(v) + " uncovered");
    }
    assert(sys.V0.subset_of(K1.covered(G.n)));
    return K1;
}

namespace detail {

// even-length walk between reduced vertices a and b via BFS on the
// parity-layered double of the reduced graph
inline std::vector<int> even_walk(int m, const std::vector<std::pair<int,int>>& edges,
                                  int a, int b) {
    std::vector<std::vector<int>> adj(m);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    // states (vertex, parity); start (a, 0), goal (b, 0)
    std::vector<std::array<int,2>> par(m, {-2, -2});
    std::queue<std::pair<int,int>> q;
    par[a][0] = -1;
    q.push({a, 0});
    while (!q.empty()) {
        auto [v, pr] = q.front();
        q.pop();
        for (int u : adj[v]) {
            int npr = 1 - pr;
            if (par[u][npr] != -2) continue;
            par[u][npr] = v * 2 + pr;
            q.push({u, npr});
        }
    }
    if (a == b) return {a}; // zero-length walk
    if (par[b][0] == -2)
        throw NoEvenWalk("even_walk: no even walk between reduced vertices " +
                         std::to_string(a) + " and " + std::to_string(b));
    std::vector<int> walk;
    int v = b, pr = 0;
    for (;;) {
        walk.push_back(v);
        int code = par[v][pr];
        if (code == -1) break;
        v = code / 2;
        pr = code % 2;
    }
    std::reverse(walk.begin(), walk.end());
    assert(walk.front() == a && walk.back() == b && walk.size() % 2 == 1);
    return walk;
}

// K_{t,t} with exactly x vertices in P and 2t-x in Q (1 <= x <= 2t-1),
// using within-Q edges when x < t; brute-force over available vertices
inline std::optional<KttCopy> find_split_ktt(const Graph& G, const VertexSet& P,
                                             const VertexSet& Q, int x, int t,
                                             const std::string& tag) {
    // sideA takes min(x, t) from P (rest from Q); sideB takes the overflow
    int pa = std::min(x, t), pb = x - pa;
    std::vector<int> Pv = P.to_vector(), Qv = Q.to_vector();
    if (int(Pv.size()) > 20) Pv.resize(20);
    if (int(Qv.size()) > 20) Qv.resize(20);
    std::optional<KttCopy> out;
    for_each_subset(Pv, pa, [&](const std::vector<int>& A1) {
        std::vector<int> Prest;
        for (int v : Pv)
            if (std::find(A1.begin(), A1.end(), v) == A1.end()) Prest.push_back(v);
        return for_each_subset(Prest, pb, [&](const std::vector<int>& B1) {
            return for_each_subset(Qv, t - pa, [&](const std::vector<int>& A2) {
                std::vector<int> Qrest;
                for (int v : Qv)
                    if (std::find(A2.begin(), A2.end(), v) == A2.end()) Qrest.push_back(v);
                return for_each_subset(Qrest, t - pb, [&](const std::vector<int>& B2) {
                    KttCopy k;
                    k.sideA = A1;
                    k.sideA.insert(k.sideA.end(), A2.begin(), A2.end());
                    k.sideB = B1;
                    k.sideB.insert(k.sideB.end(), B2.begin(), B2.end());
                    k.tag = tag;
                    if (!k.valid_in(G)) return false;
                    out = k;
                    return true;
                });
            });
        });
    });
    return out;
}

} // namespace detail

// K_2: per-cluster removal residues matching f (mod t), via copies placed
// along even walks in the reduced graph. Usage per cluster <= 3t |supp(f)|.
inline KttPacking fix_divisibility(const Graph& G, const ClusterSystem& sys,
                                   const SplitPlan& split, const DivisibilityTarget& target,
                                   int t) {
    int m = int(sys.clusters.size());
    std::vector<int> f = target.f;
    assert(int(f.size()) == m);
    {
        int s = 0;
        for (int x : f) s += x;
        if (s % t != 0)
            throw ValidationError("fix_divisibility: sum of residues not divisible by t");
    }
    KttPacking K2;
    std::vector<VertexSet> avail;
    for (int i = 0; i < m; ++i) avail.push_back(split.parts[i][1]);
    int supp0 = 0;
    for (int x : f) supp0 += (x != 0);

    auto place = [&](int ci, int cj, int x) {
        // copy with x vertices in cluster ci's part 2 and 2t-x in cj's
        auto k = detail::find_split_ktt(sys.Gprime, avail[ci], avail[cj], x, t, "K2");
        if (!k)
            throw SearchExhausted("fix_divisibility: no split copy between clusters " +
                                  std::to_string(ci) + "," + std::to_string(cj));
        for (int v : k->sideA)
            for (int i = 0; i < m; ++i)
                if (avail[i].test(v)) avail[i].reset(v);
        for (int v : k->sideB)
            for (int i = 0; i < m; ++i)
                if (avail[i].test(v)) avail[i].reset(v);
        K2.copies.push_back(*k);
    };

    while (true) {
        int a = -1;
        for (int i = 0; i < m; ++i)
            if (f[i] != 0) { a = i; break; }
        if (a == -1) break;
        int b = -1;
        for (int i = m - 1; i >= 0; --i)
            if (i != a && f[i] != 0) { b = i; break; }
        if (b == -1)
            throw ValidationError("fix_divisibility: lone nonzero residue");
        std::vector<int> walk = detail::even_walk(m, sys.pair_edges, a, b);
        int r = f[a];
        // copy j on walk edge (w_{j-1}, w_j): r in the earlier cluster,
        // 2t - r in the later one; residues telescope along the walk
        for (size_t j = 1; j < walk.size(); ++j)
            place(walk[j - 1], walk[j], r);
        f[a] = 0;
        f[b] = ((f[b] - (t - r)) % t + t) % t;
    }

    // recount residues and the usage bound
    for (int i = 0; i < m; ++i) {
        int used = K2.covered(G.n).intersect_count(sys.clusters[i]);
        if (used % t != target.f[i])
            throw InvariantError("fix_divisibility: residue mismatch at cluster " +
                                 std::to_string(i));
        if (used > 3 * t * std::max(1, supp0) && supp0 > 0)
            throw InvariantError("fix_divisibility: usage bound exceeded at cluster " +
                                 std::to_string(i));
    }
    return K2;
}

// K_3: f(i,j) copies between the fourth parts of clusters i and j, where
// f(i,j) counts template-matching edges between the trimmed third parts.
inline KttPacking build_template_ktt(const Graph& G, const ClusterSystem& sys,
                                     const SplitPlan& split, const Matching& tmpl, int t,
                                     const std::vector<VertexSet>& U3prime) {
    int m = int(sys.clusters.size());
    std::map<std::pair<int,int>, int> f;
    auto owner = [&](int v) {
        for (int i = 0; i < m; ++i)
            if (sys.clusters[i].test(v)) return i;
        throw InvariantError("build_template_ktt: template vertex outside clusters");
    };
    for (auto [u, v] : tmpl.edges) {
        int i = owner(u), j = owner(v);
        if (i > j) std::swap(i, j);
        f[{i, j}]++;
    }
    KttPacking K3;
    std::vector<VertexSet> avail;
    for (int i = 0; i < m; ++i) avail.push_back(split.parts[i][3]);
    for (auto [pr, cnt] : f) {
        auto [i, j] = pr;
        for (int c = 0; c < cnt; ++c) {
            std::optional<KttCopy> k;
            if (i == j) {
                k = find_ktt_within(sys.Gprime, avail[i], t, "K3");
            } else {
                try {
                    k = find_ktt_unbalanced(sys.Gprime, avail[i], avail[j], t, "K3");
                } catch (const NotFound&) {
                }
            }
            if (!k)
                throw SearchExhausted("build_template_ktt: no copy for pair (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            for (int v : k->sideA) avail[i].reset(v), avail[j].reset(v);
            for (int v : k->sideB) avail[i].reset(v), avail[j].reset(v);
            K3.copies.push_back(*k);
        }
    }
    // conservation: each cluster loses exactly t * |U3prime_i| vertices to K3
    VertexSet cov = K3.covered(G.n);
    for (int i = 0; i < m; ++i)
        if (cov.intersect_count(sys.clusters[i]) != t * U3prime[i].count())
            throw InvariantError("build_template_ktt: conservation failed at cluster " +
                                 std::to_string(i));
    return K3;
}

// Exact backtracking tiler for a balanced bipartite pair; Infeasible is a
// value (nullopt) when the search space is exhausted.
inline std::optional<KttPacking> perfect_ktt_tiling_bipartite(const Graph& G, const VertexSet& A,
                                                              const VertexSet& B, int t,
                                                              long long budget = 30'000'000) {
    if (A.count() != B.count() || A.count() % t != 0)
        throw ValidationError("perfect_ktt_tiling_bipartite: need |A| = |B|, divisible by t");
    KttPacking out;
    VertexSet ra = A, rb = B;
    long long nodes = budget;
    std::function<bool()> solve = [&]() -> bool {
        if (--nodes < 0)
            throw SearchExhausted("perfect_ktt_tiling_bipartite: node budget exhausted");
        if (!ra.any()) return true;
        // branch on the minimum-degree uncovered A-vertex
        int best = -1, bestd = 1 << 30;
        for (int v = ra.first(); v >= 0; v = ra.next(v)) {
            int d = G.deg_in(v, rb);
            if (d < bestd) { bestd = d; best = v; }
        }
        int a0 = best;
        if (bestd < t) return false;
        VertexSet nb = G.adj[a0] & rb;
        std::vector<int> nbv = nb.to_vector();
        std::sort(nbv.begin(), nbv.end(), [&](int x, int y) {
            int dx = G.deg_in(x, ra), dy = G.deg_in(y, ra);
            return dx != dy ? dx > dy : x < y;
        });
        bool done = false;
        detail::for_each_subset(nbv, t, [&](const std::vector<int>& Bs) {
            VertexSet common = ra;
            for (int y : Bs) common &= G.adj[y];
            common.reset(a0);
            if (common.count() < t - 1) return false;
            std::vector<int> cv = common.to_vector();
            std::sort(cv.begin(), cv.end(), [&](int x, int y) {
                int dx = G.deg_in(x, rb), dy = G.deg_in(y, rb);
                return dx != dy ? dx > dy : x < y;
            });
            return detail::for_each_subset(cv, t - 1, [&](const std::vector<int>& As) {
                KttCopy k;
                k.sideA = {a0};
                k.sideA.insert(k.sideA.end(), As.begin(), As.end());
                k.sideB = Bs;
                k.tag = "tile";
                for (int v : k.sideA) ra.reset(v);
                for (int v : k.sideB) rb.reset(v);
                out.copies.push_back(k);
                if (solve()) { done = true; return true; }
                out.copies.pop_back();
                for (int v : k.sideA) ra.set(v);
                for (int v : k.sideB) rb.set(v);
                return false;
            });
        });
        return done;
    };
    if (!solve()) return std::nullopt;
    // exact cover check
    VertexSet cov = out.covered(G.n);
    if (!(cov == (A | B)))
        throw InvariantError("perfect_ktt_tiling_bipartite: cover mismatch");
    return out;
}

// Exact backtracking perfect K_{t,t} packing of G[S] (no side constraint);
// used for small classes where the cluster pipeline is overkill.
inline std::optional<KttPacking> perfect_ktt_tiling_general(const Graph& G, const VertexSet& S,
                                                            int t,
                                                            long long budget = 30'000'000) {
    if (S.count() % (2 * t) != 0)
        throw ValidationError("perfect_ktt_tiling_general: |S| not divisible by 2t");
    KttPacking out;
    VertexSet rem = S;
    long long nodes = budget;
    std::function<bool()> solve = [&]() -> bool {
        if (--nodes < 0)
            throw SearchExhausted("perfect_ktt_tiling_general: node budget exhausted");
        if (!rem.any()) return true;
        int a0 = rem.first();
        VertexSet nb = G.adj[a0] & rem;
        std::vector<int> nbv = nb.to_vector();
        bool done = false;
        // a0 on sideA: sideB = t-subset of N(a0), sideA = a0 + (t-1) commons
        detail::for_each_subset(nbv, t, [&](const std::vector<int>& Bs) {
            VertexSet common = rem;
            for (int y : Bs) common &= G.adj[y];
            common.reset(a0);
            for (int y : Bs) common.reset(y);
            if (common.count() < t - 1) return false;
            std::vector<int> cv = common.to_vector();
            return detail::for_each_subset(cv, t - 1, [&](const std::vector<int>& As) {
                KttCopy k;
                k.sideA = {a0};
                k.sideA.insert(k.sideA.end(), As.begin(), As.end());
                k.sideB = Bs;
                k.tag = "tile";
                for (int v : k.sideA) rem.reset(v);
                for (int v : k.sideB) rem.reset(v);
                out.copies.push_back(k);
                if (solve()) { done = true; return true; }
                out.copies.pop_back();
                for (int v : k.sideA) rem.set(v);
                for (int v : k.sideB) rem.set(v);
                return false;
            });
        });
        return done;
    };
    if (!solve()) return std::nullopt;
    return out;
}

// Per-class perfect-packing pipeline: divisibility drop, cluster system,
// five-way split, exceptional cover, divisibility fixer, template copies,
// exact tiling of each matched pair. Leftover <= 2t-1 (the dropped vertices).
inline KttPacking pack_expander(const Graph& G, const VertexSet& Zin,
                                const std::optional<std::pair<VertexSet, VertexSet>>& sides_in,
                                int t, const ParamPack& p, uint64_t seed,
                                VertexSet* out_leftover = nullptr) {
    VertexSet Z = Zin;
    auto sides = sides_in;
    int drop = Z.count() % (2 * t);
    VertexSet dropped(G.n);
    if (drop > 0) {
        // drop the lowest-class-degree vertices; for sided classes alternate
        // sides so the bipartition stays balanced (drop is even there)
        std::vector<int> ids = Z.to_vector();
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            int da = G.deg_in(a, Z), db = G.deg_in(b, Z);
            return da != db ? da < db : a < b;
        });
        if (sides) {
            int da = drop / 2, db = drop - drop / 2;
            for (int v : ids) {
                bool inA = sides->first.test(v);
                if (inA && da > 0) { dropped.set(v); --da; }
                else if (!inA && db > 0) { dropped.set(v); --db; }
                if (da == 0 && db == 0) break;
            }
        } else {
            for (int i = 0; i < drop; ++i) dropped.set(ids[i]);
        }
        Z = Z.and_not(dropped);
        if (sides)
            sides = std::make_pair(sides->first.and_not(dropped),
                                   sides->second.and_not(dropped));
    }
    if (out_leftover) *out_leftover = dropped;
    if (!Z.any()) return {};
    int nc = Z.count(), k = nc / (2 * t);

    // small classes (and small odd classes): direct exact packing
    if (sides && k % 2 == 1 && nc > 56)
        throw ValidationError("pack_expander: odd bipartite class too large for exact route");
    if (k < 4 || (k % 2 == 1 && nc <= 56)) {
        auto tiling = perfect_ktt_tiling_general(G, Z, t);
        if (!tiling)
            throw SearchExhausted("pack_expander: small class has no perfect packing");
        auto verdict = verify_packing(G, *tiling, t);
        if (!verdict.ok) throw InvariantError("pack_expander: " + verdict.detail);
        return *tiling;
    }

    auto run_pipeline = [&](bool direct_halves) -> KttPacking {
    ClusterSystem sys = build_cluster_system(G, Z, sides, t, p, seed, direct_halves);
    SplitPlan split = five_way_split(G, sys, p.xi, t, seed + 1);
    KttPacking K1 = cover_exceptional(G, sys, split, t);

    int m = int(sys.clusters.size());
    DivisibilityTarget target;
    target.f.assign(m, 0);
    VertexSet cov1 = K1.covered(G.n);
    for (int i = 0; i < m; ++i)
        target.f[i] = ((-(cov1.intersect_count(sys.clusters[i]))) % t + t) % t;
    KttPacking K2 = fix_divisibility(G, sys, split, target, t);

    // trim the third parts by the (K1 union K2)-usage over t
    VertexSet cov12 = cov1 | K2.covered(G.n);
    std::vector<VertexSet> U3prime;
    for (int i = 0; i < m; ++i) {
        int used = cov12.intersect_count(sys.clusters[i]);
        if (used % t != 0)
            throw InvariantError("pack_expander: K1+K2 usage not divisible by t");
        VertexSet u3 = split.parts[i][2];
        for (int r = used / t; r > 0; --r) {
            int v = u3.first();
            u3.reset(v);
        }
        U3prime.push_back(u3);
    }
    VertexSet U3all(G.n);
    for (const auto& u : U3prime) U3all |= u;
    Matching tmpl = template_matching(sys.Gprime, U3all.complement());
    KttPacking K3 = build_template_ktt(G, sys, split, tmpl, t, U3prime);

    // residual clusters all have size |U_i|/2; tile matched pairs exactly
    VertexSet cov123 = cov12 | K3.covered(G.n);
    std::vector<VertexSet> Uprime;
    for (int i = 0; i < m; ++i) {
        VertexSet u = sys.clusters[i].and_not(cov123);
        if (2 * u.count() != sys.clusters[i].count())
            throw InvariantError("pack_expander: residual cluster " + std::to_string(i) +
                                 " is not half its original size");
        Uprime.push_back(u);
    }
    KttPacking all = K1;
    all.append(K2);
    all.append(K3);
    for (auto [i, j] : sys.matched_pairs) {
        auto tiling = perfect_ktt_tiling_bipartite(sys.Gprime, Uprime[i], Uprime[j], t);
        if (!tiling)
            throw SearchExhausted("pack_expander: matched pair (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") has no perfect tiling");
        all.append(*tiling);
    }
    auto verdict = verify_packing(G, all, t);
    if (!verdict.ok) throw InvariantError("pack_expander: " + verdict.detail);
    // coverage: exactly Z
    if (!(all.covered(G.n) == Z))
        throw InvariantError("pack_expander: packing does not cover the class exactly");
    return all;
    };

    // primary route: reduced clusters + lift. Its residual pairs are small
    // (quarter clusters), and at desk sizes a perfect tiling of a small
    // random pair can genuinely fail to exist; the direct two-halves system
    // leaves residual pairs twice as large, so fall back to it.
    if (!sides && k % 2 == 0) {
        try {
            return run_pipeline(false);
        } catch (const InvariantError&) {
            throw;
        } catch (const CoverageError&) {
            throw;
        } catch (const Error&) {
            return run_pipeline(true);
        }
    }
    return run_pipeline(false);
}

} // namespace tiler

#endif
