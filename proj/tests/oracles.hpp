#ifndef TILER_TEST_ORACLES_HPP
#define TILER_TEST_ORACLES_HPP

// Independent, brute-force oracles used only by the tests. These deliberately
// avoid the library's search code paths.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <tiler/graph.hpp>

namespace oracle {

using tiler::Graph;
using tiler::VertexSet;

// Erdos-Renyi G(n, p)
inline Graph random_graph(int n, double p, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Graph G(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng) < p) G.add_edge(u, v);
    return G;
}

// Hamilton path existence between x and y over exactly the vertices of
// `allowed`, by bitmask DP. |allowed| <= 24.
inline bool hamilton_path_exists(const Graph& G, int x, int y, const VertexSet& allowed) {
    std::vector<int> ids = allowed.to_vector();
    int k = int(ids.size());
    if (k > 24) return false;
    std::vector<int> pos(G.n, -1);
    for (int i = 0; i < k; ++i) pos[ids[i]] = i;
    if (pos[x] < 0 || pos[y] < 0) return false;
    if (k == 1) return x == y;
    std::vector<uint32_t> adj(k, 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (G.has_edge(ids[i], ids[j])) adj[i] |= (1u << j);
    int xs = pos[x], ys = pos[y];
    // dp[mask] = bitset of possible path ends starting from xs using mask
    std::vector<uint32_t> dp(1u << k, 0);
    dp[1u << xs] = 1u << xs;
    for (uint32_t mask = 1; mask < (1u << k); ++mask) {
        uint32_t ends = dp[mask];
        if (!ends || !(mask & (1u << xs))) continue;
        for (int e = 0; e < k; ++e) {
            if (!(ends & (1u << e))) continue;
            uint32_t cand = adj[e] & ~mask;
            while (cand) {
                int nxt = __builtin_ctz(cand);
                cand &= cand - 1;
                dp[mask | (1u << nxt)] |= (1u << nxt);
            }
        }
    }
    uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
    return (dp[full] >> ys) & 1;
}

inline bool hamilton_cycle_exists(const Graph& G) {
    if (G.n < 3) return false;
    VertexSet all = VertexSet::full(G.n);
    VertexSet nb0 = G.adj[0];
    for (int u = nb0.first(); u >= 0; u = nb0.next(u))
        if (hamilton_path_exists(G, 0, u, all)) return true;
    return false;
}

// exhaustive K_{t,t} existence with one side in X, the other in Y
inline bool biclique_exists(const Graph& G, const VertexSet& X, const VertexSet& Y, int t) {
    std::vector<int> xs = X.to_vector();
    std::vector<int> pick(t);
    std::function<bool(int, int, VertexSet)> rec = [&](int idx, int chosen,
                                                       VertexSet common) -> bool {
        if (chosen == t) return common.count() >= t;
        if (common.count() < t) return false;
        for (int i = idx; i + (t - chosen) <= int(xs.size()); ++i) {
            VertexSet c2 = common & G.adj[xs[i]];
            if (rec(i + 1, chosen + 1, c2)) return true;
        }
        return false;
    };
    VertexSet init = Y;
    return rec(0, 0, init);
}

// exact minimum cut sparsity of G[Z]; |Z| <= 20
inline double min_cut_sparsity(const Graph& G, const VertexSet& Z) {
    std::vector<int> ids = Z.to_vector();
    int k = int(ids.size());
    double best = 1e18;
    for (uint32_t mask = 1; mask < (1u << (k - 1)); ++mask) {
        VertexSet S(G.n);
        int a = 0;
        for (int i = 0; i < k - 1; ++i)
            if ((mask >> i) & 1) { S.set(ids[i]); ++a; }
        if (a == 0) continue;
        long long cross = G.e_between(S, Z.and_not(S));
        best = std::min(best, double(cross) / (double(a) * double(k - a)));
    }
    return best;
}

// exact robust (nu, tau)-expander test by exhaustion; n <= 18
inline bool robust_expander_exact(const Graph& G, double nu, double tau) {
    int n = G.n;
    int lo = int(std::ceil(tau * n)), hi = int(std::floor((1.0 - tau) * n));
    if (hi < lo) return true;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        int sz = __builtin_popcount(mask);
        if (sz < lo || sz > hi) continue;
        VertexSet S(n);
        for (int v = 0; v < n; ++v)
            if ((mask >> v) & 1) S.set(v);
        int rn = 0;
        for (int v = 0; v < n; ++v)
            if (G.deg_in(v, S) >= nu * n) ++rn;
        if (rn < sz + int(std::ceil(nu * n))) return false;
    }
    return true;
}

// maximum matching size by bitmask DP; n <= 22
inline int max_matching_size(const Graph& G) {
    int n = G.n;
    std::vector<int> memo(1u << n, -1);
    std::function<int(uint32_t)> rec = [&](uint32_t mask) -> int {
        if (memo[mask] >= 0) return memo[mask];
        int v = -1;
        for (int i = 0; i < n; ++i)
            if (!((mask >> i) & 1)) { v = i; break; }
        if (v < 0) return memo[mask] = 0;
        int best = rec(mask | (1u << v)); // leave v unmatched
        VertexSet nb = G.adj[v];
        for (int u = nb.first(); u >= 0; u = nb.next(u))
            if (!((mask >> u) & 1))
                best = std::max(best, 1 + rec(mask | (1u << v) | (1u << u)));
        return memo[mask] = best;
    };
    return rec(0);
}

// all perfect 2-matchings (edge/odd-cycle covers) of G, n <= 10; each result
// is (edges, odd cycles)
struct TwoMatchingShape {
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> cycles;
};

inline void enumerate_perfect_two_matchings(const Graph& G,
                                            std::vector<TwoMatchingShape>& out) {
    int n = G.n;
    TwoMatchingShape cur;
    std::function<void(uint32_t)> rec = [&](uint32_t mask) {
        int v = -1;
        for (int i = 0; i < n; ++i)
            if (!((mask >> i) & 1)) { v = i; break; }
        if (v < 0) {
            out.push_back(cur);
            return;
        }
        // v matched by an edge
        VertexSet nb = G.adj[v];
        for (int u = nb.first(); u >= 0; u = nb.next(u)) {
            if ((mask >> u) & 1 || u < v) continue;
            cur.edges.push_back({v, u});
            rec(mask | (1u << v) | (1u << u));
            cur.edges.pop_back();
        }
        // v on an odd cycle (v = smallest vertex of the cycle; walk only
        // through larger-unused vertices, canonical direction)
        std::vector<int> cyc{v};
        std::function<void(int, uint32_t)> grow = [&](int last, uint32_t cmask) {
            if (cyc.size() >= 3 && cyc.size() % 2 == 1 && G.has_edge(last, v) &&
                cyc[1] < cyc.back()) {
                cur.cycles.push_back(cyc);
                rec(mask | cmask);
                cur.cycles.pop_back();
            }
            if (cyc.size() >= 9) return;
            VertexSet nb2 = G.adj[last];
            for (int u = nb2.first(); u >= 0; u = nb2.next(u)) {
                if (u <= v || ((mask | cmask) >> u) & 1) continue;
                cyc.push_back(u);
                grow(u, cmask | (1u << u));
                cyc.pop_back();
            }
        };
        grow(v, 1u << v);
    };
    rec(0);
}

// maximum number of vertex-disjoint K_{t,t} copies inside G[S]; exhaustive,
// |S| small (used for the per-clique optimum)
inline int max_disjoint_bicliques(const Graph& G, const VertexSet& S, int t) {
    std::vector<int> ids = S.to_vector();
    int k = int(ids.size());
    int best = 0;
    // enumerate 2t-subsets that span a K_{t,t}, then recurse
    std::function<void(VertexSet, int)> rec = [&](VertexSet rem, int cnt) {
        best = std::max(best, cnt);
        if (int(rem.count()) < 2 * t) return;
        std::vector<int> rv = rem.to_vector();
        int m = int(rv.size());
        // choose the lowest remaining vertex to be in the next copy, for
        // canonical enumeration
        int anchor = rv[0];
        std::vector<int> others(rv.begin() + 1, rv.end());
        std::vector<int> sel;
        std::function<void(int)> pick = [&](int idx) {
            if (int(sel.size()) == 2 * t - 1) {
                std::vector<int> grp{anchor};
                grp.insert(grp.end(), sel.begin(), sel.end());
                // does grp split into a K_{t,t}?
                std::sort(grp.begin(), grp.end());
                std::vector<int> perm(2 * t);
                for (uint32_t m2 = 0; m2 < (1u << (2 * t)); ++m2) {
                    if (__builtin_popcount(m2) != t || !((m2 >> 0) & 1)) continue;
                    bool ok = true;
                    for (int i = 0; i < 2 * t && ok; ++i)
                        for (int j = i + 1; j < 2 * t && ok; ++j) {
                            bool cross = ((m2 >> i) & 1) != ((m2 >> j) & 1);
                            if (cross && !G.has_edge(grp[i], grp[j])) ok = false;
                        }
                    if (ok) {
                        VertexSet used = rem;
                        for (int v : grp) used.reset(v);
                        rec(used, cnt + 1);
                        break;
                    }
                }
                return;
            }
            for (int i = idx; i < int(others.size()); ++i) {
                sel.push_back(others[i]);
                pick(i + 1);
                sel.pop_back();
            }
        };
        pick(0);
        // also allow skipping the anchor entirely
        VertexSet rem2 = rem;
        rem2.reset(anchor);
        rec(rem2, cnt);
    };
    rec(S, 0);
    return best;
}

} // namespace oracle

#endif
