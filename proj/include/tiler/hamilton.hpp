#ifndef TILER_HAMILTON_HPP
#define TILER_HAMILTON_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "graph.hpp"
#include "matching.hpp"

namespace tiler {

struct RobustParams {
    double nu = 0.1;
    double tau = 0.25;
};

struct PathResult {
    std::vector<int> vertices;

    bool verify(const Graph& G) const {
        if (vertices.empty()) return false;
        VertexSet seen(G.n);
        for (int v : vertices) {
            if (v < 0 || v >= G.n || seen.test(v)) return false;
            seen.set(v);
        }
        for (size_t i = 0; i + 1 < vertices.size(); ++i)
            if (!G.has_edge(vertices[i], vertices[i + 1])) return false;
        return true;
    }
};

inline VertexSet robust_neighborhood(const Graph& G, const VertexSet& S, double nu) {
    VertexSet out(G.n);
    for (int v = 0; v < G.n; ++v)
        if (G.deg_in(v, S) >= nu * G.n) out.set(v);
    return out;
}

// Exhaustive for n <= 18, else 5000 seeded samples. On false, *witness (if
// given) holds a violating S.
inline bool robust_expander_check(const Graph& G, const RobustParams& p,
                                  VertexSet* witness = nullptr, uint64_t seed = 1) {
    int n = G.n;
    int lo = int(std::ceil(p.tau * n)), hi = int(std::floor((1.0 - p.tau) * n));
    if (hi < lo) return true; // vacuous size window
    auto ok = [&](const VertexSet& S) {
        VertexSet rn = robust_neighborhood(G, S, p.nu);
        return double(rn.count()) >= double(S.count()) + p.nu * n;
    };
    if (n <= 18) {
        for (uint64_t mask = 1; mask < (uint64_t{1} << n); ++mask) {
            int c = std::popcount(mask);
            if (c < lo || c > hi) continue;
            VertexSet S(n);
            for (int v = 0; v < n; ++v)
                if ((mask >> v) & 1) S.set(v);
            if (!ok(S)) {
                if (witness) *witness = S;
                return false;
            }
        }
        return true;
    }
    std::mt19937_64 rng(seed);
    std::vector<int> perm(n);
    for (int v = 0; v < n; ++v) perm[v] = v;
    for (int it = 0; it < 5000; ++it) {
        std::shuffle(perm.begin(), perm.end(), rng);
        int k = lo + int(rng() % uint64_t(std::max(1, hi - lo + 1)));
        VertexSet S(n);
        for (int i = 0; i < k; ++i) S.set(perm[i]);
        if (!ok(S)) {
            if (witness) *witness = S;
            return false;
        }
    }
    return true;
}

namespace detail {

struct HamSearch {
    const Graph& G;
    VertexSet allowed; // vertices the path must cover
    int target;
    long long budget;
    std::vector<int> path;
    VertexSet visited;
    // bipartite pruning state (side[v] in {0,1}, or -1 when not bipartite)
    std::vector<int> side;

    HamSearch(const Graph& g, const VertexSet& allowed_, int target_, long long budget_)
        : G(g), allowed(allowed_), target(target_), budget(budget_), visited(g.n),
          side(g.n, -1) {}

    bool feasible(int cur) const {
        // all unvisited vertices plus cur must lie in one connected piece
        VertexSet rem = allowed.and_not(visited);
        rem.set(cur);
        auto comps = G.components(rem);
        if (comps.size() != 1) return false;
        // bipartite parity: remaining side counts must fit an alternating
        // continuation from cur ending at target
        if (side[cur] != -1) {
            VertexSet un = allowed.and_not(visited);
            int c0 = 0, c1 = 0;
            for (int v = un.first(); v >= 0; v = un.next(v))
                (side[v] == 0 ? c0 : c1)++;
            int r = c0 + c1;
            int s = side[cur];
            // next vertex has side 1-s, alternating; count of side-(1-s)
            // vertices among the next r steps is ceil(r/2)
            int need_other = (r + 1) / 2, need_same = r / 2;
            int have_other = (s == 0) ? c1 : c0;
            int have_same = (s == 0) ? c0 : c1;
            if (have_other != need_other || have_same != need_same) return false;
        }
        return true;
    }

    bool dfs(int cur) {
        if (--budget < 0) throw NotFound("hamilton: node budget exhausted", true);
        if (visited == allowed) return cur == target;
        if (cur == target) return false;
        if (!feasible(cur)) return false;
        VertexSet cand = G.adj[cur] & allowed.and_not(visited);
        std::vector<int> cs = cand.to_vector();
        // branch on scarcer continuations first
        std::stable_sort(cs.begin(), cs.end(), [&](int a, int b) {
            VertexSet un = allowed.and_not(visited);
            return (G.adj[a] & un).count() < (G.adj[b] & un).count();
        });
        for (int v : cs) {
            visited.set(v);
            path.push_back(v);
            if (dfs(v)) return true;
            path.pop_back();
            visited.reset(v);
        }
        return false;
    }
};

} // namespace detail

inline PathResult hamilton_path(const Graph& G, int x, int y, const VertexSet& W,
                                long long budget = 10'000'000) {
    if (x == y) throw PreconditionError("hamilton_path: x == y");
    if (W.test(x) || W.test(y)) throw PreconditionError("hamilton_path: endpoint in W");
    VertexSet allowed = W.complement();
    detail::HamSearch hs(G, allowed, y, budget);
    VertexSet X(G.n), Y(G.n);
    if (G.bipartition(allowed, X, Y)) {
        // an alternating spanning path needs near-equal sides: equal sides
        // with opposite-side ends, or sides off by one with both ends on the
        // larger side
        int na = X.count(), nb = Y.count();
        if (std::abs(na - nb) > 1)
            throw PreconditionError("hamilton_path: bipartite sides differ by more than 1");
        if (na == nb && X.test(x) == X.test(y))
            throw PreconditionError("hamilton_path: equal sides need opposite-side endpoints");
        if (na != nb) {
            const VertexSet& big = na > nb ? X : Y;
            if (!big.test(x) || !big.test(y))
                throw PreconditionError("hamilton_path: endpoints must lie on the larger side");
        }
        for (int v = allowed.first(); v >= 0; v = allowed.next(v))
            hs.side[v] = X.test(v) ? 0 : 1;
    }
    hs.visited.set(x);
    hs.path.push_back(x);
    if (!hs.dfs(x)) throw NotFound("hamilton_path: search space exhausted", false);
    PathResult r{hs.path};
    if (!r.verify(G) || int(r.vertices.size()) != allowed.count())
        throw InvariantError("hamilton_path: produced path fails verification");
    return r;
}

inline PathResult hamilton_cycle(const Graph& G, long long budget = 10'000'000) {
    if (G.n < 3) throw PreconditionError("hamilton_cycle: n >= 3 required");
    bool budget_hit = false;
    for (int u = G.adj[0].first(); u >= 0; u = G.adj[0].next(u)) {
        try {
            PathResult p = hamilton_path(G, 0, u, VertexSet(G.n), budget);
            return p; // closing edge u-0 exists by choice of u
        } catch (const NotFound& e) {
            if (e.budget_exhausted) budget_hit = true;
        } catch (const PreconditionError&) {
        }
    }
    throw NotFound("hamilton_cycle: no closing neighbor worked", budget_hit);
}

// Auxiliary-digraph route: perfect matching a_i b_i with a_1 = x, b_t = y;
// digraph D on pairs with v_i -> v_j iff b_i a_j in E; a Hamilton path
// v_1 -> v_t translates to x = a_1, b_1, ..., a_t, b_t = y. All perfect
// matchings are enumerated, which makes existence agree with direct search:
// a Hamilton path's odd edges are themselves a perfect matching.
inline PathResult bipartite_hamilton_via_matching(const Graph& G, int x, int y,
                                                  long long budget = 10'000'000) {
    VertexSet X(G.n), Y(G.n);
    if (!G.bipartition(VertexSet::full(G.n), X, Y))
        throw PreconditionError("bip_ham: G not bipartite");
    // isolated vertices can never lie on a spanning path
    for (int v = 0; v < G.n; ++v)
        if (G.degree(v) == 0 && G.n > 1)
            throw NoMatching("bip_ham: isolated vertex");
    if (!X.test(x)) std::swap(X, Y);
    if (!X.test(x) || !Y.test(y))
        throw PreconditionError("bip_ham: x, y must be on opposite sides");
    if (X.count() != Y.count())
        throw PreconditionError("bip_ham: sides unbalanced");
    int t = X.count();
    if (t == 1) {
        if (!G.has_edge(x, y)) throw NotFound("bip_ham: no edge", false);
        return PathResult{{x, y}};
    }
    std::vector<int> Xv = X.to_vector(), Yv = Y.to_vector();
    // require a perfect matching to exist at all
    {
        Matching M = max_matching(G);
        if (2 * int(M.edges.size()) != G.n) throw NoMatching("bip_ham: no perfect matching");
    }

    std::vector<int> partner(G.n, -1);
    std::vector<int> order = Xv; // assign partners in this order
    bool budget_hit = false;

    std::function<bool(size_t)> enumerate = [&](size_t i) -> bool {
        if (i == order.size()) {
            // pairs (a, partner[a]); find directed Hamilton path x-pair -> y-pair
            std::vector<std::pair<int,int>> pairs;
            int start = -1, goal = -1;
            for (int a : Xv) {
                if (a == x) start = int(pairs.size());
                if (partner[a] == y) goal = int(pairs.size());
                pairs.emplace_back(a, partner[a]);
            }
            int m = int(pairs.size());
            std::vector<std::vector<int>> out(m);
            for (int i2 = 0; i2 < m; ++i2)
                for (int j = 0; j < m; ++j)
                    if (i2 != j && G.has_edge(pairs[i2].second, pairs[j].first))
                        out[i2].push_back(j);
            std::vector<bool> vis(m, false);
            std::vector<int> seq;
            long long nodes = budget;
            std::function<bool(int)> dfs = [&](int v) -> bool {
                if (--nodes < 0) { budget_hit = true; return false; }
                seq.push_back(v);
                vis[v] = true;
                if (int(seq.size()) == m) {
                    if (v == goal) return true;
                } else {
                    for (int u : out[v])
                        if (!vis[u] && dfs(u)) return true;
                }
                seq.pop_back();
                vis[v] = false;
                return false;
            };
            if (dfs(start)) {
                std::vector<int> verts;
                for (int p : seq) {
                    verts.push_back(pairs[p].first);
                    verts.push_back(pairs[p].second);
                }
                PathResult r{verts};
                if (!r.verify(G) || int(verts.size()) != G.n)
                    throw InvariantError("bip_ham: translation failed verification");
                if (verts.front() != x || verts.back() != y)
                    throw InvariantError("bip_ham: wrong endpoints after translation");
                throw r; // unwound below
            }
            return false;
        }
        int a = order[i];
        VertexSet cand = G.adj[a] & Y;
        for (int b = cand.first(); b >= 0; b = cand.next(b)) {
            if (partner[b] != -1) continue;
            if (a == x && b == y) continue; // proof's convenience: avoid edge xy
            if (b == y && a == x) continue;
            partner[a] = b;
            partner[b] = a;
            if (enumerate(i + 1)) return true;
            partner[a] = -1;
            partner[b] = -1;
        }
        return false;
    };
    try {
        enumerate(0);
    } catch (PathResult& r) {
        return r;
    }
    throw NotFound("bip_ham: all matchings exhausted", budget_hit);
}

// BFS shortest path inside Z \ W (restricted to cross edges of the given
// sides when the class is almost-bipartite); length must be <= ceil(15/delta).
inline PathResult robust_short_path(const Graph& G, const VertexSet& Z,
                                    const std::optional<std::pair<VertexSet, VertexSet>>& sides,
                                    int p, int q, const VertexSet& W, double delta) {
    VertexSet U = Z.and_not(W);
    if (!U.test(p) || !U.test(q))
        throw PreconditionError("robust_short_path: endpoint outside Z\\W");
    auto neighbors = [&](int v) {
        VertexSet nb = G.adj[v] & U;
        if (sides) {
            // keep only cross edges of the largest bipartite subgraph
            if (sides->first.test(v)) nb &= sides->second;
            else nb &= sides->first;
        }
        return nb;
    };
    std::vector<int> par(G.n, -2);
    std::queue<int> bfs;
    par[p] = -1;
    bfs.push(p);
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        if (v == q) break;
        VertexSet nb = neighbors(v);
        for (int u = nb.first(); u >= 0; u = nb.next(u))
            if (par[u] == -2) {
                par[u] = v;
                bfs.push(u);
            }
    }
    if (par[q] == -2) throw Disconnected("robust_short_path: q unreachable");
    std::vector<int> verts;
    for (int v = q; v != -1; v = par[v]) verts.push_back(v);
    std::reverse(verts.begin(), verts.end());
    int len = int(verts.size()) - 1;
    int bound = int(std::ceil(15.0 / delta));
    if (len > bound)
        throw TooLong("robust_short_path: length " + std::to_string(len) +
                      " exceeds " + std::to_string(bound));
    return PathResult{verts};
}

} // namespace tiler

#endif
