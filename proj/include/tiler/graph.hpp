#ifndef TILER_GRAPH_HPP
#define TILER_GRAPH_HPP

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bitset.hpp"
#include "errors.hpp"

namespace tiler {

struct Graph {
    int n = 0;
    std::vector<VertexSet> adj; // n bit-rows, symmetric, no diagonal

    Graph() = default;
    explicit Graph(int n_) : n(n_), adj(n_, VertexSet(n_)) {}

    void add_edge(int u, int v) {
        assert(u != v);
        adj[u].set(v);
        adj[v].set(u);
    }
    void remove_edge(int u, int v) {
        adj[u].reset(v);
        adj[v].reset(u);
    }
    bool has_edge(int u, int v) const { return adj[u].test(v); }
    int degree(int v) const { return adj[v].count(); }
    int deg_in(int v, const VertexSet& S) const { return adj[v].intersect_count(S); }

    long long edge_count() const {
        long long s = 0;
        for (int v = 0; v < n; ++v) s += degree(v);
        return s / 2;
    }
    int max_degree() const {
        int m = 0;
        for (int v = 0; v < n; ++v) m = std::max(m, degree(v));
        return m;
    }

    // edges with both ends in X
    long long e_inside(const VertexSet& X) const {
        long long s = 0;
        for (int v = X.first(); v >= 0; v = X.next(v)) s += adj[v].intersect_count(X);
        return s / 2;
    }
    // edges with one end in X, other in Y; X and Y assumed disjoint
    long long e_between(const VertexSet& X, const VertexSet& Y) const {
        long long s = 0;
        for (int v = X.first(); v >= 0; v = X.next(v)) s += adj[v].intersect_count(Y);
        return s;
    }

    std::vector<std::pair<int,int>> edges() const {
        std::vector<std::pair<int,int>> out;
        for (int u = 0; u < n; ++u)
            for (int v = adj[u].next(u); v >= 0; v = adj[u].next(v))
                out.emplace_back(u, v);
        return out;
    }

    // induced subgraph on S; out_map[i] = original id of new vertex i
    Graph induced(const VertexSet& S, std::vector<int>* out_map = nullptr) const {
        std::vector<int> ids = S.to_vector();
        Graph H(int(ids.size()));
        for (size_t i = 0; i < ids.size(); ++i)
            for (size_t j = i + 1; j < ids.size(); ++j)
                if (has_edge(ids[i], ids[j])) H.add_edge(int(i), int(j));
        if (out_map) *out_map = ids;
        return H;
    }

    bool is_regular(int* out_d = nullptr) const {
        if (n == 0) return true;
        int d = degree(0);
        for (int v = 1; v < n; ++v)
            if (degree(v) != d) return false;
        if (out_d) *out_d = d;
        return true;
    }

    // connected components as vertex sets, restricted to the subuniverse S
    std::vector<VertexSet> components(const VertexSet& S) const {
        std::vector<VertexSet> out;
        VertexSet seen(n);
        for (int s = S.first(); s >= 0; s = S.next(s)) {
            if (seen.test(s)) continue;
            VertexSet comp(n);
            std::vector<int> stack{s};
            comp.set(s);
            seen.set(s);
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                VertexSet nb = adj[v] & S;
                for (int u = nb.first(); u >= 0; u = nb.next(u))
                    if (!seen.test(u)) {
                        seen.set(u);
                        comp.set(u);
                        stack.push_back(u);
                    }
            }
            out.push_back(comp);
        }
        return out;
    }

    // 2-coloring of G[S] if bipartite; sides returned, else false
    bool bipartition(const VertexSet& S, VertexSet& X, VertexSet& Y) const {
        X = VertexSet(n);
        Y = VertexSet(n);
        std::vector<int> color(n, -1);
        for (int s = S.first(); s >= 0; s = S.next(s)) {
            if (color[s] != -1) continue;
            color[s] = 0;
            std::vector<int> stack{s};
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                VertexSet nb = adj[v] & S;
                for (int u = nb.first(); u >= 0; u = nb.next(u)) {
                    if (color[u] == -1) {
                        color[u] = 1 - color[v];
                        stack.push_back(u);
                    } else if (color[u] == color[v]) {
                        return false;
                    }
                }
            }
        }
        for (int v = S.first(); v >= 0; v = S.next(v))
            (color[v] == 0 ? X : Y).set(v);
        return true;
    }
};

struct CutStats {
    long long cross_edges = 0;
    double sparsity = 0.0;
};

inline CutStats cut_stats(const Graph& G, const VertexSet& S) {
    int k = S.count();
    if (k == 0 || k == G.n)
        throw DegenerateCut("cut_stats: S must be a proper nonempty subset");
    VertexSet T = S.complement();
    CutStats cs;
    cs.cross_edges = G.e_between(S, T);
    cs.sparsity = double(cs.cross_edges) / (double(k) * double(G.n - k));
    return cs;
}

// edges to delete so that {X, comp(X)} is a bipartition: e(X) + e(comp X)
inline long long bipartite_distance(const Graph& G, const VertexSet& X) {
    return G.e_inside(X) + G.e_inside(X.complement());
}

// --- generators ---

inline Graph gen_clique_union(int copies, int clique_order) {
    assert(copies >= 1 && clique_order >= 2);
    Graph G(copies * clique_order);
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < clique_order; ++i)
            for (int j = i + 1; j < clique_order; ++j)
                G.add_edge(c * clique_order + i, c * clique_order + j);
    return G;
}

inline Graph gen_complete_bipartite(int a, int b) {
    assert(a >= 1 && b >= 1);
    Graph G(a + b);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j)
            G.add_edge(i, a + j);
    return G;
}

// Configuration model with rejection, then double-edge-switch repair of any
// leftover loop/multi-edge defects. Uniform-enough for property testing.
inline Graph gen_regular(int n, int d, uint64_t seed) {
    if (int64_t(n) * d % 2 != 0) throw ParityError("gen_regular: n*d must be even");
    if (d >= n) throw InfeasibleError("gen_regular: need d < n");
    if (d < 0) throw InfeasibleError("gen_regular: need d >= 0");
    std::mt19937_64 rng(seed);

    // circulant start: offsets 1..d/2, plus the antipode when d is odd
    // (n is even then, by the parity check)
    Graph G(n);
    for (int off = 1; off <= d / 2; ++off)
        for (int v = 0; v < n; ++v)
            if (!G.has_edge(v, (v + off) % n)) G.add_edge(v, (v + off) % n);
    if (d % 2 == 1)
        for (int v = 0; v < n / 2; ++v) G.add_edge(v, v + n / 2);

    // randomize by seeded double-edge switches, which preserve regularity
    std::vector<std::pair<int, int>> E = G.edges();
    if (E.size() >= 2) {
        long long rounds = 10LL * (long long)E.size();
        for (long long it = 0; it < rounds; ++it) {
            size_t i = rng() % E.size(), j = rng() % E.size();
            if (i == j) continue;
            auto [a, b] = E[i];
            auto [c, e] = E[j];
            if (rng() & 1) std::swap(c, e);
            if (a == c || a == e || b == c || b == e) continue;
            if (G.has_edge(a, c) || G.has_edge(b, e)) continue;
            G.remove_edge(a, b);
            G.remove_edge(c, e);
            G.add_edge(a, c);
            G.add_edge(b, e);
            E[i] = {a, c};
            E[j] = {b, e};
        }
    }
    return G;
}

// --- edge-list text format: "n m" then m lines "u v" ---

inline Graph read_edge_list(std::istream& in) {
    int n;
    long long m;
    if (!(in >> n >> m)) throw IoError("edge list: bad header");
    if (n < 0 || m < 0) throw IoError("edge list: negative header");
    Graph G(n);
    for (long long k = 0; k < m; ++k) {
        int u, v;
        if (!(in >> u >> v)) throw IoError("edge list: truncated");
        if (u < 0 || v < 0 || u >= n || v >= n) throw IoError("edge list: id out of range");
        if (u == v) throw IoError("edge list: loop");
        if (G.has_edge(u, v)) throw IoError("edge list: duplicate edge");
        G.add_edge(u, v);
    }
    return G;
}

inline Graph read_edge_list_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    return read_edge_list(f);
}

inline void write_edge_list(std::ostream& out, const Graph& G) {
    auto es = G.edges();
    out << G.n << " " << es.size() << "\n";
    for (auto [u, v] : es) out << u << " " << v << "\n";
}

} // namespace tiler

#endif
