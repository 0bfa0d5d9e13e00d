#ifndef TILER_BALANCE_HPP
#define TILER_BALANCE_HPP

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "decompose.hpp"
#include "graph.hpp"
#include "ktt.hpp"
#include "packing.hpp"
#include "params.hpp"

namespace tiler {

// Side-indexed view: side 2i = X_i, side 2i+1 = Y_i.
struct BalanceState {
    Graph G;                  // host (d-regular)
    Graph H;                  // tracked subgraph, H subseteq G
    int d = 0;
    ParamPack params;
    std::vector<std::pair<VertexSet, VertexSet>> sides; // current (X_i, Y_i)
    std::vector<ClassLabel> labels;                     // start labels
    std::vector<std::pair<VertexSet, VertexSet>> start_sides;
    int moved = 0;
    long long steps = 0;
    long long e_H_start = 0;
    int maxdeg_H_start = 0;
    std::vector<std::string> trace; // one line per Algorithm-1 step

    int r() const { return int(sides.size()); }
    VertexSet Z(int i) const { return sides[i].first | sides[i].second; }
    const VertexSet& side(int s) const {
        return s % 2 == 0 ? sides[s / 2].first : sides[s / 2].second;
    }
    VertexSet& side(int s) {
        return s % 2 == 0 ? sides[s / 2].first : sides[s / 2].second;
    }
    // e_H(W, W') with the single-count convention for W = W'
    long long eH(int a, int b) const {
        if (a == b) return H.e_inside(side(a));
        return H.e_between(side(a), side(b));
    }

    // (H1): exact integer identity per class
    long long h1_value(int i) const {
        const VertexSet& X = sides[i].first;
        const VertexSet& Y = sides[i].second;
        VertexSet cZ = Z(i).complement();
        return (H.e_between(X, cZ) - H.e_between(Y, cZ)) +
               2 * (H.e_inside(X) - H.e_inside(Y)) -
               (long long)d * (X.count() - Y.count());
    }

    void check_invariants(const char* where) const {
        int n = G.n;
        for (int i = 0; i < r(); ++i) {
            if (h1_value(i) != 0)
                throw InvariantError(std::string(where) + ": (H1) violated at class " +
                                     std::to_string(i));
            if (H.e_between(sides[i].first, sides[i].second) != 0)
                throw InvariantError(std::string(where) + ": (H1b) violated at class " +
                                     std::to_string(i));
        }
        int cap = d - int(std::floor(params.delta * n / 3.0));
        if (H.max_degree() > cap)
            throw InvariantError(std::string(where) + ": (H2) violated, max degree " +
                                 std::to_string(H.max_degree()) + " > " + std::to_string(cap));
        double h3cap = 2.0 * r() * params.beta * double(n) * double(n);
        if (double(H.edge_count()) > h3cap)
            throw InvariantError(std::string(where) + ": (H3) violated, e(H) = " +
                                 std::to_string(H.edge_count()));
    }
};

// H := G minus within-class X-Y edges minus min(e(X_i), e(Y_i))
// lexicographically-lowest edges from each side. Far-from-bipartite classes
// without caller-provided sides get a random balanced partition resampled
// until (G1) |e(X)-e(Y)| <= beta n^2 and (G2) min cross-degree >= delta n/3.
inline BalanceState build_inter_class_graph(const Graph& G, const Decomposition& dec,
                                            uint64_t seed = 1) {
    BalanceState st;
    st.G = G;
    st.params = dec.params;
    if (!G.is_regular(&st.d))
        throw ValidationError("build_inter_class_graph: G not regular");
    int n = G.n;
    std::mt19937_64 rng(seed);

    for (size_t i = 0; i < dec.classes.size(); ++i) {
        const VertexSet& Zi = dec.classes[i];
        st.labels.push_back(dec.labels.empty() ? ClassLabel::FarFromBipartite : dec.labels[i]);
        if (dec.sided[i]) {
            st.sides.push_back(*dec.sided[i]);
            continue;
        }
        // random balanced partition with (G1)/(G2), max 50 resamples
        std::vector<int> ids = Zi.to_vector();
        bool ok = false;
        for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
            std::shuffle(ids.begin(), ids.end(), rng);
            VertexSet X(n), Y(n);
            for (size_t k = 0; k < ids.size(); ++k)
                (k < ids.size() / 2 ? X : Y).set(ids[k]);
            if (std::abs(double(G.e_inside(X) - G.e_inside(Y))) >
                dec.params.beta * double(n) * double(n))
                continue;
            bool deg_ok = true;
            for (int v = Zi.first(); v >= 0 && deg_ok; v = Zi.next(v)) {
                const VertexSet& other = X.test(v) ? Y : X;
                if (G.deg_in(v, other) < dec.params.delta * n / 3.0) deg_ok = false;
            }
            if (!deg_ok) continue;
            st.sides.emplace_back(X, Y);
            ok = true;
        }
        if (!ok)
            throw ValidationError("build_inter_class_graph: no (G1)/(G2) partition for class " +
                                  std::to_string(i));
    }
    st.start_sides = st.sides;

    st.H = G;
    for (int i = 0; i < st.r(); ++i) {
        const VertexSet& X = st.sides[i].first;
        const VertexSet& Y = st.sides[i].second;
        // all X-Y edges go
        for (int u = X.first(); u >= 0; u = X.next(u)) {
            VertexSet nb = st.H.adj[u] & Y;
            for (int v = nb.first(); v >= 0; v = nb.next(v)) st.H.remove_edge(u, v);
        }
        // equal numbers of lexicographically-lowest within-side edges go
        long long m = std::min(st.H.e_inside(X), st.H.e_inside(Y));
        auto strip = [&](const VertexSet& S, long long cnt) {
            for (int u = S.first(); u >= 0 && cnt > 0; u = S.next(u)) {
                VertexSet nb = st.H.adj[u] & S;
                for (int v = nb.next(u); v >= 0 && cnt > 0; v = nb.next(v)) {
                    st.H.remove_edge(u, v);
                    --cnt;
                }
            }
            assert(cnt == 0);
        };
        strip(X, m);
        strip(Y, m);
    }
    st.e_H_start = st.H.edge_count();
    st.maxdeg_H_start = st.H.max_degree();
    st.check_invariants("build_inter_class_graph");
    return st;
}

// Algorithm 1 to fixpoint: fixed lexicographic scan over (side a, side b, v).
inline BalanceState move_high_degree_vertices(BalanceState st) {
    int n = st.G.n;
    double rho_n = st.params.rho * n;
    for (;;) {
        int found_a = -1, found_b = -1, found_v = -1;
        for (int a = 0; a < 2 * st.r() && found_v < 0; ++a) {
            for (int b = 0; b < 2 * st.r() && found_v < 0; ++b) {
                if (st.eH(a, b) < st.d) continue;
                const VertexSet& Wa = st.side(a);
                const VertexSet& Wb = st.side(b);
                for (int v = Wa.first(); v >= 0; v = Wa.next(v)) {
                    int dv = st.H.deg_in(v, Wb);
                    if (dv >= rho_n && dv >= 1) { found_a = a; found_b = b; found_v = v; break; }
                }
            }
        }
        if (found_v < 0) break;
        int a = found_a, b = found_b, v = found_v;
        int dHv = st.H.degree(v);
        int need = st.d - dHv;
        VertexSet Wa = st.side(a);
        VertexSet Wb = st.side(b);
        // remove E_{i,j}: lexicographically lowest `need` edges of
        // H[W_a \ {v}, W_b \ {v}]
        VertexSet Wa2 = Wa, Wb2 = Wb;
        Wa2.reset(v);
        if (Wb2.test(v)) Wb2.reset(v);
        int removed = 0;
        if (a == b) {
            for (int u = Wa2.first(); u >= 0 && removed < need; u = Wa2.next(u)) {
                VertexSet nb = st.H.adj[u] & Wa2;
                for (int w = nb.next(u); w >= 0 && removed < need; w = nb.next(w)) {
                    st.H.remove_edge(u, w);
                    ++removed;
                }
            }
        } else {
            for (int u = Wa2.first(); u >= 0 && removed < need; u = Wa2.next(u)) {
                VertexSet nb = st.H.adj[u] & Wb2;
                for (int w = nb.first(); w >= 0 && removed < need; w = nb.next(w)) {
                    st.H.remove_edge(u, w);
                    ++removed;
                }
            }
        }
        if (removed < need)
            throw InvariantError("move_high_degree_vertices: not enough E_ij edges");
        // remove all H-edges v--W_b, then move v to U_b (the opposite side
        // of b's class)
        VertexSet nb = st.H.adj[v] & Wb;
        for (int u = nb.first(); u >= 0; u = nb.next(u)) st.H.remove_edge(v, u);
        st.side(a).reset(v);
        int ub = (b % 2 == 0) ? b + 1 : b - 1; // U_j is the other side of class j
        st.side(ub).set(v);
        ++st.moved;
        ++st.steps;
        std::ostringstream line;
        line << "step " << st.steps << ": v=" << v << " from (" << a / 2 << ","
             << (a % 2 == 0 ? "X" : "Y") << ") to (" << b / 2 << ","
             << (ub % 2 == 0 ? "X" : "Y") << ") |E_ij|=" << need
             << " e(H)=" << st.H.edge_count();
        st.trace.push_back(line.str());
        st.check_invariants("move_high_degree_vertices");
    }
    // (H5): termination certificate
    for (int a = 0; a < 2 * st.r(); ++a)
        for (int b = 0; b < 2 * st.r(); ++b) {
            if (st.eH(a, b) < st.d) continue;
            for (int v = st.side(a).first(); v >= 0; v = st.side(a).next(v))
                if (st.H.deg_in(v, st.side(b)) >= st.params.rho * n &&
                    st.H.deg_in(v, st.side(b)) >= 1)
                    throw InvariantError("move_high_degree_vertices: (H5) fails after fixpoint");
        }
    // step-count bound: each step removes >= d - maxdeg(H_start) edges
    long long per_step = st.d - st.maxdeg_H_start;
    if (per_step > 0 && st.steps > st.e_H_start / per_step)
        throw InvariantError("move_high_degree_vertices: step count exceeds e(H)/(d - maxdeg)");
    return st;
}

// Balancing collection: for each side pair (a <= b in the side ordering, as
// unordered class-side pairs) with e_H >= T*d, exactly floor(e_H/d) copies,
// each straddling the pair with the (+1 / +2) skew of the per-copy shape.
inline KttPacking build_balancing_ktt_collection(const BalanceState& st, int t, int T) {
    KttPacking K;
    VertexSet used(st.G.n);
    struct PairJob { int a, b; long long e; };
    std::vector<PairJob> jobs;
    for (int a = 0; a < 2 * st.r(); ++a)
        for (int b = a; b < 2 * st.r(); ++b) {
            if (a / 2 == b / 2 && a != b) continue; // (X_i, Y_i): e_H = 0 anyway
            long long e = st.eH(a, b);
            if (e >= (long long)T * st.d) jobs.push_back({a, b, e});
        }
    // the Claim's induction goes in increasing order of e_H
    std::sort(jobs.begin(), jobs.end(), [](const PairJob& x, const PairJob& y) {
        if (x.e != y.e) return x.e < y.e;
        return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
    });
    for (const auto& job : jobs) {
        long long want = job.e / st.d;
        int ub = (job.b % 2 == 0) ? job.b + 1 : job.b - 1; // U_j side
        for (long long c = 0; c < want; ++c) {
            VertexSet Wa = st.side(job.a).and_not(used);
            VertexSet Wb = st.side(job.b).and_not(used);
            VertexSet Ub = st.side(ub).and_not(used);
            // pick v in W_a of maximal H-degree into W_b \ used, then a
            // K_{t,t-1} in G[A, U_b] with A = N_H(v) cap W_b
            std::vector<int> cands = Wa.to_vector();
            std::sort(cands.begin(), cands.end(), [&](int x, int y) {
                int dx = st.H.deg_in(x, Wb), dy = st.H.deg_in(y, Wb);
                return dx != dy ? dx > dy : x < y;
            });
            bool placed = false;
            for (int v : cands) {
                VertexSet A = st.H.adj[v] & Wb;
                A.reset(v);
                if (A.count() < t) break;
                VertexSet Ub2 = Ub;
                Ub2.reset(v);
                // t-subset of A plus t-1 common G-neighbors in U_b, plus v
                std::vector<int> Av = A.to_vector();
                if (int(Av.size()) > 24) {
                    std::sort(Av.begin(), Av.end(), [&](int x, int y) {
                        int dx = st.G.deg_in(x, Ub2), dy = st.G.deg_in(y, Ub2);
                        return dx != dy ? dx > dy : x < y;
                    });
                    Av.resize(24);
                }
                detail::for_each_subset(Av, t, [&](const std::vector<int>& Bs) {
                    VertexSet common = Ub2;
                    for (int y : Bs) common &= st.G.adj[y];
                    for (int y : Bs) common.reset(y);
                    if (common.count() < t - 1) return false;
                    KttCopy k;
                    k.sideA = {v};
                    for (int u = common.first(); u >= 0 && int(k.sideA.size()) < t;
                         u = common.next(u))
                        k.sideA.push_back(u);
                    k.sideB = Bs;
                    k.tag = "K";
                    if (!k.valid_in(st.G)) return false;
                    for (int u : k.sideA) used.set(u);
                    for (int u : k.sideB) used.set(u);
                    K.copies.push_back(k);
                    placed = true;
                    return true;
                });
                if (placed) break;
            }
            if (!placed)
                throw SearchExhausted("build_balancing_ktt_collection: pair (" +
                                      std::to_string(job.a) + "," + std::to_string(job.b) +
                                      ") copy " + std::to_string(c));
            // per-copy shape recount (the +1/+2 skew)
            const KttCopy& k = K.copies.back();
            VertexSet vk = k.vertex_set(st.G.n);
            int want_skew = (job.a / 2 == job.b / 2) ? 2 : 1;
            for (int s : {job.a, job.b}) {
                int us = (s % 2 == 0) ? s + 1 : s - 1;
                int skew = vk.intersect_count(st.side(s)) - vk.intersect_count(st.side(us));
                if (skew != want_skew)
                    throw InvariantError("build_balancing_ktt_collection: per-copy skew " +
                                         std::to_string(skew) + " != " +
                                         std::to_string(want_skew));
            }
        }
    }
    // the collection-level balance identity with the configured-T slack
    VertexSet VK = K.covered(st.G.n);
    for (int i = 0; i < st.r(); ++i) {
        long long lhs = VK.intersect_count(st.sides[i].first) -
                        VK.intersect_count(st.sides[i].second);
        long long rhs = (long long)st.sides[i].first.count() - st.sides[i].second.count();
        if (std::llabs(lhs - rhs) > 8LL * st.r() * T)
            throw InvariantError("build_balancing_ktt_collection: (4.3) slack exceeded at class " +
                                 std::to_string(i));
    }
    if (double(K.copies.size()) > double(st.H.edge_count()) / st.d)
        throw InvariantError("build_balancing_ktt_collection: |K| > e(H)/d");
    return K;
}

struct TrimResult {
    std::vector<VertexSet> classes; // Z'_i
    std::vector<std::optional<std::pair<VertexSet, VertexSet>>> sides; // equal-size X'_i, Y'_i
    std::vector<ClassLabel> labels;
    VertexSet L;         // V(packing)
    VertexSet discarded;
    Graph Gprime;        // G minus within-side edges of almost-bipartite classes
};

// Equalize the sides of every class outside L by discarding a few vertices;
// almost-bipartite classes additionally land on side sizes divisible by 2t
// so the per-class pipeline never needs an unbalanced drop.
inline TrimResult trim_to_balance(const BalanceState& st, const KttPacking& packing, int t) {
    TrimResult tr;
    tr.L = packing.covered(st.G.n);
    tr.discarded = VertexSet(st.G.n);
    int T = st.params.T;
    for (int i = 0; i < st.r(); ++i) {
        VertexSet X = st.sides[i].first.and_not(tr.L);
        VertexSet Y = st.sides[i].second.and_not(tr.L);
        long long diff = (long long)X.count() - Y.count();
        if (std::llabs(diff) > 8LL * st.r() * T)
            throw ValidationError("trim_to_balance: imbalance exceeds 8rT at class " +
                                  std::to_string(i));
        auto discard_from = [&](VertexSet& S, long long cnt) {
            // lowest-degree-in-class first
            VertexSet Zi = X | Y;
            std::vector<int> ids = S.to_vector();
            std::sort(ids.begin(), ids.end(), [&](int a, int b) {
                int da = st.G.deg_in(a, Zi), db = st.G.deg_in(b, Zi);
                return da != db ? da < db : a < b;
            });
            for (int k = 0; k < cnt; ++k) {
                S.reset(ids[k]);
                tr.discarded.set(ids[k]);
            }
        };
        if (diff > 0) discard_from(X, diff);
        if (diff < 0) discard_from(Y, -diff);
        if (st.labels[i] == ClassLabel::AlmostBipartite) {
            int extra = X.count() % (2 * t);
            if (extra > 0) {
                discard_from(X, extra);
                discard_from(Y, extra);
            }
        }
        tr.classes.push_back(X | Y);
        if (st.labels[i] == ClassLabel::AlmostBipartite)
            tr.sides.push_back(std::make_pair(X, Y));
        else
            tr.sides.push_back(std::nullopt);
        tr.labels.push_back(st.labels[i]);
        if (X.count() != Y.count())
            throw ValidationError("trim_to_balance: sides unequal after trim");
    }
    // (B1): operational discard bound for the configured T
    long long cap = 16LL * st.r() * st.r() * T + 2LL * st.r() * (2 * t - 1);
    if (tr.discarded.count() > cap)
        throw ValidationError("trim_to_balance: discard bound exceeded");

    // G' drops within-side edges of almost-bipartite classes (start labels)
    tr.Gprime = st.G;
    for (int i = 0; i < st.r(); ++i) {
        if (st.labels[i] != ClassLabel::AlmostBipartite || !tr.sides[i]) continue;
        for (const VertexSet& S : {tr.sides[i]->first, tr.sides[i]->second}) {
            for (int u = S.first(); u >= 0; u = S.next(u)) {
                VertexSet nb = tr.Gprime.adj[u] & S;
                for (int v = nb.next(u); v >= 0; v = nb.next(v)) tr.Gprime.remove_edge(u, v);
            }
        }
    }

    int n = st.G.n;
    for (int i = 0; i < st.r(); ++i) {
        const VertexSet& Zp = tr.classes[i];
        if (!Zp.any()) continue;
        // (B2): healthy average degree inside the trimmed class
        long long deg_sum = 2 * tr.Gprime.e_inside(Zp);
        if (double(deg_sum) / Zp.count() < st.params.delta * n / 3.0)
            throw ValidationError("trim_to_balance: (B2) average degree too low at class " +
                                  std::to_string(i));
        // (B3): no rho/8-sparse cut (exhaustive for small classes)
        if (Zp.count() >= 2) {
            if (find_sparse_cut_in(tr.Gprime, Zp, st.params.rho / 8.0, 17))
                throw ValidationError("trim_to_balance: (B3) sparse cut found in class " +
                                      std::to_string(i));
        }
        // (B4): almost-bipartite classes are bipartite and balanced in G'
        if (tr.sides[i]) {
            if (tr.Gprime.e_inside(tr.sides[i]->first) != 0 ||
                tr.Gprime.e_inside(tr.sides[i]->second) != 0)
                throw ValidationError("trim_to_balance: (B4) within-side edges remain");
        }
    }
    // (B5): L is perfectly packed by the recorded copies (re-verified)
    auto verdict = verify_packing(st.G, packing, t);
    if (!verdict.ok || !(packing.covered(n) == tr.L))
        throw ValidationError("trim_to_balance: (B5) packing does not tile L");
    // classes + L + discarded partition V(G)
    VertexSet all = tr.L | tr.discarded;
    for (const auto& Zp : tr.classes) {
        if (Zp.intersects(all))
            throw InvariantError("trim_to_balance: partition overlap");
        all |= Zp;
    }
    if (all.count() != n)
        throw InvariantError("trim_to_balance: classes + L + discarded do not cover V(G)");
    return tr;
}

} // namespace tiler

#endif
