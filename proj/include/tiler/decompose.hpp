#ifndef TILER_DECOMPOSE_HPP
#define TILER_DECOMPOSE_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "params.hpp"

namespace tiler {

enum class ClassLabel { AlmostBipartite, FarFromBipartite };

struct Decomposition {
    std::vector<VertexSet> classes;
    // sided[i] = (X_i, Y_i) with X|Y = Z_i; may be unset until siding happens
    std::vector<std::optional<std::pair<VertexSet, VertexSet>>> sided;
    std::vector<ClassLabel> labels;
    ParamPack params;
    nlohmann::json report;
};

// minimum-sparsity cut of G[Z] by exhaustion; Z has >= 2 vertices.
// Returns the S side (within the original universe) and its sparsity.
inline std::pair<VertexSet, double> min_sparsity_cut_exhaustive(const Graph& G, const VertexSet& Z) {
    std::vector<int> ids = Z.to_vector();
    int k = int(ids.size());
    assert(k >= 2 && k <= 24);
    double best = 2.0;
    uint64_t best_mask = 1;
    for (uint64_t mask = 1; mask < (uint64_t{1} << (k - 1)); ++mask) {
        // vertex ids[k-1] stays on the complement side -> each cut once
        VertexSet S(G.n);
        int a = 0;
        for (int i = 0; i < k - 1; ++i)
            if ((mask >> i) & 1) { S.set(ids[i]); ++a; }
        if (a == 0) continue;
        VertexSet T = Z.and_not(S);
        long long cross = G.e_between(S, T);
        double sp = double(cross) / (double(a) * double(k - a));
        if (sp < best) { best = sp; best_mask = mask; }
    }
    VertexSet S(G.n);
    for (int i = 0; i < k - 1; ++i)
        if ((best_mask >> i) & 1) S.set(ids[i]);
    return {S, best};
}

namespace detail {

// seeded local search for a low-sparsity cut of G[Z]: random balanced start,
// greedy single-vertex moves on sparsity, multi-start
inline std::pair<VertexSet, double> low_sparsity_cut_local(const Graph& G, const VertexSet& Z,
                                                           uint64_t seed, int starts = 8) {
    std::vector<int> ids = Z.to_vector();
    int k = int(ids.size());
    std::mt19937_64 rng(seed);
    double best = 2.0;
    VertexSet best_S(G.n);
    for (int s = 0; s < starts; ++s) {
        std::shuffle(ids.begin(), ids.end(), rng);
        VertexSet S(G.n);
        for (int i = 0; i < k / 2; ++i) S.set(ids[i]);
        bool improved = true;
        while (improved) {
            improved = false;
            long long cross = G.e_between(S, Z.and_not(S));
            int a = S.count();
            double cur = double(cross) / (double(a) * double(k - a));
            for (int v : ids) {
                bool in = S.test(v);
                int na = in ? a - 1 : a + 1;
                if (na == 0 || na == k) continue;
                VertexSet T = Z.and_not(S);
                // moving v flips its own cross/inside contribution
                long long dS = G.deg_in(v, S) - (in ? 0 : 0);
                long long dT = G.deg_in(v, T);
                long long ncross = in ? cross - dT + (dS) : cross - dS + dT;
                double cand = double(ncross) / (double(na) * double(k - na));
                if (cand + 1e-15 < cur) {
                    if (in) S.reset(v); else S.set(v);
                    a = na;
                    cross = ncross;
                    cur = cand;
                    improved = true;
                }
            }
        }
        long long cross = G.e_between(S, Z.and_not(S));
        int a = S.count();
        if (a > 0 && a < k) {
            double sp = double(cross) / (double(a) * double(k - a));
            if (sp < best) { best = sp; best_S = S; }
        }
    }
    return {best_S, best};
}

} // namespace detail

// Exhaustive for |Z| <= 20; local search above. Any returned cut is verified
// genuinely zeta-sparse; a miss above n=20 is only a heuristic certificate.
inline std::optional<VertexSet> find_sparse_cut_in(const Graph& G, const VertexSet& Z,
                                                   double zeta, uint64_t seed = 1) {
    int k = Z.count();
    if (k < 2) return std::nullopt;
    VertexSet S(G.n);
    double sp;
    if (k <= 20) {
        std::tie(S, sp) = min_sparsity_cut_exhaustive(G, Z);
    } else {
        std::tie(S, sp) = detail::low_sparsity_cut_local(G, Z, seed);
    }
    if (sp <= zeta) {
        // re-verify before returning
        VertexSet T = Z.and_not(S);
        long long cross = G.e_between(S, T);
        assert(cross <= zeta * double(S.count()) * double(T.count()) + 1e-9);
        return S;
    }
    return std::nullopt;
}

inline std::optional<VertexSet> find_sparse_cut(const Graph& G, double zeta, uint64_t seed = 1) {
    return find_sparse_cut_in(G, VertexSet::full(G.n), zeta, seed);
}

// Locally-optimal max-cut bipartition of G[Z]; exact for |Z| <= 20.
inline std::pair<VertexSet, VertexSet> max_cut_bipartition(const Graph& G, const VertexSet& Z,
                                                           uint64_t seed = 1) {
    std::vector<int> ids = Z.to_vector();
    int k = int(ids.size());
    assert(k >= 2);
    VertexSet X(G.n);
    if (k <= 20) {
        long long best = -1;
        uint64_t best_mask = 0;
        for (uint64_t mask = 0; mask < (uint64_t{1} << (k - 1)); ++mask) {
            VertexSet S(G.n);
            for (int i = 0; i < k - 1; ++i)
                if ((mask >> i) & 1) S.set(ids[i]);
            long long cross = G.e_between(S, Z.and_not(S));
            if (cross > best) { best = cross; best_mask = mask; }
        }
        for (int i = 0; i < k - 1; ++i)
            if ((best_mask >> i) & 1) X.set(ids[i]);
    } else {
        std::mt19937_64 rng(seed);
        std::shuffle(ids.begin(), ids.end(), rng);
        for (int i = 0; i < k / 2; ++i) X.set(ids[i]);
    }
    // local moves until every vertex has >= half its Z-degree across
    bool improved = true;
    while (improved) {
        improved = false;
        for (int v = Z.first(); v >= 0; v = Z.next(v)) {
            VertexSet Y = Z.and_not(X);
            bool in = X.test(v);
            int same = G.deg_in(v, in ? X : Y);
            int other = G.deg_in(v, in ? Y : X);
            if (same > other) {
                if (in) X.reset(v); else X.set(v);
                improved = true;
            }
        }
    }
    return {X, Z.and_not(X)};
}

inline ClassLabel classify_class(const Graph& G, const VertexSet& Z, const VertexSet& X,
                                 const ParamPack& p) {
    // distance measured inside G[Z] with sides {X, Z\X}
    VertexSet Y = Z.and_not(X);
    long long dist = G.e_inside(X) + G.e_inside(Y);
    double zz = double(Z.count()) * double(Z.count());
    if (dist <= p.beta * zz) return ClassLabel::AlmostBipartite;
    if (dist >= p.gamma * zz) return ClassLabel::FarFromBipartite;
    throw GapError("classify_class: bipartite distance " + std::to_string(dist) +
                   " strictly between beta|Z|^2 and gamma|Z|^2");
}

inline Decomposition expander_decompose(const Graph& G, const ParamPack& p, uint64_t seed = 1) {
    p.validate();
    int d;
    if (!G.is_regular(&d)) throw ValidationError("expander_decompose: G not regular");
    if (d < p.c * G.n) throw ValidationError("expander_decompose: d < c*n");

    std::vector<VertexSet> work{VertexSet::full(G.n)};
    std::vector<VertexSet> done;
    int max_r = p.max_classes();
    while (!work.empty()) {
        VertexSet Z = work.back();
        work.pop_back();
        std::optional<VertexSet> cut;
        if (int(done.size() + work.size()) + 1 < max_r)
            cut = find_sparse_cut_in(G, Z, p.zeta, seed);
        if (cut && cut->count() > 0 && Z.and_not(*cut).count() > 0) {
            work.push_back(*cut);
            work.push_back(Z.and_not(*cut));
        } else {
            done.push_back(Z);
        }
    }

    Decomposition dec;
    dec.params = p;
    dec.classes = done;
    nlohmann::json rep;

    // E1: cross-class edges <= eta n^2
    long long cross = 0;
    for (size_t i = 0; i < done.size(); ++i)
        for (size_t j = i + 1; j < done.size(); ++j)
            cross += G.e_between(done[i], done[j]);
    rep["E1"] = {{"cross_edges", cross}, {"bound", p.eta * G.n * G.n},
                 {"pass", double(cross) <= p.eta * G.n * G.n}};
    if (double(cross) > p.eta * G.n * G.n)
        throw ValidationError("expander_decompose: E1 failed (cross edges " +
                              std::to_string(cross) + ")");

    // E2: per-class min degree >= delta n
    long long min_deg = G.n;
    for (const auto& Z : done)
        for (int v = Z.first(); v >= 0; v = Z.next(v))
            min_deg = std::min<long long>(min_deg, G.deg_in(v, Z));
    rep["E2"] = {{"min_class_degree", min_deg}, {"bound", p.delta * G.n},
                 {"pass", double(min_deg) >= p.delta * G.n}};
    if (double(min_deg) < p.delta * G.n)
        throw ValidationError("expander_decompose: E2 failed (min class degree " +
                              std::to_string(min_deg) + ")");

    // E3: no zeta-sparse cut inside any class (heuristic certificate above 20)
    for (size_t i = 0; i < done.size(); ++i) {
        if (find_sparse_cut_in(G, done[i], p.zeta, seed + 17 * i))
            throw ValidationError("expander_decompose: E3 failed on class " + std::to_string(i));
    }
    rep["E3"] = {{"pass", true}};

    // E4: dichotomy labels from the max-cut bipartition
    for (size_t i = 0; i < done.size(); ++i) {
        auto [X, Y] = max_cut_bipartition(G, done[i], seed + 31 * i);
        ClassLabel lab = classify_class(G, done[i], X, p);
        dec.labels.push_back(lab);
        if (lab == ClassLabel::AlmostBipartite)
            dec.sided.push_back(std::make_pair(X, Y));
        else
            dec.sided.push_back(std::nullopt);
    }
    rep["E4"] = {{"pass", true}};
    rep["r"] = done.size();
    dec.report = rep;
    return dec;
}

inline nlohmann::json decomposition_to_json(const Decomposition& dec) {
    nlohmann::json j;
    j["classes"] = nlohmann::json::array();
    for (const auto& Z : dec.classes) j["classes"].push_back(Z.to_vector());
    j["sided"] = nlohmann::json::array();
    for (const auto& s : dec.sided) {
        if (s) j["sided"].push_back({s->first.to_vector(), s->second.to_vector()});
        else j["sided"].push_back(nullptr);
    }
    j["labels"] = nlohmann::json::array();
    for (auto l : dec.labels)
        j["labels"].push_back(l == ClassLabel::AlmostBipartite ? "AlmostBipartite" : "FarFromBipartite");
    j["params"] = {{"eta", dec.params.eta}, {"beta", dec.params.beta}, {"xi", dec.params.xi},
                   {"gamma", dec.params.gamma}, {"zeta", dec.params.zeta},
                   {"delta", dec.params.delta}, {"rho", dec.params.rho},
                   {"c", dec.params.c}, {"t", dec.params.t}};
    j["report"] = dec.report;
    return j;
}

} // namespace tiler

#endif
