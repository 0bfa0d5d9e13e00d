#ifndef TILER_PACKING_HPP
#define TILER_PACKING_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "graph.hpp"

namespace tiler {

struct KttCopy {
    std::vector<int> sideA; // t distinct vertices
    std::vector<int> sideB; // t distinct vertices, disjoint from sideA
    std::string tag;        // provenance: K, K1, K2, K3, tile, ...

    bool valid_in(const Graph& G) const {
        if (sideA.size() != sideB.size() || sideA.empty()) return false;
        VertexSet seen(G.n);
        for (int v : sideA) {
            if (v < 0 || v >= G.n || seen.test(v)) return false;
            seen.set(v);
        }
        for (int v : sideB) {
            if (v < 0 || v >= G.n || seen.test(v)) return false;
            seen.set(v);
        }
        for (int a : sideA)
            for (int b : sideB)
                if (!G.has_edge(a, b)) return false;
        return true;
    }

    VertexSet vertex_set(int n) const {
        VertexSet s(n);
        for (int v : sideA) s.set(v);
        for (int v : sideB) s.set(v);
        return s;
    }
};

struct KttPacking {
    std::vector<KttCopy> copies;

    VertexSet covered(int n) const {
        VertexSet s(n);
        for (const auto& c : copies) s |= c.vertex_set(n);
        return s;
    }

    void append(const KttPacking& o) {
        copies.insert(copies.end(), o.copies.begin(), o.copies.end());
    }
};

struct PackingVerdict {
    bool ok = true;
    long long leftover = 0;
    std::string detail;
};

inline PackingVerdict verify_packing(const Graph& G, const KttPacking& P, int t) {
    PackingVerdict v;
    VertexSet used(G.n);
    for (size_t i = 0; i < P.copies.size(); ++i) {
        const auto& c = P.copies[i];
        if (int(c.sideA.size()) != t || int(c.sideB.size()) != t) {
            v.ok = false;
            v.detail = "copy " + std::to_string(i) + ": wrong side size";
            return v;
        }
        if (!c.valid_in(G)) {
            v.ok = false;
            v.detail = "copy " + std::to_string(i) + ": not a K_{t,t} of the host";
            return v;
        }
        VertexSet cs = c.vertex_set(G.n);
        if (cs.intersects(used)) {
            v.ok = false;
            v.detail = "copy " + std::to_string(i) + ": shares a vertex with an earlier copy";
            return v;
        }
        used |= cs;
    }
    v.leftover = G.n - used.count();
    return v;
}

inline nlohmann::json packing_to_json(const KttPacking& P, int t) {
    nlohmann::json j;
    j["t"] = t;
    j["copies"] = nlohmann::json::array();
    for (const auto& c : P.copies)
        j["copies"].push_back({{"A", c.sideA}, {"B", c.sideB}, {"tag", c.tag}});
    return j;
}

inline KttPacking packing_from_json(const nlohmann::json& j, int* out_t = nullptr) {
    KttPacking P;
    if (out_t) *out_t = j.at("t").get<int>();
    for (const auto& cj : j.at("copies")) {
        KttCopy c;
        c.sideA = cj.at("A").get<std::vector<int>>();
        c.sideB = cj.at("B").get<std::vector<int>>();
        c.tag = cj.value("tag", "");
        P.copies.push_back(std::move(c));
    }
    return P;
}

} // namespace tiler

#endif
