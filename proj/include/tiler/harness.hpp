#ifndef TILER_HARNESS_HPP
#define TILER_HARNESS_HPP

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "balance.hpp"
#include "decompose.hpp"
#include "graph.hpp"
#include "ktt.hpp"
#include "packing.hpp"
#include "params.hpp"
#include "subdivide.hpp"

namespace tiler {

struct StageRecord {
    std::string stage;
    std::string status; // "ok" or the error text
    double ms = 0.0;
};

struct PackingReport {
    std::string family;
    int n = 0, d = 0, t = 0;
    uint64_t seed = 0;
    int leftover = -1; // recomputed by the verifier, never trusted
    bool ok = false;
    std::vector<StageRecord> stages;
    nlohmann::json params_echo;
    std::vector<std::string> trace;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["family"] = family;
        j["n"] = n;
        j["d"] = d;
        j["t"] = t;
        j["seed"] = seed;
        j["leftover"] = leftover;
        j["ok"] = ok;
        j["stages"] = nlohmann::json::array();
        for (const auto& s : stages)
            j["stages"].push_back({{"stage", s.stage}, {"status", s.status}, {"ms", s.ms}});
        j["params"] = params_echo;
        j["trace"] = trace;
        return j;
    }
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace detail

// Full K_{t,t} pipeline: decompose, inter-class graph, vertex moves,
// balancing collection, trim, then a perfect per-class packing of every
// trimmed class plus the recorded balancing copies tiling L. Retries up to
// 3 derived seeds on a stage failure.
inline std::pair<KttPacking, PackingReport> pack_h(const Graph& G, int t, const ParamPack& params,
                                                   uint64_t seed = 1) {
    PackingReport rep;
    rep.n = G.n;
    G.is_regular(&rep.d);
    rep.t = t;
    rep.seed = seed;
    rep.params_echo = {{"eta", params.eta}, {"beta", params.beta}, {"xi", params.xi},
                       {"gamma", params.gamma}, {"zeta", params.zeta}, {"delta", params.delta},
                       {"rho", params.rho}, {"c", params.c}, {"T", params.T}};
    std::string last_err = "unknown";
    for (int attempt = 0; attempt < 3; ++attempt) {
        uint64_t s = seed + 1000 * attempt;
        rep.stages.clear();
        auto run_stage = [&](const std::string& name, auto&& fn) {
            auto t0 = std::chrono::steady_clock::now();
            try {
                fn();
                rep.stages.push_back({name, "ok", detail::ms_since(t0)});
                return true;
            } catch (const Error& e) {
                rep.stages.push_back({name, e.what(), detail::ms_since(t0)});
                last_err = name + ": " + e.what();
                return false;
            }
        };
        Decomposition dec;
        BalanceState st;
        KttPacking bal, all;
        TrimResult tr;
        bool ok = run_stage("decompose", [&] { dec = expander_decompose(G, params, s); }) &&
                  run_stage("inter_class_graph",
                            [&] { st = build_inter_class_graph(G, dec, s); }) &&
                  run_stage("move_vertices", [&] { st = move_high_degree_vertices(std::move(st)); }) &&
                  run_stage("balancing_collection",
                            [&] { bal = build_balancing_ktt_collection(st, t, params.T); }) &&
                  run_stage("trim", [&] { tr = trim_to_balance(st, bal, t); });
        if (ok) {
            rep.trace = st.trace;
            all = bal;
            VertexSet dropped_total(G.n);
            for (size_t i = 0; i < tr.classes.size() && ok; ++i) {
                size_t ci = i;
                ok = run_stage("pack_class_" + std::to_string(i), [&] {
                    VertexSet drops(G.n);
                    KttPacking cls =
                        pack_expander(tr.Gprime, tr.classes[ci], tr.sides[ci], t, params, s, &drops);
                    all.append(cls);
                    dropped_total |= drops;
                });
            }
            if (ok) {
                auto verdict = verify_packing(G, all, t);
                int r = int(tr.classes.size());
                long long cap = (long long)r * (2 * t - 1) + tr.discarded.count();
                if (!verdict.ok) {
                    last_err = "verify: " + verdict.detail;
                } else if (verdict.leftover > cap) {
                    last_err = "leftover " + std::to_string(verdict.leftover) +
                               " exceeds r(2t-1)+|discarded| = " + std::to_string(cap);
                } else {
                    // leftover must be exactly the discarded + dropped set
                    VertexSet lv = all.covered(G.n).complement();
                    if (!(lv == (tr.discarded | dropped_total)))
                        throw InvariantError("pack_h: leftover set mismatch");
                    rep.leftover = verdict.leftover;
                    rep.ok = true;
                    rep.seed = s;
                    return {all, rep};
                }
            }
        }
    }
    throw Error("pack_h: all attempts failed; last: " + last_err);
}

struct ExperimentConfig {
    struct Family {
        std::string family; // "regular" | "cliques" | "bipartite"
        int n = 0, d = 0;   // regular: order/degree; cliques: d+1 = clique order
        int copies = 0;     // cliques: number of cliques; bipartite: side size in a/b
        int a = 0, b = 0;   // bipartite sides
    };
    std::vector<Family> families;
    int t = 2;
    std::string pattern; // nonempty (e.g. "k4") -> subdivision campaign
    ParamPack params;
    std::vector<uint64_t> seeds;

    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig c;
        for (const auto& f : j.at("families")) {
            Family fam;
            fam.family = f.at("family");
            fam.n = f.value("n", 0);
            fam.d = f.value("d", 0);
            fam.copies = f.value("copies", 0);
            fam.a = f.value("a", 0);
            fam.b = f.value("b", 0);
            c.families.push_back(fam);
        }
        c.t = j.value("t", 2);
        c.pattern = j.value("pattern", "");
        if (j.contains("params")) {
            const auto& p = j["params"];
            c.params.eta = p.value("eta", c.params.eta);
            c.params.beta = p.value("beta", c.params.beta);
            c.params.xi = p.value("xi", c.params.xi);
            c.params.gamma = p.value("gamma", c.params.gamma);
            c.params.zeta = p.value("zeta", c.params.zeta);
            c.params.delta = p.value("delta", c.params.delta);
            c.params.rho = p.value("rho", c.params.rho);
            c.params.c = p.value("c", c.params.c);
            c.params.t = c.t;
            c.params.T = p.value("T", c.params.T);
        }
        for (const auto& s : j.at("seeds")) c.seeds.push_back(s.get<uint64_t>());
        if (c.seeds.empty()) throw ValidationError("ExperimentConfig: seeds must be nonempty");
        return c;
    }
};

inline Graph make_pattern(const std::string& name) {
    // "k<t>" = complete graph, "c<t>" = cycle, "p<t>" = path
    if (name.size() < 2) throw ValidationError("pattern: expected k<n>, c<n>, or p<n>");
    int m = std::stoi(name.substr(1));
    if (m < 2 || m > 8) throw ValidationError("pattern: order must be in [2, 8]");
    Graph F(m);
    if (name[0] == 'k') {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) F.add_edge(i, j);
    } else if (name[0] == 'c') {
        for (int i = 0; i < m; ++i) F.add_edge(i, (i + 1) % m);
    } else if (name[0] == 'p') {
        for (int i = 0; i + 1 < m; ++i) F.add_edge(i, i + 1);
    } else {
        throw ValidationError("pattern: unknown shape '" + std::string(1, name[0]) + "'");
    }
    return F;
}

inline Graph make_instance(const ExperimentConfig::Family& fam, uint64_t seed) {
    if (fam.family == "regular") return gen_regular(fam.n, fam.d, seed);
    if (fam.family == "cliques") return gen_clique_union(fam.copies, fam.d + 1);
    if (fam.family == "bipartite") return gen_complete_bipartite(fam.a, fam.b);
    throw ValidationError("make_instance: unknown family '" + fam.family + "'");
}

struct CampaignResult {
    nlohmann::json report;
    std::string csv;
};

// Deterministic given the config: every instance and pipeline is seeded.
inline CampaignResult run_campaign(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw ValidationError("run_campaign: empty seed list");
    CampaignResult out;
    std::ostringstream csv;
    csv << "family,n,d,t,seed,leftover,stage,status,ms\n";
    out.report["rows"] = nlohmann::json::array();
    for (const auto& fam : cfg.families) {
        for (uint64_t seed : cfg.seeds) {
            std::string stage = "done", status = "ok";
            int leftover = -1;
            int n = 0, d = 0;
            auto t0 = std::chrono::steady_clock::now();
            nlohmann::json row;
            try {
                Graph G = make_instance(fam, seed);
                n = G.n;
                G.is_regular(&d);
                if (!cfg.pattern.empty()) {
                    Graph F = make_pattern(cfg.pattern);
                    SubdivisionPacking sp = pack_subdivisions(G, F, cfg.params, seed);
                    std::string why;
                    if (!verify_subdivision_packing(G, sp, true, &why)) {
                        stage = "verify";
                        status = why;
                    } else {
                        leftover = 0;
                    }
                } else {
                    auto [packing, rep] = pack_h(G, cfg.t, cfg.params, seed);
                    leftover = rep.leftover;
                    row["detail"] = rep.to_json();
                }
            } catch (const std::exception& e) {
                stage = "pipeline";
                status = e.what();
            }
            double ms = detail::ms_since(t0);
            // keep CSV parseable: strip commas/newlines from error text
            std::string flat = status;
            for (char& ch : flat)
                if (ch == ',' || ch == '\n') ch = ';';
            // ms is zeroed in the CSV so reruns are byte-identical; the JSON
            // report carries the wall-clock numbers
            csv << fam.family << "," << n << "," << d << "," << cfg.t << "," << seed << ","
                << leftover << "," << stage << "," << flat << "," << 0 << "\n";
            row["ms"] = ms;
            row["family"] = fam.family;
            row["n"] = n;
            row["d"] = d;
            row["t"] = cfg.t;
            row["seed"] = seed;
            row["leftover"] = leftover;
            row["stage"] = stage;
            row["status"] = status;
            out.report["rows"].push_back(row);
        }
    }
    out.csv = csv.str();
    return out;
}

} // namespace tiler

#endif
