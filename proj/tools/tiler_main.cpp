// tiler: pack | gen | subdiv | verify | campaign
// exit 0 = all verifications pass, 2 = verification failure, 3 = stage failure
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include <tiler/tiler.hpp>

using nlohmann::json;

static tiler::ParamPack load_params(const std::string& path, int t) {
    tiler::ParamPack p;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw tiler::IoError("cannot open params file " + path);
        json j = json::parse(in);
        p.eta = j.value("eta", p.eta);
        p.beta = j.value("beta", p.beta);
        p.xi = j.value("xi", p.xi);
        p.gamma = j.value("gamma", p.gamma);
        p.zeta = j.value("zeta", p.zeta);
        p.delta = j.value("delta", p.delta);
        p.rho = j.value("rho", p.rho);
        p.c = j.value("c", p.c);
        p.T = j.value("T", p.T);
        p.eps = j.value("eps", p.eps);
        p.mu = j.value("mu", p.mu);
    }
    p.t = t;
    return p;
}

int main(int argc, char** argv) {
    CLI::App app{"K_{t,t}-packing and subdivision-packing pipelines"};
    app.require_subcommand(1);

    // pack
    auto* pack = app.add_subcommand("pack", "near-perfect K_{t,t}-packing of a graph");
    std::string pack_input, pack_params, pack_out;
    int pack_t = 2;
    uint64_t pack_seed = 1;
    pack->add_option("--input", pack_input, "edge-list file")->required();
    pack->add_option("--t", pack_t, "biclique side size");
    pack->add_option("--params", pack_params, "ParamPack JSON");
    pack->add_option("--out", pack_out, "report JSON path");
    pack->add_option("--seed", pack_seed, "seed");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance");
    std::string gen_family = "regular", gen_out;
    int gen_n = 40, gen_d = 16, gen_copies = 3, gen_a = 8, gen_b = 8, gen_order = 7;
    uint64_t gen_seed = 1;
    gen->add_option("--family", gen_family, "regular | cliques | bipartite")->required();
    gen->add_option("--n", gen_n, "order (regular)");
    gen->add_option("--d", gen_d, "degree (regular)");
    gen->add_option("--copies", gen_copies, "clique count (cliques)");
    gen->add_option("--order", gen_order, "clique order (cliques)");
    gen->add_option("--a", gen_a, "side A (bipartite)");
    gen->add_option("--b", gen_b, "side B (bipartite)");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("--out", gen_out, "edge-list output path")->required();

    // subdiv
    auto* subdiv = app.add_subcommand("subdiv", "perfect subdivision packing");
    std::string sd_input, sd_pattern = "k4", sd_params, sd_out;
    uint64_t sd_seed = 1;
    subdiv->add_option("--input", sd_input, "edge-list file")->required();
    subdiv->add_option("--pattern", sd_pattern, "pattern: k<n>, c<n>, p<n>");
    subdiv->add_option("--params", sd_params, "ParamPack JSON");
    subdiv->add_option("--out", sd_out, "packing JSON path");
    subdiv->add_option("--seed", sd_seed, "seed");

    // verify
    auto* verify = app.add_subcommand("verify", "verify a packing against a graph");
    std::string vf_graph, vf_packing;
    int vf_t = 2;
    verify->add_option("--graph", vf_graph, "edge-list file")->required();
    verify->add_option("--packing", vf_packing, "packing JSON")->required();
    verify->add_option("--t", vf_t, "biclique side size");

    // campaign
    auto* campaign = app.add_subcommand("campaign", "run an experiment campaign");
    std::string cp_config, cp_out = "campaign";
    campaign->add_option("--config", cp_config, "ExperimentConfig JSON")->required();
    campaign->add_option("--out", cp_out, "output prefix (.json / .csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*pack) {
            tiler::Graph G = tiler::read_edge_list_file(pack_input);
            tiler::ParamPack p = load_params(pack_params, pack_t);
            auto [packing, rep] = tiler::pack_h(G, pack_t, p, pack_seed);
            auto verdict = tiler::verify_packing(G, packing, pack_t);
            json out = rep.to_json();
            out["verified"] = verdict.ok;
            out["packing"] = tiler::packing_to_json(packing, pack_t);
            if (!pack_out.empty()) {
                std::ofstream f(pack_out);
                f << out.dump(2) << "\n";
            } else {
                std::cout << out.dump(2) << "\n";
            }
            if (!verdict.ok) return 2;
            return 0;
        }
        if (*gen) {
            tiler::Graph G(1);
            if (gen_family == "regular") G = tiler::gen_regular(gen_n, gen_d, gen_seed);
            else if (gen_family == "cliques") G = tiler::gen_clique_union(gen_copies, gen_order);
            else if (gen_family == "bipartite") G = tiler::gen_complete_bipartite(gen_a, gen_b);
            else throw tiler::ValidationError("unknown family " + gen_family);
            std::ofstream f(gen_out);
            tiler::write_edge_list(f, G);
            return 0;
        }
        if (*subdiv) {
            tiler::Graph G = tiler::read_edge_list_file(sd_input);
            tiler::ParamPack p = load_params(sd_params, 2);
            tiler::Graph F = tiler::make_pattern(sd_pattern);
            tiler::SubdivisionPacking sp = tiler::pack_subdivisions(G, F, p, sd_seed);
            std::string why;
            bool ok = tiler::verify_subdivision_packing(G, sp, true, &why);
            json out = tiler::subdivision_packing_to_json(sp);
            out["verified"] = ok;
            if (!ok) out["why"] = why;
            if (!sd_out.empty()) {
                std::ofstream f(sd_out);
                f << out.dump(2) << "\n";
            } else {
                std::cout << out.dump(2) << "\n";
            }
            return ok ? 0 : 2;
        }
        if (*verify) {
            tiler::Graph G = tiler::read_edge_list_file(vf_graph);
            std::ifstream f(vf_packing);
            if (!f) throw tiler::IoError("cannot open " + vf_packing);
            json j = json::parse(f);
            if (j.contains("packing")) j = j["packing"];
            tiler::KttPacking P = tiler::packing_from_json(j);
            int t = j.value("t", vf_t);
            auto verdict = tiler::verify_packing(G, P, t);
            std::cout << (verdict.ok ? "PASS" : "FAIL") << " leftover=" << verdict.leftover;
            if (!verdict.ok) std::cout << " detail=" << verdict.detail;
            std::cout << "\n";
            return verdict.ok ? 0 : 2;
        }
        if (*campaign) {
            std::ifstream f(cp_config);
            if (!f) throw tiler::IoError("cannot open " + cp_config);
            auto cfg = tiler::ExperimentConfig::from_json(json::parse(f));
            auto result = tiler::run_campaign(cfg);
            {
                std::ofstream jf(cp_out + ".json");
                jf << result.report.dump(2) << "\n";
            }
            {
                std::ofstream cf(cp_out + ".csv");
                cf << result.csv;
            }
            bool all_ok = true;
            for (const auto& row : result.report["rows"])
                if (row["status"] != "ok") all_ok = false;
            return all_ok ? 0 : 2;
        }
    } catch (const tiler::ValidationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
