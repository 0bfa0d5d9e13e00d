#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <tiler/subdivide.hpp>

#include "oracles.hpp"

using namespace tiler;

namespace {

// X = {0..6}, Y = {7..11}, complete across, plus X-edges (0,1) and (2,3):
// an imbalanced almost-bipartite class with surplus 2 on the X side
struct Crafted {
    Graph G;
    Decomposition dec;
    Crafted() : G(12) {
        for (int x = 0; x < 7; ++x)
            for (int y = 7; y < 12; ++y) G.add_edge(x, y);
        G.add_edge(0, 1);
        G.add_edge(2, 3);
        dec.classes = {VertexSet::full(12)};
        VertexSet X(12), Y(12);
        for (int v = 0; v < 7; ++v) X.set(v);
        for (int v = 7; v < 12; ++v) Y.set(v);
        dec.sided = {std::make_pair(X, Y)};
        dec.labels = {ClassLabel::AlmostBipartite};
        dec.params = ParamPack{};
    }
};

SubdivideParams lenient() {
    SubdivideParams sp;
    sp.xi = 1.0;
    return sp;
}

Graph pattern_clique(int k) {
    Graph F(k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) F.add_edge(i, j);
    return F;
}

Graph pattern_edge() {
    Graph F(2);
    F.add_edge(0, 1);
    return F;
}

} // namespace

TEST_CASE("balancing forest: one path removing the class imbalance") {
    Crafted c;
    auto forest = balancing_linear_forest(c.G, c.dec, lenient());
    REQUIRE(forest.size() == 1);
    const auto& p = forest[0];
    CHECK(p.size() == 6);
    for (size_t k = 0; k + 1 < p.size(); ++k) CHECK(c.G.has_edge(p[k], p[k + 1]));
    // leaves on opposite sides
    const auto& [X, Y] = *c.dec.sided[0];
    CHECK(X.test(p.front()) != X.test(p.back()));
    // (P4): removal balances the sides exactly
    VertexSet VH(12);
    for (int v : p) VH.set(v);
    CHECK(X.and_not(VH).count() == Y.and_not(VH).count());
    // no repeated vertices
    VertexSet seen(12);
    for (int v : p) {
        CHECK_FALSE(seen.test(v));
        seen.set(v);
    }
}

TEST_CASE("balancing forest: empty when classes are balanced, budget enforced") {
    Graph B = gen_complete_bipartite(4, 4);
    Decomposition dec;
    dec.classes = {VertexSet::full(8)};
    VertexSet X(8), Y(8);
    for (int v = 0; v < 4; ++v) X.set(v);
    for (int v = 4; v < 8; ++v) Y.set(v);
    dec.sided = {std::make_pair(X, Y)};
    dec.labels = {ClassLabel::AlmostBipartite};
    CHECK(balancing_linear_forest(B, dec, lenient()).empty());

    // the nominal xi budget rejects the crafted path (6 > 0.3 * 12)
    Crafted c;
    CHECK_THROWS_AS(balancing_linear_forest(c.G, c.dec, SubdivideParams{}), BudgetError);
}

TEST_CASE("merge_to_paths adopts the forest path and keeps balance") {
    Crafted c;
    auto forest = balancing_linear_forest(c.G, c.dec, lenient());
    PathSystem Q = merge_to_paths(c.G, c.dec, forest, lenient());
    REQUIRE(Q.paths.size() == 1);
    CHECK(Q.paths[0] == forest[0]);
    CHECK(Q.covered.count() == 6);
    const auto& [X, Y] = *c.dec.sided[0];
    CHECK(X.and_not(Q.covered).count() == Y.and_not(Q.covered).count());
}

TEST_CASE("merge_to_paths uses a free cross edge when there is no forest") {
    Graph B = gen_complete_bipartite(4, 4);
    Decomposition dec;
    dec.classes = {VertexSet::full(8)};
    VertexSet X(8), Y(8);
    for (int v = 0; v < 4; ++v) X.set(v);
    for (int v = 4; v < 8; ++v) Y.set(v);
    dec.sided = {std::make_pair(X, Y)};
    dec.labels = {ClassLabel::AlmostBipartite};
    PathSystem Q = merge_to_paths(B, dec, {}, lenient());
    REQUIRE(Q.paths.size() == 1);
    CHECK(Q.paths[0].size() == 2);
    CHECK(X.test(Q.paths[0][0]) != X.test(Q.paths[0][1]));
}

TEST_CASE("subdivision_pair: disjoint valid pair in a clique class") {
    Graph K = gen_clique_union(1, 20);
    VertexSet VQ = VertexSet::of(20, {0, 1});
    auto [A, B] = subdivision_pair(K, VertexSet::full(20), std::nullopt, pattern_clique(3),
                                   VQ, lenient());
    std::string why;
    CHECK(A.verify(K, &why));
    CHECK(B.verify(K, &why));
    VertexSet VA = A.vertex_set(20), VB = B.vertex_set(20);
    CHECK_FALSE(VA.intersects(VB));
    CHECK_FALSE(VA.intersects(VQ));
    CHECK_FALSE(VB.intersects(VQ));
}

TEST_CASE("subdivision_pair: sided branch placement and the cancelling skew") {
    Crafted c;
    Graph Gp = bipartite_restriction(c.G, c.dec);
    auto forest = balancing_linear_forest(c.G, c.dec, lenient());
    PathSystem Q = merge_to_paths(c.G, c.dec, forest, lenient());
    const auto& sides = c.dec.sided[0];
    auto [A, B] = subdivision_pair(Gp, c.dec.classes[0], sides, pattern_edge(),
                                   Q.covered, lenient());
    // A's branch set sits in X, B's in Y
    for (int b : A.branch) CHECK(sides->first.test(b));
    for (int b : B.branch) CHECK(sides->second.test(b));
    VertexSet both = A.vertex_set(12) | B.vertex_set(12);
    CHECK(both.intersect_count(sides->first) == both.intersect_count(sides->second));
}

TEST_CASE("absorb completes the crafted bipartite class exactly") {
    Crafted c;
    Graph Gp = bipartite_restriction(c.G, c.dec);
    auto forest = balancing_linear_forest(c.G, c.dec, lenient());
    PathSystem Q = merge_to_paths(c.G, c.dec, forest, lenient());
    const auto& sides = c.dec.sided[0];
    auto [A, B] = subdivision_pair(Gp, c.dec.classes[0], sides, pattern_edge(),
                                   Q.covered, lenient());
    Subdivision App =
        absorb(c.G, Gp, c.dec.classes[0], sides, A, B, Q.paths[0], Q.covered, lenient());
    std::string why;
    CHECK(App.verify(c.G, &why));
    // the pair now covers the whole class
    VertexSet lhs = App.vertex_set(12) | B.vertex_set(12);
    CHECK(lhs == VertexSet::full(12));
}

TEST_CASE("absorb in a clique class") {
    Graph K = gen_clique_union(1, 9);
    VertexSet Z = VertexSet::full(9);
    std::vector<int> Pi{0, 1};
    VertexSet VQ = VertexSet::of(9, Pi);
    auto [A, B] = subdivision_pair(K, Z, std::nullopt, pattern_clique(3), VQ, lenient());
    Subdivision App = absorb(K, K, Z, std::nullopt, A, B, Pi, VQ, lenient());
    std::string why;
    CHECK(App.verify(K, &why));
    CHECK((App.vertex_set(9) | B.vertex_set(9)) == VertexSet::full(9));
    CHECK_FALSE(App.vertex_set(9).intersects(B.vertex_set(9)));
}

TEST_CASE("verify_subdivision_packing catches tampering") {
    Graph K = gen_clique_union(1, 9);
    VertexSet Z = VertexSet::full(9);
    std::vector<int> Pi{0, 1};
    VertexSet VQ = VertexSet::of(9, Pi);
    auto [A, B] = subdivision_pair(K, Z, std::nullopt, pattern_clique(3), VQ, lenient());
    SubdivisionPacking P;
    P.pattern = pattern_clique(3);
    P.subdivisions = {A, B};
    std::string why;
    CHECK(verify_subdivision_packing(K, P, false, &why));
    CHECK_FALSE(verify_subdivision_packing(K, P, true, &why)); // {0,1} uncovered

    // duplicate member: overlap detected
    SubdivisionPacking Pdup;
    Pdup.pattern = P.pattern;
    Pdup.subdivisions = {A, A};
    CHECK_FALSE(verify_subdivision_packing(K, Pdup, false, &why));
    CHECK(why.find("overlap") != std::string::npos);

    // route a path interior through a branch vertex
    SubdivisionPacking Pbad = P;
    Pbad.subdivisions[0].paths[0].insert(Pbad.subdivisions[0].paths[0].begin() + 1,
                                         Pbad.subdivisions[0].branch[2]);
    CHECK_FALSE(verify_subdivision_packing(K, Pbad, false, &why));
}

TEST_CASE("small classes get a single spanning subdivision") {
    ParamPack p;
    // K_7 with a triangle pattern: spanning closed walk of length 7
    Graph K7 = gen_clique_union(1, 7);
    SubdivisionPacking P = pack_subdivisions(K7, pattern_clique(3), p, 1);
    REQUIRE(P.subdivisions.size() == 1);
    std::string why;
    CHECK(verify_subdivision_packing(K7, P, true, &why));

    // K_{4,4} with a single-edge pattern: spanning path
    Graph B = gen_complete_bipartite(4, 4);
    SubdivisionPacking P2 = pack_subdivisions(B, pattern_edge(), p, 1);
    REQUIRE(P2.subdivisions.size() == 1);
    CHECK(verify_subdivision_packing(B, P2, true, &why));

    // K_{4,4} with a triangle pattern: spanning even closed walk
    SubdivisionPacking P3 = pack_subdivisions(B, pattern_clique(3), p, 1);
    CHECK(verify_subdivision_packing(B, P3, true, &why));
}

TEST_CASE("dense regular host: perfect clique-pattern packing") {
    ParamPack p;
    Graph G = gen_regular(120, 48, 1);
    SubdivisionPacking P = pack_subdivisions(G, pattern_clique(4), p, 1);
    std::string why;
    CHECK(verify_subdivision_packing(G, P, true, &why));
    CHECK(P.subdivisions.size() == 2);
}

TEST_CASE("subdivision packing json shape") {
    Graph K7 = gen_clique_union(1, 7);
    ParamPack p;
    SubdivisionPacking P = pack_subdivisions(K7, pattern_clique(3), p, 1);
    auto j = subdivision_packing_to_json(P);
    CHECK(j["pattern"].size() == 3);
    CHECK(j["subdivisions"].size() == P.subdivisions.size());
    CHECK(j["subdivisions"][0]["paths"].size() == 3);
    CHECK(j["subdivisions"][0]["branch"].size() == 3);
}
