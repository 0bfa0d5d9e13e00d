#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <tiler/graph.hpp>

#include "oracles.hpp"

using namespace tiler;

TEST_CASE("VertexSet basics") {
    VertexSet s(100);
    CHECK(s.count() == 0);
    CHECK_FALSE(s.any());
    s.set(3);
    s.set(64);
    s.set(99);
    CHECK(s.count() == 3);
    CHECK(s.test(64));
    CHECK_FALSE(s.test(63));
    CHECK(s.first() == 3);
    CHECK(s.next(3) == 64);
    CHECK(s.next(64) == 99);
    CHECK(s.next(99) == -1);
    s.reset(64);
    CHECK(s.count() == 2);

    VertexSet a = VertexSet::of(10, {1, 2, 3});
    VertexSet b = VertexSet::of(10, {3, 4});
    CHECK((a & b).to_vector() == std::vector<int>{3});
    CHECK((a | b).count() == 4);
    CHECK(a.and_not(b).count() == 2);
    CHECK(a.intersects(b));
    CHECK(a.intersect_count(b) == 1);
    CHECK(VertexSet::of(10, {1, 2}).subset_of(a));
    CHECK(a.complement().count() == 7);
    CHECK(VertexSet::full(65).count() == 65);
    CHECK(VertexSet::full(65).complement().count() == 0);
}

TEST_CASE("edge counting kernels agree with naive recounts") {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Graph G = oracle::random_graph(37, 0.3, seed);
        VertexSet X = VertexSet::of(37, {0, 3, 5, 8, 13, 21, 30, 36});
        VertexSet Y = VertexSet::of(37, {1, 2, 9, 14, 22, 29});
        long long in_naive = 0, between_naive = 0;
        for (int u = 0; u < 37; ++u)
            for (int v = u + 1; v < 37; ++v) {
                if (!G.has_edge(u, v)) continue;
                if (X.test(u) && X.test(v)) ++in_naive;
                if ((X.test(u) && Y.test(v)) || (X.test(v) && Y.test(u))) ++between_naive;
            }
        CHECK(G.e_inside(X) == in_naive);
        CHECK(G.e_between(X, Y) == between_naive);
        long long deg_sum = 0;
        for (int v = 0; v < 37; ++v) deg_sum += G.degree(v);
        CHECK(G.edge_count() == deg_sum / 2);
    }
}

TEST_CASE("cut_stats and bipartite_distance") {
    Graph G = gen_complete_bipartite(4, 6);
    VertexSet A = VertexSet::of(10, {0, 1, 2, 3});
    auto cs = cut_stats(G, A);
    CHECK(cs.cross_edges == 24);
    CHECK(cs.sparsity == doctest::Approx(1.0));
    CHECK(bipartite_distance(G, A) == 0); // sides are independent sets
    Graph K5 = gen_clique_union(1, 5);
    // best split of K_5 is 2/3: within edges 1 + 3
    CHECK(bipartite_distance(K5, VertexSet::of(5, {0, 1})) == 4);
}

TEST_CASE("generators") {
    Graph C = gen_clique_union(3, 7);
    CHECK(C.n == 21);
    int d;
    CHECK(C.is_regular(&d));
    CHECK(d == 6);
    CHECK(C.components(VertexSet::full(21)).size() == 3);

    Graph B = gen_complete_bipartite(4, 4);
    VertexSet X, Y;
    CHECK(B.bipartition(VertexSet::full(8), X, Y));
    CHECK(X.count() == 4);

    Graph K4 = gen_clique_union(1, 4);
    CHECK_FALSE(K4.bipartition(VertexSet::full(4), X, Y));
}

TEST_CASE("gen_regular: regularity, determinism, errors") {
    for (auto [n, dd] : std::vector<std::pair<int, int>>{{10, 3}, {20, 7}, {40, 16}, {61, 30}}) {
        Graph G = gen_regular(n, dd, 42);
        int d;
        REQUIRE(G.is_regular(&d));
        CHECK(d == dd);
        for (int v = 0; v < n; ++v) CHECK_FALSE(G.has_edge(v, v));
        // determinism
        Graph H = gen_regular(n, dd, 42);
        bool same = true;
        for (int v = 0; v < n; ++v)
            if (!(G.adj[v] == H.adj[v])) same = false;
        CHECK(same);
    }
    CHECK_THROWS_AS(gen_regular(7, 3, 1), ParityError);    // nd odd
    CHECK_THROWS_AS(gen_regular(5, 6, 1), InfeasibleError); // d >= n
}

TEST_CASE("edge list round trip and malformed input") {
    Graph G = gen_regular(12, 5, 7);
    std::ostringstream out;
    write_edge_list(out, G);
    std::istringstream in(out.str());
    Graph H = read_edge_list(in);
    REQUIRE(H.n == G.n);
    bool same = true;
    for (int v = 0; v < G.n; ++v)
        if (!(G.adj[v] == H.adj[v])) same = false;
    CHECK(same);

    std::istringstream loop("3 1\n1 1\n");
    CHECK_THROWS_AS(read_edge_list(loop), IoError);
    std::istringstream dup("3 2\n0 1\n1 0\n");
    CHECK_THROWS_AS(read_edge_list(dup), IoError);
    std::istringstream range("3 1\n0 3\n");
    CHECK_THROWS_AS(read_edge_list(range), IoError);
    std::istringstream header("x y\n");
    CHECK_THROWS_AS(read_edge_list(header), IoError);
}

TEST_CASE("induced subgraph with id map") {
    Graph G = gen_clique_union(2, 4); // vertices 0..3 and 4..7
    VertexSet S = VertexSet::of(8, {2, 3, 4});
    std::vector<int> ids; // ids[i] = original id of local vertex i
    Graph H = G.induced(S, &ids);
    CHECK(H.n == 3);
    CHECK(ids == std::vector<int>{2, 3, 4});
    CHECK(H.has_edge(0, 1));       // originals 2-3 share a clique
    CHECK_FALSE(H.has_edge(1, 2)); // originals 3-4 do not
}
