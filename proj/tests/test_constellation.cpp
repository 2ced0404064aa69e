#include <set>

#include "doctest.h"
#include "sfpkit/constellation.hpp"
#include "sfpkit/rng.hpp"

using namespace sfpkit;
using namespace sfpkit::constellation;

namespace {

// Random instance generator shared with the acceptance suite: random trees
// (sometimes with an extra edge to break P1) and random J subsets.
struct RandomInstance {
    AdjacencyList g;
    std::vector<VertexId> J;
    ConstellationParams params;
};

RandomInstance random_instance(Stream& st) {
    RandomInstance inst;
    const std::size_t n = 2 + st.below(6);  // 2..7 vertices
    std::vector<Edge> edges;
    for (VertexId v = 1; v < n; ++v)
        edges.emplace_back(static_cast<VertexId>(st.below(v)), v);  // random tree
    if (st.uniform() < 0.25 && n >= 3) {
        // add a chord; creates a cycle
        const VertexId a = static_cast<VertexId>(st.below(n));
        VertexId b = static_cast<VertexId>(st.below(n));
        std::set<Edge> have(edges.begin(), edges.end());
        while (b == a) b = static_cast<VertexId>(st.below(n));
        const Edge e{std::min(a, b), std::max(a, b)};
        if (!have.count(e)) edges.push_back(e);
    }
    inst.g = adjacency_from_edges(n, edges);
    const std::size_t jsize = 1 + st.below(n);
    std::set<VertexId> j;
    while (j.size() < jsize) j.insert(static_cast<VertexId>(st.below(n)));
    inst.J.assign(j.begin(), j.end());
    inst.params.S = 2.0 + st.below(3);
    inst.params.D = 1 + static_cast<int>(st.below(4));
    inst.params.Delta = 2 + static_cast<int>(st.below(3));
    return inst;
}

}  // namespace

TEST_SUITE("constellation") {

TEST_CASE("star K_{1,6} with the center distinguished") {
    // deg(center) = 6 >= S/2 = 5; P3 vacuous with a single star.
    std::vector<Edge> edges;
    for (VertexId leaf = 1; leaf <= 6; ++leaf) edges.emplace_back(0, leaf);
    const auto g = adjacency_from_edges(7, edges);
    const auto verdict = is_constellation(g, {0}, {10.0, 1, 2});
    CHECK(verdict.ok);
}

TEST_CASE("path on 3 vertices with both endpoints distinguished") {
    const auto g = adjacency_from_edges(3, {{0, 1}, {1, 2}});
    CHECK(is_constellation(g, {0, 2}, {2.0, 2, 2}).ok);
    // Same instance fails once D is too small.
    const auto tight = is_constellation(g, {0, 2}, {2.0, 1, 2});
    CHECK(!tight.ok);
    CHECK(tight.property == "P3");
}

TEST_CASE("a cycle fails P1") {
    const auto g = adjacency_from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    const auto verdict = is_constellation(g, {0}, {2.0, 1, 2});
    CHECK(!verdict.ok);
    CHECK(verdict.property == "P1");
}

TEST_CASE("low-degree star fails P2 with a witness") {
    const auto g = adjacency_from_edges(3, {{0, 1}, {1, 2}});
    const auto verdict = is_constellation(g, {0}, {6.0, 2, 2});
    CHECK(!verdict.ok);
    CHECK(verdict.property == "P2");
    CHECK(verdict.detail.find("0") != std::string::npos);
}

TEST_CASE("reduced-degree bound failure is P4") {
    // Spider: center 0 with 3 legs of length 1; J = everything.
    const auto g = adjacency_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    const auto verdict = is_constellation(g, {0, 1, 2, 3}, {2.0, 1, 2});
    CHECK(!verdict.ok);
    CHECK(verdict.property == "P4");
}

TEST_CASE("leaf stars around an undistinguished center fail P4 (reduced cycle)") {
    const auto g = adjacency_from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    const auto verdict = is_constellation(g, {1, 2, 3}, {2.0, 2, 2});
    CHECK(!verdict.ok);
    CHECK(verdict.property == "P4");
}

TEST_CASE("checker agrees with brute force on a random catalogue") {
    Stream st(derive_key(2718, StreamTag::pairs));
    int passes = 0;
    for (int i = 0; i < 500; ++i) {
        const auto inst = random_instance(st);
        const auto fast = is_constellation(inst.g, inst.J, inst.params);
        const auto slow = is_constellation_bruteforce(inst.g, inst.J, inst.params);
        CHECK(fast.ok == slow.ok);
        if (!fast.ok) CHECK(fast.property == slow.property);
        if (fast.ok) ++passes;
    }
    CHECK(passes > 10);  // the catalogue exercises both outcomes
}

TEST_CASE("verify remaps parent-graph ids") {
    Constellation c;
    c.vertices = {10, 20, 30};
    c.tree_edges = {{10, 20}, {20, 30}};
    c.distinguished = {10, 30};
    c.params = {2.0, 2, 2};
    CHECK(verify(c).ok);
    c.tree_edges.push_back({10, 30});
    CHECK(!verify(c).ok);
}

}  // TEST_SUITE
