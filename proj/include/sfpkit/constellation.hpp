#pragma once

#include <string>
#include <vector>

#include "sfpkit/graph.hpp"

namespace sfpkit::constellation {

struct ConstellationParams {
    double S = 2.0;  // star degree scale, >= 2
    int D = 1;       // inter-star path bound, >= 1
    int Delta = 2;   // reduced-tree degree bound, >= 2

    void validate() const;
};

// A verified tree subgraph with distinguished stars J, their ordering, and
// the inter-star paths used to build it. Vertex ids refer to the parent
// graph.
struct Constellation {
    std::vector<VertexId> vertices;
    std::vector<Edge> tree_edges;
    std::vector<VertexId> distinguished;          // ordered J
    std::vector<std::vector<VertexId>> paths;     // inter-star paths, full sequences
    ConstellationParams params;
};

struct Verdict {
    bool ok = true;
    std::string property;  // first failed property: "pre", "P1".."P4"
    std::string detail;    // witness
};

using AdjacencyList = std::vector<std::vector<VertexId>>;

AdjacencyList adjacency_from_edges(std::size_t n, const std::vector<Edge>& edges);

// P1: connected tree. P2: deg(x) >= S/2 for x in J. P3: dist(x,y) <= D for
// star-adjacent x,y (the unique path between them has no other J vertex in
// its interior). P4: the reduced graph on J is a connected tree with max
// degree <= Delta. Returns the first violated property with a witness.
Verdict is_constellation(const AdjacencyList& g, const std::vector<VertexId>& J,
                         const ConstellationParams& params);

// Verifies a built Constellation (remaps parent ids to a dense graph).
Verdict verify(const Constellation& c);

// Independent reference checker for small graphs: explicit tree test,
// exhaustive simple-path enumeration for the star-adjacency relation,
// all-pairs distances. Used to cross-validate is_constellation.
Verdict is_constellation_bruteforce(const AdjacencyList& g, const std::vector<VertexId>& J,
                                    const ConstellationParams& params);

}  // namespace sfpkit::constellation
