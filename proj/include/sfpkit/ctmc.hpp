#pragma once

#include "sfpkit/graph.hpp"

namespace sfpkit::contact {

// Exact mean extinction time of the contact process from full occupancy, by
// solving the first-step-analysis linear system over all 2^|V| states.
// States are ordered by infected-set bitmask; |V| <= 12.
double exact_mean_extinction(const SfpGraph& graph, double lambda);

// Edge-list convenience for fixtures.
double exact_mean_extinction(std::size_t n, const std::vector<Edge>& edges, double lambda);

}  // namespace sfpkit::contact
