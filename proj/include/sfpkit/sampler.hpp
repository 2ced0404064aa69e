#pragma once

#include <cstdint>
#include <vector>

#include "sfpkit/graph.hpp"
#include "sfpkit/params.hpp"
#include "sfpkit/rng.hpp"

namespace sfpkit {

// Vertex positions of a unit-intensity Poisson process on the box
// [0, side)^d; count ~ Poisson(volume). Flat row-major coords.
std::vector<double> sample_points(const SfpParams& params, std::uint64_t seed);

// Pareto weight via inverse CDF: P(W >= t) = t^{-(tau-1)} for t >= 1.
double sample_weight(double tau, double u);
std::vector<double> sample_weights(double tau, std::size_t n, std::uint64_t seed);

// 1 - exp(-rho * wx * wy / dist^alpha). Throws on coincident points.
double connection_probability(std::span<const double> x, std::span<const double> y,
                              double wx, double wy, const SfpParams& params);

struct SamplerOptions {
    // All-pairs sampler refuses above this expected vertex count.
    double reference_max_expected = 2e5;
    // Accelerated sampler skips a distant cell pair when the dominating mass
    // of the whole pair set falls below this; the resulting total-variation
    // error is bounded by the cutoff per skipped pair set.
    double negligible_mass_cutoff = 1e-12;
    // Approximate total number of grid cells the accelerated sampler aims
    // for (actual count depends on d and the box side).
    double target_cells = 4096.0;
};

// Bernoulli(p_xy) for every unordered pair, conditionally on the given
// positions and weights. Points/weights/edges use separate streams, so edges
// can be resampled while positions and weights stay fixed.
std::vector<Edge> sample_edges_reference(const SfpParams& params,
                                         const std::vector<double>& coords,
                                         const std::vector<double>& weights,
                                         std::uint64_t seed);

// Exact all-pairs sampler; the law of record.
SfpGraph sample_graph_reference(const SfpParams& params, std::uint64_t seed,
                                const SamplerOptions& opts = {});

// Cell-grid sampler with the same law: near cell pairs are evaluated
// directly, distant pairs by domination-rejection with
// q = min(1, rho*wx*wy/rmin^alpha) >= p as the proposal.
SfpGraph sample_graph_accelerated(const SfpParams& params, std::uint64_t seed,
                                  const SamplerOptions& opts = {});

// Shared-mark coupling across an increasing rho ladder: each pair draws one
// uniform; the edge is present for every rho with p_rho(pair) > u, so edge
// sets are nested along the ladder. Reference-scale volumes only.
std::vector<SfpGraph> sample_graph_coupled_rho(SfpParams params,
                                               const std::vector<double>& rhos,
                                               std::uint64_t seed,
                                               const SamplerOptions& opts = {});

}  // namespace sfpkit
