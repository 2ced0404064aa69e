#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfpkit/graph.hpp"

namespace sfpkit::analysis {

struct TailFit {
    std::string estimator = "hill";
    double exponent = 0.0;  // gamma convention: P(D > s) ~ s^{-gamma}
    double ci_low = 0.0;
    double ci_high = 0.0;
    double tail_fraction = 0.0;
    std::size_t k_used = 0;
};

// Hill estimator on the top tail_fraction of the degree sequence. The tail
// is assumed to be a pure power law; any slowly varying factor is ignored.
TailFit degree_tail_fit(const SfpGraph& g, double tail_fraction = 0.01);
TailFit hill_fit(std::vector<double> values, double tail_fraction);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

// log(mean degree) vs log(weight) over logarithmic weight bins; the slope
// tracks d/alpha.
SlopeFit degree_weight_scaling(const SfpGraph& g, int n_bins);

// Hop distance by BFS; empty when unreachable.
std::optional<int> graph_distance(const SfpGraph& g, VertexId u, VertexId v);

struct DistanceSample {
    VertexId u = 0;
    VertexId v = 0;
    double euclidean = 0.0;
    int hops = -1;
    bool reachable = false;
};

// Uniform vertex pairs from the largest component, with Euclidean and graph
// distance per pair (sampling is with replacement).
std::vector<DistanceSample> chemical_distance_sample(const SfpGraph& g,
                                                     std::size_t n_pairs,
                                                     std::uint64_t seed);

std::vector<std::vector<VertexId>> connected_components(const SfpGraph& g);
double largest_component_fraction(const SfpGraph& g);

struct ScalingPoint {
    double n = 0.0;
    double median_tau = 0.0;
    bool lower_bound = false;  // median landed on a censored replica
};

enum class Predictor { n, n_over_logA };

struct ScalingFit {
    Predictor predictor = Predictor::n;
    double A = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool lower_bound_only = false;
    std::size_t points = 0;
};

// Least squares of log(median tau) against the predictor (n or
// n / (log n)^A). Requires >= 4 points; points carrying censored medians
// mark the fit as lower-bound-only.
ScalingFit extinction_scaling_fit(const std::vector<ScalingPoint>& pts, Predictor pred,
                                  double A = 0.0);

}  // namespace sfpkit::analysis
