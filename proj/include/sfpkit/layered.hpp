#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfpkit/constellation.hpp"
#include "sfpkit/graph.hpp"
#include "sfpkit/params.hpp"
#include "sfpkit/pipeline_gt2.hpp"  // StageFailure / ExtractResult

namespace sfpkit::constellation {

struct LayeredSpec {
    double a = 0.0;  // (0, 1/log 2)
    double L = 0.0;  // ((gamma/2) log 2, log 2)
    double S = 2.0;  // star size, >= 2
};

// Layered box family over position x weight space: layer k has spatial
// cells of side 2^{k+1} and the weight band (e^{kL alpha/gamma},
// e^{(k+1)L alpha/gamma}]. Layers run k = 0 .. k_n - 1; the top layer has
// m_n boxes, and each box in layer k+1 is the parent of its 2^d children.
class LayeredBoxes {
public:
    int d = 1;
    int k_n = 0;
    long long m_n = 0;
    long long axis_top = 0;  // m_n^{1/d}
    double weight_exp = 0.0; // L * alpha / gamma
    double L = 0.0;
    double eps1 = 0.0;       // log 2 - L
    double eps2 = 0.0;       // alpha (2L/gamma - log 2)

    int top() const { return k_n - 1; }
    long long per_axis(int k) const { return axis_top << (top() - k); }
    long long boxes_in_layer(int k) const;
    double spatial_side(int k) const { return std::pow(2.0, k + 1); }
    double band_low(int k) const { return std::exp(k * weight_exp); }
    double band_high(int k) const { return std::exp((k + 1) * weight_exp); }

    // Expected occupancy of one layer-k box under the unit-intensity model:
    // 2^d (1 - e^{-dL}) (2 e^{-L})^{kd}.
    double expected_occupancy(int k) const;

    // Weight band index of w, or -1 when w falls outside every band.
    int band_of(double w) const;
    // Spatial cell of x in layer k (flat row-major index), or -1 outside.
    long long cell_of(int k, std::span<const double> x) const;
    // Parent flat index of cell v in layer k (valid for k < top()).
    long long parent_of(int k, long long v) const;

    std::vector<long long> decode(int k, long long flat) const;
    long long encode(int k, const std::vector<long long>& coords) const;
};

LayeredBoxes build_layered_boxes(const SfpParams& params, const LayeredSpec& spec);

struct LayeredReport {
    std::vector<long long> good_per_layer;  // G_k, index k
    std::vector<long long> boxes_per_layer;
};

struct LayeredExtractResult {
    std::optional<Constellation> constellation;
    std::optional<StageFailure> failure;
    std::vector<std::string> warnings;
    LayeredReport report;
    bool ok() const { return constellation.has_value(); }
};

// Good-box recursion of the heavy-tail construction: the top layer is
// chained in snake order starting from the origin box; lower layers require
// a good parent, occupancy >= S+1, a star with >= S in-box neighbors and an
// edge to the parent star. Output is an (S, 1, 2^d+2)-constellation.
LayeredExtractResult extract_constellation_gamma_in_1_2(const SfpGraph& g,
                                                        const LayeredSpec& spec);

}  // namespace sfpkit::constellation
