#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sfpkit/params.hpp"

namespace sfpkit {

using VertexId = std::uint32_t;
using Edge = std::pair<VertexId, VertexId>;

// Immutable sampled graph. Positions and weights are stored flat; adjacency
// is CSR with every neighbor list sorted ascending.
class SfpGraph {
public:
    SfpGraph() = default;

    // Builds the CSR adjacency from an unordered edge list. Rejects
    // self-loops and duplicate edges.
    static SfpGraph build(SfpParams params, std::uint64_t seed,
                          std::vector<double> coords, std::vector<double> weights,
                          const std::vector<Edge>& edges);

    // Test/fixture helper: n vertices on a line with unit weights.
    static SfpGraph from_edges(std::size_t n, const std::vector<Edge>& edges,
                               SfpParams params = {});

    const SfpParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    std::size_t num_vertices() const { return weights_.size(); }
    std::size_t num_edges() const { return adj_.size() / 2; }

    std::span<const double> position(VertexId v) const {
        return {coords_.data() + static_cast<std::size_t>(v) * params_.d,
                static_cast<std::size_t>(params_.d)};
    }
    double weight(VertexId v) const { return weights_[v]; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& coords() const { return coords_; }

    std::span<const VertexId> neighbors(VertexId v) const {
        return {adj_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
    bool has_edge(VertexId u, VertexId v) const;

    // Raw CSR access: entry e is one directed edge; its target is adj[e].
    std::size_t csr_size() const { return adj_.size(); }
    VertexId csr_target(std::size_t e) const { return adj_[e]; }

    // All edges as (u, v) with u < v, in CSR order.
    std::vector<Edge> edge_list() const;

    // Checked on every build; throws std::logic_error on violation.
    void check_invariants() const;

private:
    SfpParams params_;
    std::uint64_t seed_ = 0;
    std::vector<double> coords_;
    std::vector<double> weights_;
    std::vector<std::size_t> offsets_;
    std::vector<VertexId> adj_;
};

// Distance respecting the boundary mode (Euclidean in a box, wrapped on the
// torus).
double distance(std::span<const double> x, std::span<const double> y,
                const SfpParams& params);

}  // namespace sfpkit
