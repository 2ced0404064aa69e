#include "sfpkit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfpkit {

SfpGraph SfpGraph::build(SfpParams params, std::uint64_t seed,
                         std::vector<double> coords, std::vector<double> weights,
                         const std::vector<Edge>& edges) {
    SfpGraph g;
    g.params_ = params;
    g.seed_ = seed;
    g.coords_ = std::move(coords);
    g.weights_ = std::move(weights);

    const std::size_t n = g.weights_.size();
    if (g.coords_.size() != n * static_cast<std::size_t>(params.d))
        throw std::invalid_argument("coords size does not match vertex count * d");

    std::vector<std::size_t> deg(n, 0);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop rejected");
        ++deg[u];
        ++deg[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
    g.adj_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.adj_[cursor[u]++] = v;
        g.adj_[cursor[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
        auto first = g.adj_.begin() + g.offsets_[v];
        auto last = g.adj_.begin() + g.offsets_[v + 1];
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last)
            throw std::invalid_argument("duplicate edge rejected");
    }
    g.check_invariants();
    return g;
}

SfpGraph SfpGraph::from_edges(std::size_t n, const std::vector<Edge>& edges,
                              SfpParams params) {
    params.d = 1;
    params.volume = std::max<double>(1.0, static_cast<double>(n));
    std::vector<double> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = static_cast<double>(i);
    std::vector<double> weights(n, 1.0);
    return build(params, 0, std::move(coords), std::move(weights), edges);
}

bool SfpGraph::has_edge(VertexId u, VertexId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> SfpGraph::edge_list() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (VertexId u = 0; u < num_vertices(); ++u)
        for (VertexId v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

void SfpGraph::check_invariants() const {
    for (VertexId u = 0; u < num_vertices(); ++u) {
        for (VertexId v : neighbors(u)) {
            if (v == u) throw std::logic_error("self-loop in adjacency");
            if (!has_edge(v, u)) throw std::logic_error("asymmetric adjacency");
        }
    }
}

double distance(std::span<const double> x, std::span<const double> y,
                const SfpParams& params) {
    double s = 0.0;
    const double side = params.side();
    for (std::size_t j = 0; j < x.size(); ++j) {
        double delta = std::fabs(x[j] - y[j]);
        if (params.boundary == Boundary::torus) delta = std::min(delta, side - delta);
        s += delta * delta;
    }
    return std::sqrt(s);
}

}  // namespace sfpkit
