#include "sfpkit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfpkit {

std::vector<double> sample_points(const SfpParams& params, std::uint64_t seed) {
    params.validate();
    Stream st(derive_key(seed, StreamTag::points));
    const std::uint64_t n = st.poisson(params.volume);
    const double side = params.side();
    std::vector<double> coords(n * params.d);
    for (double& c : coords) c = st.uniform() * side;
    return coords;
}

double sample_weight(double tau, double u) {
    if (!(tau > 1.0)) throw std::invalid_argument("tau must be > 1");
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("u must lie in (0,1)");
    return std::pow(u, -1.0 / (tau - 1.0));
}

std::vector<double> sample_weights(double tau, std::size_t n, std::uint64_t seed) {
    Stream st(derive_key(seed, StreamTag::weights));
    std::vector<double> w(n);
    for (double& x : w) x = sample_weight(tau, st.uniform());
    return w;
}

double connection_probability(std::span<const double> x, std::span<const double> y,
                              double wx, double wy, const SfpParams& params) {
    const double r = distance(x, y, params);
    if (r == 0.0) throw std::invalid_argument("coincident points: connection probability undefined");
    return -std::expm1(-params.rho * wx * wy / std::pow(r, params.alpha));
}

namespace {

std::span<const double> pos_of(const std::vector<double>& coords, int d, std::size_t i) {
    return {coords.data() + i * d, static_cast<std::size_t>(d)};
}

}  // namespace

std::vector<Edge> sample_edges_reference(const SfpParams& params,
                                         const std::vector<double>& coords,
                                         const std::vector<double>& weights,
                                         std::uint64_t seed) {
    const std::size_t n = weights.size();
    Stream st(derive_key(seed, StreamTag::edges));
    std::vector<Edge> edges;
    for (std::size_t u = 0; u + 1 < n; ++u) {
        const auto xu = pos_of(coords, params.d, u);
        for (std::size_t v = u + 1; v < n; ++v) {
            const double p = connection_probability(xu, pos_of(coords, params.d, v),
                                                    weights[u], weights[v], params);
            if (st.uniform() < p)
                edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
        }
    }
    return edges;
}

SfpGraph sample_graph_reference(const SfpParams& params, std::uint64_t seed,
                                const SamplerOptions& opts) {
    params.validate();
    if (params.volume > opts.reference_max_expected)
        throw std::invalid_argument(
            "expected vertex count exceeds the all-pairs threshold; "
            "use sample_graph_accelerated");

    std::vector<double> coords = sample_points(params, seed);
    const std::size_t n = coords.size() / params.d;
    std::vector<double> weights = sample_weights(params.tau, n, seed);
    const std::vector<Edge> edges = sample_edges_reference(params, coords, weights, seed);
    return SfpGraph::build(params, seed, std::move(coords), std::move(weights), edges);
}

std::vector<SfpGraph> sample_graph_coupled_rho(SfpParams params,
                                               const std::vector<double>& rhos,
                                               std::uint64_t seed,
                                               const SamplerOptions& opts) {
    params.validate();
    if (params.volume > opts.reference_max_expected)
        throw std::invalid_argument("coupled-rho sampler is all-pairs; volume too large");
    if (rhos.empty()) throw std::invalid_argument("rho list empty");

    std::vector<double> coords = sample_points(params, seed);
    const std::size_t n = coords.size() / params.d;
    std::vector<double> weights = sample_weights(params.tau, n, seed);

    Stream st(derive_key(seed, StreamTag::edges));
    std::vector<std::vector<Edge>> edges(rhos.size());
    for (std::size_t u = 0; u + 1 < n; ++u) {
        const auto xu = pos_of(coords, params.d, u);
        for (std::size_t v = u + 1; v < n; ++v) {
            const double mark = st.uniform();
            for (std::size_t k = 0; k < rhos.size(); ++k) {
                SfpParams pk = params;
                pk.rho = rhos[k];
                const double p = connection_probability(xu, pos_of(coords, params.d, v),
                                                        weights[u], weights[v], pk);
                if (mark < p)
                    edges[k].emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
            }
        }
    }
    std::vector<SfpGraph> out;
    out.reserve(rhos.size());
    for (std::size_t k = 0; k < rhos.size(); ++k) {
        SfpParams pk = params;
        pk.rho = rhos[k];
        out.push_back(SfpGraph::build(pk, seed, std::vector<double>(coords),
                                      std::vector<double>(weights), edges[k]));
    }
    return out;
}

namespace {

// Uniform grid over the sampling box; cell side >= 1 so that non-adjacent
// cells are at distance >= 1 and the unclamped domination weight
// rho*wx*wy/rmin^alpha is finite and decreasing in cell separation.
struct CellGrid {
    int d;
    int per_axis;
    double cell_side;
    double side;
    bool torus;
    std::vector<std::vector<std::uint32_t>> members;  // vertex ids per cell
    std::vector<double> wmax;                         // max weight per cell

    std::size_t num_cells() const { return members.size(); }

    std::size_t cell_of(std::span<const double> x) const {
        std::size_t idx = 0;
        for (int j = 0; j < d; ++j) {
            int c = static_cast<int>(x[j] / cell_side);
            c = std::clamp(c, 0, per_axis - 1);
            idx = idx * per_axis + static_cast<std::size_t>(c);
        }
        return idx;
    }

    void decode(std::size_t idx, int* out) const {
        for (int j = d - 1; j >= 0; --j) {
            out[j] = static_cast<int>(idx % per_axis);
            idx /= per_axis;
        }
    }

    // Chebyshev separation in cell units, wrapped on the torus.
    int axis_sep(int a, int b) const {
        int delta = std::abs(a - b);
        if (torus) delta = std::min(delta, per_axis - delta);
        return delta;
    }

    // Minimal Euclidean distance between two cells; 0 for identical or
    // face/corner adjacent cells.
    double min_distance(const int* ca, const int* cb) const {
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const int sep = axis_sep(ca[j], cb[j]);
            if (sep > 1) {
                const double g = (sep - 1) * cell_side;
                s += g * g;
            }
        }
        return std::sqrt(s);
    }
};

CellGrid make_grid(const SfpParams& params, const std::vector<double>& coords,
                   const std::vector<double>& weights, double target_cells) {
    CellGrid grid;
    grid.d = params.d;
    grid.side = params.side();
    grid.torus = params.boundary == Boundary::torus;
    const int max_axis = static_cast<int>(std::floor(grid.side));
    const int want_axis =
        static_cast<int>(std::llround(std::pow(target_cells, 1.0 / params.d)));
    grid.per_axis = std::max(1, std::min(max_axis, want_axis));
    grid.cell_side = grid.side / grid.per_axis;

    std::size_t cells = 1;
    for (int j = 0; j < params.d; ++j) cells *= static_cast<std::size_t>(grid.per_axis);
    grid.members.assign(cells, {});
    grid.wmax.assign(cells, 0.0);
    const std::size_t n = weights.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = grid.cell_of(pos_of(coords, params.d, i));
        grid.members[c].push_back(static_cast<std::uint32_t>(i));
        grid.wmax[c] = std::max(grid.wmax[c], weights[i]);
    }
    return grid;
}

}  // namespace

SfpGraph sample_graph_accelerated(const SfpParams& params, std::uint64_t seed,
                                  const SamplerOptions& opts) {
    params.validate();
    std::vector<double> coords = sample_points(params, seed);
    const std::size_t n = coords.size() / params.d;
    std::vector<double> weights = sample_weights(params.tau, n, seed);

    const CellGrid grid = make_grid(params, coords, weights, opts.target_cells);
    const std::size_t cells = grid.num_cells();
    std::vector<Edge> edges;

    std::vector<int> ca(params.d), cb(params.d);
    for (std::size_t a = 0; a < cells; ++a) {
        if (grid.members[a].empty()) continue;
        grid.decode(a, ca.data());
        for (std::size_t b = a; b < cells; ++b) {
            if (grid.members[b].empty()) continue;
            grid.decode(b, cb.data());
            const double rmin = grid.min_distance(ca.data(), cb.data());
            // One stream per unordered cell pair: schedule-independent.
            Stream st(derive_key(seed, StreamTag::edges, a * cells + b));
            const auto& A = grid.members[a];
            const auto& B = grid.members[b];

            if (rmin == 0.0) {
                // Same or adjacent cell: evaluate each pair directly.
                for (std::size_t i = 0; i < A.size(); ++i) {
                    const std::size_t j0 = (a == b) ? i + 1 : 0;
                    const auto xi = pos_of(coords, params.d, A[i]);
                    for (std::size_t j = j0; j < B.size(); ++j) {
                        const double p = connection_probability(
                            xi, pos_of(coords, params.d, B[j]), weights[A[i]],
                            weights[B[j]], params);
                        if (st.uniform() < p) edges.emplace_back(A[i], B[j]);
                    }
                }
                continue;
            }

            // Distant pair: dominate every p_xy by a constant
            // Q = min(1, rho * wmaxA * wmaxB / rmin^alpha), walk the pair
            // lattice with geometric jumps, and thin each hit by p/Q.
            const double mass =
                params.rho * grid.wmax[a] * grid.wmax[b] / std::pow(rmin, params.alpha);
            const double q = std::min(1.0, mass);
            const std::size_t total = A.size() * B.size();
            if (q * static_cast<double>(total) < opts.negligible_mass_cutoff) continue;

            if (q >= 1.0) {
                for (std::size_t i = 0; i < A.size(); ++i) {
                    const auto xi = pos_of(coords, params.d, A[i]);
                    for (std::size_t j = 0; j < B.size(); ++j) {
                        const double p = connection_probability(
                            xi, pos_of(coords, params.d, B[j]), weights[A[i]],
                            weights[B[j]], params);
                        if (st.uniform() < p) edges.emplace_back(A[i], B[j]);
                    }
                }
                continue;
            }

            const double log1mq = std::log1p(-q);
            std::size_t k = 0;
            while (true) {
                const double jump = std::log(st.uniform()) / log1mq;
                if (jump >= static_cast<double>(total - k)) break;
                k += static_cast<std::size_t>(jump);
                if (k >= total) break;
                const std::uint32_t u = A[k / B.size()];
                const std::uint32_t v = B[k % B.size()];
                const double p =
                    connection_probability(pos_of(coords, params.d, u),
                                           pos_of(coords, params.d, v), weights[u],
                                           weights[v], params);
                if (st.uniform() < p / q) edges.emplace_back(u, v);
                ++k;
            }
        }
    }
    return SfpGraph::build(params, seed, std::move(coords), std::move(weights), edges);
}

}  // namespace sfpkit
