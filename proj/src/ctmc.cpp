#include "sfpkit/ctmc.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <vector>

namespace sfpkit::contact {

double exact_mean_extinction(const SfpGraph& graph, double lambda) {
    const std::size_t n = graph.num_vertices();
    if (n == 0) throw std::invalid_argument("empty graph");
    if (n > 12) throw std::invalid_argument("exact oracle limited to |V| <= 12");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");

    const std::uint32_t n_states = 1u << n;  // state = infected bitmask; 0 absorbing
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    Eigen::VectorXd b(n_states - 1);

    // For each transient state s (index s-1): E[s] = 1/R(s) + sum_t P(s->t) E[t].
    for (std::uint32_t s = 1; s < n_states; ++s) {
        double total_rate = 0.0;
        std::vector<std::pair<std::uint32_t, double>> moves;
        for (std::uint32_t x = 0; x < n; ++x) {
            if (s >> x & 1u) {
                moves.emplace_back(s & ~(1u << x), 1.0);
                total_rate += 1.0;
            } else {
                std::uint32_t k = 0;
                for (VertexId y : graph.neighbors(x))
                    if (s >> y & 1u) ++k;
                if (k > 0) {
                    const double r = lambda * k;
                    moves.emplace_back(s | (1u << x), r);
                    total_rate += r;
                }
            }
        }
        trips.emplace_back(static_cast<int>(s - 1), static_cast<int>(s - 1), 1.0);
        b[s - 1] = 1.0 / total_rate;
        for (const auto& [t, r] : moves)
            if (t != 0)
                trips.emplace_back(static_cast<int>(s - 1), static_cast<int>(t - 1),
                                   -r / total_rate);
    }

    Eigen::SparseMatrix<double> A(n_states - 1, n_states - 1);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("CTMC system factorization failed");
    const Eigen::VectorXd sol = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("CTMC system solve failed");
    return sol[n_states - 2];  // full occupancy
}

double exact_mean_extinction(std::size_t n, const std::vector<Edge>& edges, double lambda) {
    return exact_mean_extinction(SfpGraph::from_edges(n, edges), lambda);
}

}  // namespace sfpkit::contact
