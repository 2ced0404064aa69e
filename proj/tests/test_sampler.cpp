#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sfpkit/sampler.hpp"

using namespace sfpkit;

namespace {

SfpParams base_params() {
    SfpParams p;
    p.d = 2;
    p.alpha = 2.0;
    p.tau = 2.0;
    p.rho = 1.0;
    p.volume = 100.0;
    return p;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::fabs(fa - fb));
    }
    return d;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("points are deterministic given the seed") {
    const auto p = base_params();
    CHECK(sample_points(p, 77) == sample_points(p, 77));
    CHECK(sample_points(p, 77) != sample_points(p, 78));
}

TEST_CASE("point count is Poisson(volume)") {
    auto p = base_params();
    p.volume = 10000.0;
    const int reps = 200;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double c = static_cast<double>(sample_points(p, 1000 + r).size() / p.d);
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    CHECK(std::fabs(mean - 10000.0) < 4.0 * std::sqrt(10000.0 / reps));
    CHECK(var > 10000.0 * 0.6);
    CHECK(var < 10000.0 * 1.6);
}

TEST_CASE("points stay inside the box") {
    auto p = base_params();
    p.volume = 5000.0;
    const auto coords = sample_points(p, 3);
    const double side = p.side();
    for (double c : coords) {
        CHECK(c >= 0.0);
        CHECK(c < side);
    }
}

TEST_CASE("weight sampler inverts the Pareto tail") {
    // P(W >= t) = t^{-(tau-1)}; at tau = 2 the u = 0.25 quantile is exactly 4.
    CHECK(sample_weight(2.0, 0.25) == doctest::Approx(4.0));
    CHECK(sample_weight(2.0, 1.0 - 1e-13) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(sample_weight(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(sample_weight(0.5, 0.5), std::invalid_argument);
}

TEST_CASE("weight tail matches t^{-(tau-1)} at tau = 2.2") {
    const double tau = 2.2;
    const std::size_t n = 1000000;
    const auto w = sample_weights(tau, n, 99);
    for (double t : {2.0, 4.0, 8.0, 16.0}) {
        std::size_t count = 0;
        for (double x : w)
            if (x >= t) ++count;
        const double empirical = static_cast<double>(count) / n;
        const double expected = std::pow(t, -(tau - 1.0));
        CHECK(std::fabs(empirical - expected) <= 4.0 * std::sqrt(expected / n));
    }
}

TEST_CASE("connection probability closed form and symmetry") {
    auto p = base_params();
    p.alpha = 2.0;
    p.rho = 1.0;
    const std::vector<double> x{0.0, 0.0}, y{1.0, 0.0};
    const double v = connection_probability(x, y, 1.0, 1.0, p);
    CHECK(v == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(connection_probability(y, x, 1.0, 1.0, p) == v);

    const std::vector<double> far{0.0, 9e8};
    CHECK(connection_probability(x, far, 1.0, 1.0, p) < 1e-12);
    CHECK_THROWS_AS(connection_probability(x, x, 1.0, 1.0, p), std::invalid_argument);
}

TEST_CASE("connection probability is monotone over a parameter lattice") {
    auto p = base_params();
    const std::vector<double> origin{0.0, 0.0};
    for (double wx : {1.0, 2.0, 4.0})
        for (double wy : {1.0, 2.0, 4.0})
            for (double rho : {0.5, 1.0, 2.0})
                for (double dist : {1.0, 2.0, 4.0})
                    for (double alpha : {1.5, 2.5}) {
                        p.rho = rho;
                        p.alpha = alpha;
                        const std::vector<double> y{dist, 0.0};
                        const double v = connection_probability(origin, y, wx, wy, p);
                        auto probe = [&](double wx2, double wy2, double rho2, double dist2,
                                         double alpha2) {
                            SfpParams q = p;
                            q.rho = rho2;
                            q.alpha = alpha2;
                            const std::vector<double> y2{dist2, 0.0};
                            return connection_probability(origin, y2, wx2, wy2, q);
                        };
                        CHECK(probe(wx * 2, wy, rho, dist, alpha) >= v);
                        CHECK(probe(wx, wy * 2, rho, dist, alpha) >= v);
                        CHECK(probe(wx, wy, rho * 2, dist, alpha) >= v);
                        CHECK(probe(wx, wy, rho, dist * 2, alpha) <= v);
                        CHECK(probe(wx, wy, rho, dist, alpha + 0.5) <= v);  // dist >= 1
                    }
}

TEST_CASE("torus metric wraps") {
    auto p = base_params();
    p.volume = 100.0;  // side 10
    p.boundary = Boundary::torus;
    const std::vector<double> x{0.5, 0.0}, y{9.5, 0.0};
    CHECK(distance(x, y, p) == doctest::Approx(1.0));
    p.boundary = Boundary::box;
    CHECK(distance(x, y, p) == doctest::Approx(9.0));
}

TEST_CASE("fixed-pair edge frequency matches the closed form") {
    // dist 1, weights 1, rho = 1, alpha = 2 -> p = 1 - 1/e.
    auto p = base_params();
    const std::vector<double> coords{0.0, 0.0, 1.0, 0.0};
    const std::vector<double> weights{1.0, 1.0};
    const int reps = 20000;
    int hits = 0;
    for (int r = 0; r < reps; ++r)
        hits += sample_edges_reference(p, coords, weights, 5000 + r).size();
    const double target = 1.0 - std::exp(-1.0);
    const double sigma = std::sqrt(target * (1.0 - target) / reps);
    CHECK(std::fabs(static_cast<double>(hits) / reps - target) < 4.0 * sigma);
}

TEST_CASE("reference sampler refuses oversized boxes") {
    auto p = base_params();
    p.volume = 1e7;
    CHECK_THROWS_WITH_AS(static_cast<void>(sample_graph_reference(p, 1)),
                         doctest::Contains("accelerated"), std::invalid_argument);
}

TEST_CASE("tiny rho yields an empty edge set") {
    auto p = base_params();
    p.volume = 200.0;
    p.rho = 1e-300;
    CHECK(sample_graph_reference(p, 4).num_edges() == 0);
    CHECK(sample_graph_accelerated(p, 4).num_edges() == 0);
}

TEST_CASE("accelerated sampler is deterministic") {
    auto p = base_params();
    p.volume = 2000.0;
    const auto g1 = sample_graph_accelerated(p, 31);
    const auto g2 = sample_graph_accelerated(p, 31);
    CHECK(g1.edge_list() == g2.edge_list());
    CHECK(g1.weights() == g2.weights());
}

TEST_CASE("accelerated sampler matches the reference law") {
    // KS test on edge counts over 200 graphs per sampler, alpha = 0.01.
    auto p = base_params();
    p.volume = 400.0;
    p.tau = 2.5;
    p.rho = 0.2;
    const int reps = 200;
    std::vector<double> ref, acc;
    for (int r = 0; r < reps; ++r) {
        ref.push_back(static_cast<double>(sample_graph_reference(p, 10000 + r).num_edges()));
        acc.push_back(static_cast<double>(sample_graph_accelerated(p, 20000 + r).num_edges()));
    }
    const double d = ks_statistic(ref, acc);
    const double critical = 1.628 * std::sqrt(2.0 / reps);  // alpha = 0.01
    CHECK(d < critical);
}

TEST_CASE("accelerated sampler matches reference mean degree on a longer-range model") {
    auto p = base_params();
    p.volume = 900.0;
    p.d = 1;
    p.alpha = 1.5;
    p.tau = 2.0;
    p.rho = 0.05;
    double ref = 0.0, acc = 0.0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
        ref += static_cast<double>(sample_graph_reference(p, 300 + r).num_edges());
        acc += static_cast<double>(sample_graph_accelerated(p, 800 + r).num_edges());
    }
    CHECK(std::fabs(ref - acc) / ref < 0.08);
}

TEST_CASE("graph invariants hold on sampled graphs") {
    auto p = base_params();
    p.volume = 500.0;
    const auto g = sample_graph_accelerated(p, 8);
    CHECK_NOTHROW(g.check_invariants());
    for (VertexId v = 0; v < g.num_vertices(); ++v) CHECK(g.weight(v) >= 1.0);
}

TEST_CASE("coupled rho ladder yields nested edge sets") {
    auto p = base_params();
    p.volume = 300.0;
    const std::vector<double> rhos{0.05, 0.2, 0.8};
    const auto family = sample_graph_coupled_rho(p, rhos, 17);
    REQUIRE(family.size() == 3);
    for (std::size_t k = 0; k + 1 < family.size(); ++k) {
        const auto small = family[k].edge_list();
        const auto big = family[k + 1].edge_list();
        CHECK(small.size() <= big.size());
        for (const auto& e : small)
            CHECK(std::find(big.begin(), big.end(), e) != big.end());
    }
}

}  // TEST_SUITE
