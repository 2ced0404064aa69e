#include <cmath>
#include <map>

#include "doctest.h"
#include "sfpkit/layered.hpp"
#include "sfpkit/sampler.hpp"

using namespace sfpkit;
using namespace sfpkit::constellation;

namespace {

SfpParams heavy_params(double volume, double rho) {
    SfpParams p;
    p.d = 1;
    p.alpha = 1.5;
    p.tau = 2.0;  // gamma = 1.5
    p.rho = rho;
    p.volume = volume;
    return p;
}

}  // namespace

TEST_SUITE("layered") {

TEST_CASE("spatial cell volume is 2^{d(k+1)}") {
    const auto boxes = build_layered_boxes(heavy_params(2000.0, 0.5), {0.9, 0.6, 2.0});
    CHECK(std::pow(boxes.spatial_side(3), boxes.d) == doctest::Approx(16.0));
    // d = 2, k = 3 -> 256
    SfpParams p2;
    p2.d = 2;
    p2.alpha = 2.5;
    p2.tau = 2.2;
    p2.rho = 0.5;
    p2.volume = 1e6;
    const auto b2 = build_layered_boxes(p2, {0.9, 0.6, 2.0});
    CHECK(std::pow(b2.spatial_side(3), b2.d) == doctest::Approx(256.0));
}

TEST_CASE("expected occupancy formula") {
    // d=1, L=0.5, k=3: 2 (1-e^{-0.5}) (2 e^{-0.5})^3 ~ 1.4048.
    // L = 0.5 requires gamma < 2L/log2 ~ 1.4427; use gamma = 1.4.
    SfpParams p = heavy_params(3000.0, 0.5);
    p.alpha = 1.4;  // gamma = 1.4
    const auto boxes = build_layered_boxes(p, {0.9, 0.5, 2.0});
    CHECK(boxes.expected_occupancy(3) == doctest::Approx(1.4047180305890740).epsilon(1e-9));
}

TEST_CASE("monte carlo occupancy matches the formula") {
    SfpParams p = heavy_params(4000.0, 0.5);
    const LayeredSpec spec{0.9, 0.55, 2.0};
    const auto boxes = build_layered_boxes(p, spec);
    const int k_probe = 2;
    const long long cells = boxes.boxes_in_layer(k_probe);
    REQUIRE(cells > 0);
    double total = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        const auto coords = sample_points(p, 700 + r);
        const std::size_t n = coords.size() / p.d;
        const auto weights = sample_weights(p.tau, n, 700 + r);
        for (std::size_t v = 0; v < n; ++v) {
            if (boxes.band_of(weights[v]) != k_probe) continue;
            const std::span<const double> pos{coords.data() + v * p.d,
                                              static_cast<std::size_t>(p.d)};
            if (boxes.cell_of(k_probe, pos) >= 0) total += 1.0;
        }
    }
    const double per_box = total / (reps * static_cast<double>(cells));
    const double mu = boxes.expected_occupancy(k_probe);
    const double se = std::sqrt(mu / (reps * static_cast<double>(cells)));
    CHECK(std::fabs(per_box - mu) < 5.0 * se);
}

TEST_CASE("weight bands are disjoint, ordered, and anchored at 1") {
    const auto boxes = build_layered_boxes(heavy_params(2000.0, 0.5), {0.9, 0.6, 2.0});
    CHECK(boxes.band_low(0) == doctest::Approx(1.0));
    for (int k = 0; k + 1 <= boxes.top(); ++k)
        CHECK(boxes.band_high(k) == doctest::Approx(boxes.band_low(k + 1)));
    CHECK(boxes.band_of(1.0) == -1);                       // bands are open at 1
    CHECK(boxes.band_of(boxes.band_high(0)) == 0);         // closed right end
    CHECK(boxes.band_of(boxes.band_high(0) * 1.0001) == 1);
    CHECK(boxes.band_of(boxes.band_high(boxes.top()) * 1.01) == -1);  // above top
}

TEST_CASE("every child cell sits inside its parent") {
    const auto boxes = build_layered_boxes(heavy_params(5000.0, 0.5), {0.9, 0.6, 2.0});
    for (int k = 0; k < boxes.top(); ++k) {
        const long long cells = boxes.boxes_in_layer(k);
        for (long long v = 0; v < cells; ++v) {
            const auto child = boxes.decode(k, v);
            const long long pflat = boxes.parent_of(k, v);
            const auto parent = boxes.decode(k + 1, pflat);
            for (int j = 0; j < boxes.d; ++j) {
                const double clo = child[j] * boxes.spatial_side(k);
                const double chi = (child[j] + 1) * boxes.spatial_side(k);
                const double plo = parent[j] * boxes.spatial_side(k + 1);
                const double phi = (parent[j] + 1) * boxes.spatial_side(k + 1);
                CHECK(clo >= plo);
                CHECK(chi <= phi);
            }
        }
    }
}

TEST_CASE("derived quantities match the floor formulas") {
    SfpParams p = heavy_params(2000.0, 0.5);
    const LayeredSpec spec{0.9, 0.6, 2.0};
    const auto boxes = build_layered_boxes(p, spec);
    CHECK(boxes.k_n == static_cast<int>(std::floor(0.9 * std::log(2000.0))));
    CHECK(boxes.axis_top ==
          static_cast<long long>(std::floor(std::pow(2000.0, 1.0 - 0.9 * std::log(2.0)))));
    CHECK(boxes.eps1 == doctest::Approx(std::log(2.0) - 0.6));
    CHECK(boxes.eps2 == doctest::Approx(1.5 * (2.0 * 0.6 / 1.5 - std::log(2.0))));
    CHECK(boxes.eps1 > 0.0);
    CHECK(boxes.eps2 > 0.0);
}

TEST_CASE("interval constraints and small n are rejected") {
    SfpParams p = heavy_params(2000.0, 0.5);
    CHECK_THROWS_AS(static_cast<void>(build_layered_boxes(p, {2.0, 0.6, 2.0})),
                    std::invalid_argument);  // a >= 1/log2
    CHECK_THROWS_AS(static_cast<void>(build_layered_boxes(p, {0.9, 0.4, 2.0})),
                    std::invalid_argument);  // L below (gamma/2) log 2
    CHECK_THROWS_AS(static_cast<void>(build_layered_boxes(p, {0.9, 0.8, 2.0})),
                    std::invalid_argument);  // L above log 2
    SfpParams tiny = heavy_params(2.0, 0.5);
    CHECK_THROWS_WITH_AS(static_cast<void>(build_layered_boxes(tiny, {0.2, 0.6, 2.0})),
                         doctest::Contains("too small"), std::invalid_argument);
}

TEST_CASE("extraction output passes the checker with D=1 and bounded Delta") {
    SfpParams p = heavy_params(3000.0, 0.6);
    const LayeredSpec spec{0.9, 0.57, 2.0};
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = sample_graph_accelerated(p, seed);
        const auto res = extract_constellation_gamma_in_1_2(g, spec);
        if (!res.ok()) {
            REQUIRE(res.failure.has_value());
            CHECK(!res.failure->stage.empty());
            continue;
        }
        ++successes;
        const auto& c = *res.constellation;
        CHECK(c.params.D == 1);
        CHECK(c.params.Delta == (1 << p.d) + 2);
        CHECK(verify(c).ok);
        // good boxes reported per layer; the top layer holds the chain
        long long total_good = 0;
        for (long long gk : res.report.good_per_layer) total_good += gk;
        CHECK(total_good == static_cast<long long>(c.distinguished.size()));
    }
    CHECK(successes >= 1);
}

TEST_CASE("oversized S fails with a staged top-chain report") {
    SfpParams p = heavy_params(3000.0, 0.6);
    const auto res =
        extract_constellation_gamma_in_1_2(sample_graph_accelerated(p, 1), {0.9, 0.57, 500.0});
    REQUIRE(!res.ok());
    CHECK(res.failure->stage == "top_chain");
    CHECK(res.failure->detail.find("occupancy") != std::string::npos);
}

}  // TEST_SUITE
