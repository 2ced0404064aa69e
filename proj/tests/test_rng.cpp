#include <cmath>

#include "doctest.h"
#include "sfpkit/rng.hpp"

using namespace sfpkit;

TEST_SUITE("rng") {

TEST_CASE("same key reproduces the same sequence") {
    Stream a(derive_key(42, StreamTag::points));
    Stream b(derive_key(42, StreamTag::points));
    for (int i = 0; i < 1000; ++i) CHECK(a() == b());
}

TEST_CASE("counter restore resumes a stream mid-way") {
    Stream a(derive_key(7, StreamTag::arrows, 3));
    for (int i = 0; i < 17; ++i) (void)a();
    Stream b(derive_key(7, StreamTag::arrows, 3), a.counter());
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("purpose streams are distinct") {
    Stream points(derive_key(1, StreamTag::points));
    Stream weights(derive_key(1, StreamTag::weights));
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (points() == weights()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform stays inside the open interval") {
    Stream st(derive_key(3, StreamTag::points));
    for (int i = 0; i < 100000; ++i) {
        const double u = st.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("exponential has the right mean") {
    Stream st(derive_key(11, StreamTag::recovery, 0));
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += st.exponential(2.0);
    const double mean = sum / n;
    CHECK(std::fabs(mean - 0.5) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("poisson mean equals variance") {
    Stream st(derive_key(5, StreamTag::points));
    const double mu = 120.0;
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(st.poisson(mu));
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean - mu) < 4.0 * std::sqrt(mu / n));
    CHECK(std::fabs(var - mu) < 5.0 * mu * std::sqrt(2.0 / n));
}

TEST_CASE("replica seeds differ") {
    CHECK(replica_seed(9, 0) != replica_seed(9, 1));
    CHECK(replica_seed(9, 0) != replica_seed(10, 0));
}

}  // TEST_SUITE
