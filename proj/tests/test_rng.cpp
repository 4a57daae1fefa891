#include <doctest.h>

#include <vector>

#include "sbmgof/rng.hpp"

using namespace sbmgof;

TEST_CASE("streams replay exactly") {
    rng::Stream a(rng::derive(7, 1, 2));
    rng::Stream b(rng::derive(7, 1, 2));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived keys differ across indices") {
    CHECK(rng::derive(7, 1, 2) != rng::derive(7, 2, 1));
    CHECK(rng::derive(7, 1) != rng::derive(8, 1));
    CHECK(rng::derive(7, 0) != rng::derive(7, 1));
}

TEST_CASE("unit draws stay in [0,1) and look uniform") {
    rng::Stream s(123);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bounded draws cover the range uniformly") {
    rng::Stream s(99);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[s.next_below(7)];
    for (int c : counts) CHECK(c == doctest::Approx(n / 7.0).epsilon(0.05));
}
