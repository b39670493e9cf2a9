#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "branchdiff/rng.hpp"

using namespace branchdiff;

TEST_CASE("streams are reproducible and distinct") {
    CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
}

TEST_CASE("uniform doubles live in [0,1) with the right mean") {
    CounterRng rng(1, 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

namespace {
struct Stats {
    double mean, var;
};
template <class F>
Stats sample_stats(F&& draw, int n) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(draw());
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    return {m, s2 / n - m * m};
}
} // namespace

TEST_CASE("poisson moments, inversion regime") {
    CounterRng rng(5, 1);
    const double mean = 3.0;
    const auto st = sample_stats([&] { return poisson(rng, mean); }, 200000);
    CHECK(st.mean == doctest::Approx(mean).epsilon(0.01));
    CHECK(st.var == doctest::Approx(mean).epsilon(0.03));
}

TEST_CASE("poisson moments, rejection regime") {
    CounterRng rng(5, 2);
    const double mean = 45.0;
    const auto st = sample_stats([&] { return poisson(rng, mean); }, 200000);
    CHECK(st.mean == doctest::Approx(mean).epsilon(0.005));
    CHECK(st.var == doctest::Approx(mean).epsilon(0.03));
}

TEST_CASE("poisson edge cases") {
    CounterRng rng(5, 3);
    CHECK(poisson(rng, 0.0) == 0);
    CHECK_THROWS_AS(poisson(rng, -1.0), std::domain_error);
}

TEST_CASE("binomial moments, inversion regime") {
    CounterRng rng(9, 1);
    const long n = 100;
    const double p = 0.1;
    const auto st = sample_stats([&] { return binomial(rng, n, p); }, 200000);
    CHECK(st.mean == doctest::Approx(n * p).epsilon(0.01));
    CHECK(st.var == doctest::Approx(n * p * (1 - p)).epsilon(0.03));
}

TEST_CASE("binomial moments, rejection regime") {
    CounterRng rng(9, 2);
    const long n = 1000;
    const double p = 0.3;
    const auto st = sample_stats([&] { return binomial(rng, n, p); }, 200000);
    CHECK(st.mean == doctest::Approx(n * p).epsilon(0.003));
    CHECK(st.var == doctest::Approx(n * p * (1 - p)).epsilon(0.03));
}

TEST_CASE("binomial flip branch p > 1/2") {
    CounterRng rng(9, 3);
    const long n = 400;
    const double p = 0.85;
    const auto st = sample_stats([&] { return binomial(rng, n, p); }, 200000);
    CHECK(st.mean == doctest::Approx(n * p).epsilon(0.003));
    CHECK(st.var == doctest::Approx(n * p * (1 - p)).epsilon(0.03));
    for (int i = 0; i < 1000; ++i) {
        const long k = binomial(rng, n, p);
        CHECK(k >= 0);
        CHECK(k <= n);
    }
}

TEST_CASE("binomial edge cases") {
    CounterRng rng(9, 4);
    CHECK(binomial(rng, 0, 0.5) == 0);
    CHECK(binomial(rng, 10, 0.0) == 0);
    CHECK(binomial(rng, 10, 1.0) == 10);
    CHECK_THROWS_AS(binomial(rng, -1, 0.5), std::domain_error);
    CHECK_THROWS_AS(binomial(rng, 10, 1.5), std::domain_error);
}
