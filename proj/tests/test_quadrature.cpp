#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "branchdiff/quadrature.hpp"

using namespace branchdiff;

TEST_CASE("polynomials are integrated to machine precision") {
    auto r = integrate([](double x) { return 3.0 * x * x; }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.converged);
    r = integrate([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0);
    CHECK(r.value == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("smooth transcendental integrands") {
    const double pi = 3.14159265358979323846;
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, pi);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
    r = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(r.value == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
}

TEST_CASE("integrable endpoint singularity x^{-1/2}") {
    auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12, 1e-12);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("logarithmic singularity") {
    auto r = integrate([](double x) { return std::log(x); }, 1e-300, 1.0, 1e-12, 1e-12);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("reported error bounds the true error") {
    auto r = integrate([](double x) { return std::cos(10.0 * x); }, 0.0, 3.0);
    const double exact = std::sin(30.0) / 10.0;
    CHECK(std::fabs(r.value - exact) <= std::max(r.error, 1e-13));
}

TEST_CASE("exponential tail helper covers the half line") {
    auto r = integrate_exp_tail([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    r = integrate_exp_tail([](double x) { return x * std::exp(-0.5 * x); }, 0.0, 0.5);
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("degenerate and invalid ranges") {
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0),
                    std::invalid_argument);
}
