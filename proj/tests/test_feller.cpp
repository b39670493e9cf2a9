#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "branchdiff/feller.hpp"
#include "branchdiff/quadrature.hpp"

using namespace branchdiff;

TEST_CASE("mu/beta limits and stability near alpha = 0") {
    const auto [mu0, beta0] = mu_beta(0.0, 2.0);
    CHECK(mu0 == 1.0);
    CHECK(beta0 == 1.0);
    const auto [mu_eps, beta_eps] = mu_beta(1e-12, 2.0);
    CHECK(mu_eps == doctest::Approx(mu0).epsilon(1e-9));
    CHECK(beta_eps == doctest::Approx(beta0).epsilon(1e-9));
    CHECK_THROWS_AS(mu_beta(0.5, 0.0), std::domain_error);
}

// Density values frozen from an independent Bessel-function implementation.
TEST_CASE("transition density against frozen references") {
    CHECK(density_bessel(1.0, -0.5, 1.0) ==
          doctest::Approx(0.31362717453309025).epsilon(1e-12));
    CHECK(density_bessel(2.5, 0.5, 5.0) ==
          doctest::Approx(0.029531842346902676).epsilon(1e-12));
    CHECK(density_bessel(0.3, 0.0, 0.5) ==
          doctest::Approx(0.5565543436111563).epsilon(1e-12));
    CHECK(density_bessel(5.0, -0.5, 0.5) ==
          doctest::Approx(4.1691683416686901e-5).epsilon(1e-12));
    CHECK(extinction_prob(-0.5, 1.0) ==
          doctest::Approx(0.21406103752759711).epsilon(1e-13));
}

TEST_CASE("mixture and Bessel forms agree pointwise") {
    for (double alpha : {-0.5, 0.0, 0.5})
        for (double t : {0.5, 1.0, 5.0})
            for (double x : {0.05, 0.5, 1.0, 3.0, 8.0})
                CHECK(std::fabs(density_mixture(x, alpha, t) -
                                density_bessel(x, alpha, t)) < 1e-12);
}

TEST_CASE("atom plus continuous mass is 1") {
    for (double alpha : {-0.5, 0.0, 0.5}) {
        for (double t : {0.5, 1.0}) {
            const auto r = integrate(
                [&](double x) { return density_mixture(x, alpha, t); }, 1e-12,
                density_tail_cut(alpha, t), 1e-12, 1e-12);
            CHECK(extinction_prob(alpha, t) + r.value ==
                  doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("Laplace transform of the density matches psi") {
    const double alpha = -0.5, t = 1.0;
    for (double phi : {0.3, 1.0, 2.5}) {
        const auto r = integrate(
            [&](double x) { return std::exp(-phi * x) * density_mixture(x, alpha, t); },
            1e-12, density_tail_cut(alpha, t), 1e-13, 1e-12);
        CHECK(extinction_prob(alpha, t) + r.value ==
              doctest::Approx(laplace_psi(phi, alpha, t)).epsilon(1e-9));
    }
    CHECK(laplace_psi(0.7, alpha, 0.0) == doctest::Approx(std::exp(-0.7)).epsilon(1e-15));
    CHECK(laplace_psi(0.0, alpha, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("conditioned density integrates to 1") {
    const double alpha = -0.5, t = 1.0;
    const auto r = integrate([&](double x) { return conditioned_density(x, alpha, t); },
                             1e-12, density_tail_cut(alpha, t), 1e-12, 1e-12);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("subcritical quasi-stationary law") {
    CHECK(qsd_subcritical(0.0, -0.5) == 1.0);
    CHECK(qsd_subcritical(1.0, -1.0) == doctest::Approx(2.0 * std::exp(-2.0)));
    const auto r = integrate_exp_tail([](double x) { return qsd_subcritical(x, -0.75); },
                                      0.0, 1.5);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(qsd_subcritical(1.0, 0.5), std::domain_error);
}

TEST_CASE("critical Yaglom law") {
    CHECK(yaglom_critical(0.0) == 2.0);
    const auto r = integrate_exp_tail([](double w) { return yaglom_critical(w); }, 0.0, 2.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("supercritical stationary law conserves mass") {
    for (double alpha : {0.25, 0.5}) {
        const auto law0 = supercritical_stationary(1.0, alpha, false);
        CHECK(law0.atom == doctest::Approx(std::exp(-2.0 * alpha)).epsilon(1e-14));
        const auto r = integrate_exp_tail(
            [&](double z) { return supercritical_stationary(z, alpha, false).density; },
            0.0, 2.0 * alpha * 0.5, 1e-12, 1e-12);
        CHECK(law0.atom + r.value == doctest::Approx(1.0).epsilon(1e-8));
        const auto rc = integrate_exp_tail(
            [&](double z) { return supercritical_stationary(z, alpha, true).density; },
            0.0, 2.0 * alpha * 0.5, 1e-12, 1e-12);
        CHECK(rc.value == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(supercritical_stationary(1.0, 0.25, false).density ==
          doctest::Approx(0.10395520767485422).epsilon(1e-12));
}
