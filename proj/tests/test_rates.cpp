#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "branchdiff/rates.hpp"

using namespace branchdiff;

namespace {
Eigen::MatrixXd p3() {
    Eigen::MatrixXd P(3, 3);
    P << 0.5, 0.3, 0.2,
         0.25, 0.5, 0.25,
         0.1, 0.4, 0.5;
    return P;
}
} // namespace

TEST_CASE("RateMatrix validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << -1.0, 0.5, 1.0, -1.0;
    CHECK_THROWS_AS(RateMatrix{bad}, std::invalid_argument);
    bad << -1.0, -1.0, 1.0, -1.0;
    CHECK_THROWS_AS(RateMatrix{bad}, std::invalid_argument);
}

TEST_CASE("from_theta_p / to_theta_p round trip on the generator") {
    const RateMatrix rm = from_theta_p(0.3, p3());
    const ThetaP tp = to_theta_p(rm);
    const RateMatrix back = from_theta_p(tp.theta, tp.P);
    CHECK((back.gamma - rm.gamma).cwiseAbs().maxCoeff() < 1e-14);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(tp.P(i, j) >= 0.0);
}

TEST_CASE("canonical theta is the smallest keeping P nonnegative") {
    const RateMatrix rm = from_theta_p(0.3, p3());
    const ThetaP tp = to_theta_p(rm);
    double diag_min = 1.0;
    for (int i = 0; i < 3; ++i)
        diag_min = std::min(diag_min, tp.P(i, i));
    CHECK(diag_min == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stationary distribution solves pi gamma = 0") {
    const RateMatrix rm = from_theta_p(0.3, p3());
    const Eigen::VectorXd pi = stationary_pi(rm);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((pi.transpose() * rm.gamma).cwiseAbs().maxCoeff() < 1e-13);
    for (int i = 0; i < 3; ++i)
        CHECK(pi(i) > 0.0);
}

TEST_CASE("reducible chains are rejected") {
    Eigen::MatrixXd g(3, 3);
    g << -1.0, 1.0, 0.0,
          1.0, -1.0, 0.0,
          0.0, 0.0, 0.0;
    const RateMatrix rm{g};
    CHECK_FALSE(is_irreducible(rm));
    CHECK_THROWS_AS(stationary_pi(rm), std::runtime_error);
}

TEST_CASE("parent-independent matrix is reversible with stationary pi") {
    Eigen::VectorXd pi(3);
    pi << 0.5, 0.3, 0.2;
    const RateMatrix rm = pim(0.4, pi);
    const Eigen::VectorXd found = stationary_pi(rm);
    CHECK((found - pi).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(is_reversible(rm, found));
}

TEST_CASE("spectral decomposition: eigensystem structure") {
    Eigen::VectorXd pi(4);
    pi << 0.4, 0.3, 0.2, 0.1;
    const RateMatrix rm = pim(0.7, pi);
    const SpectralData sd = spectral_decompose(rm);
    CHECK(sd.eigenvalues(0) == 0.0);
    for (int l = 1; l < 4; ++l)
        CHECK(sd.eigenvalues(l) < 0.0);
    // pi-weighted orthonormality of the u vectors
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
                s += sd.pi(i) * sd.u(i, k) * sd.u(i, l);
            CHECK(s == doctest::Approx(k == l ? 1.0 : 0.0).epsilon(1e-12));
        }
    // principal vector is constant 1
    for (int i = 0; i < 4; ++i)
        CHECK(sd.u(i, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral decomposition reconstructs the generator") {
    Eigen::VectorXd pi(3);
    pi << 0.5, 0.3, 0.2;
    const RateMatrix rm = pim(0.4, pi);
    const SpectralData sd = spectral_decompose(rm);
    // gamma_ij = sum_l nu_l u_i^(l) u_j^(l) pi_j
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double g = 0.0;
            for (int l = 0; l < 3; ++l)
                g += sd.eigenvalues(l) * sd.u(i, l) * sd.u(j, l) * sd.pi(j);
            CHECK(g == doctest::Approx(rm.gamma(i, j)).epsilon(1e-10));
        }
}

TEST_CASE("spectral decomposition rejects non-reversible generators") {
    Eigen::MatrixXd g(3, 3);
    g << -1.0, 1.0, 0.0,
          0.0, -1.0, 1.0,
          1.0, 0.0, -1.0;
    CHECK_THROWS_AS(spectral_decompose(RateMatrix{g}), std::runtime_error);
}

TEST_CASE("SmallThetaModel constructors agree where they overlap") {
    Eigen::VectorXd pi(2);
    pi << 0.75, 0.25;
    const SmallThetaModel a = SmallThetaModel::from_pim(0.1, pi);
    CHECK(a.P(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(a.P(1, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK((a.pi - pi).cwiseAbs().maxCoeff() < 1e-13);

    const SmallThetaModel b = SmallThetaModel::from_p(0.3, p3());
    const Eigen::VectorXd check = stationary_pi(from_theta_p(0.3, p3()));
    CHECK((b.pi - check).cwiseAbs().maxCoeff() < 1e-14);

    // from_rates reparameterizes, but theta (delta - P) is invariant
    const RateMatrix rm = pim(0.1, pi);
    const SmallThetaModel c = SmallThetaModel::from_rates(rm);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double lhs = a.theta * ((i == j ? 1.0 : 0.0) - a.P(i, j));
            const double rhs = c.theta * ((i == j ? 1.0 : 0.0) - c.P(i, j));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
}
