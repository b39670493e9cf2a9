#ifndef BRANCHDIFF_FELLER_HPP
#define BRANCHDIFF_FELLER_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "quadrature.hpp"
#include "specfun.hpp"

namespace branchdiff {

// mu(t; alpha) = 2 alpha e^{at}/(e^{at}-1), beta(t; alpha) = (e^{at}-1)/(2 alpha);
// (2/t, t/2) at alpha = 0.
inline std::pair<double, double> mu_beta(double alpha, double t) {
    if (!(t > 0.0))
        throw std::domain_error("mu_beta: requires t > 0");
    if (std::fabs(alpha) * t < 1e-8)
        return {2.0 / t, 0.5 * t};
    const double mu = -2.0 * alpha / std::expm1(-alpha * t);
    const double beta = std::expm1(alpha * t) / (2.0 * alpha);
    return {mu, beta};
}

inline double extinction_prob(double alpha, double t) {
    return std::exp(-mu_beta(alpha, t).first);
}

// psi(phi, t; alpha) = exp(-mu + mu/(1 + beta phi)); psi(phi, 0) = e^{-phi}.
inline double laplace_psi(double phi, double alpha, double t) {
    if (phi < 0.0)
        throw std::domain_error("laplace_psi: requires phi >= 0");
    if (t < 0.0)
        throw std::domain_error("laplace_psi: requires t >= 0");
    if (t == 0.0)
        return std::exp(-phi);
    const auto [mu, beta] = mu_beta(alpha, t);
    return std::exp(-mu + mu / (1.0 + beta * phi));
}

// Continuous part of the transition density: Poisson-Gamma mixture
// sum_{l>=1} e^{-mu} mu^l/l! x^{l-1} e^{-x/beta} / (beta^l (l-1)!).
inline double density_mixture(double x, double alpha, double t,
                              const SpecFunConfig& cfg = {}) {
    if (!(x > 0.0))
        throw std::domain_error("density_mixture: requires x > 0");
    const auto [mu, beta] = mu_beta(alpha, t);
    const double base = std::exp(-mu - x / beta);
    double term = base * mu / beta; // l = 1
    double sum = term;
    const int lmax = std::max(50, static_cast<int>(std::ceil(mu + 10.0 * std::sqrt(mu))) +
                                      static_cast<int>(std::ceil(x / beta)));
    for (int l = 1; l < lmax + cfg.max_terms; ++l) {
        term *= mu * x / (beta * static_cast<double>(l) * (l + 1));
        sum += term;
        if (l > lmax && term <= cfg.series_tol * sum)
            break;
    }
    return sum;
}

// Same density in Bessel form: e^{-mu - x/beta} sqrt(mu/(x beta)) I1(2 sqrt(x mu/beta)).
inline double density_bessel(double x, double alpha, double t,
                             const SpecFunConfig& cfg = {}) {
    if (!(x > 0.0))
        throw std::domain_error("density_bessel: requires x > 0");
    const auto [mu, beta] = mu_beta(alpha, t);
    return std::exp(-mu - x / beta) * std::sqrt(mu / (x * beta)) *
           bessel_i1(2.0 * std::sqrt(x * mu / beta), cfg);
}

// x beyond which the continuous transition mass is below eps. The integrand
// behaves like exp(-mu - x/beta + 2 sqrt(x mu / beta)), so the cut must absorb
// the Bessel growth term.
inline double density_tail_cut(double alpha, double t, double eps = 1e-13) {
    const auto [mu, beta] = mu_beta(alpha, t);
    const double s = std::sqrt(-std::log(eps)) + std::sqrt(mu);
    return beta * s * s;
}

// Density conditioned on non-extinction.
inline double conditioned_density(double x, double alpha, double t,
                                  const SpecFunConfig& cfg = {}) {
    return density_mixture(x, alpha, t, cfg) / (1.0 - extinction_prob(alpha, t));
}

// Subcritical quasi-stationary law: 2|alpha| e^{-2|alpha| x}.
inline double qsd_subcritical(double x, double alpha) {
    if (!(alpha < 0.0))
        throw std::domain_error("qsd_subcritical: requires alpha < 0");
    if (x < 0.0)
        throw std::domain_error("qsd_subcritical: requires x >= 0");
    const double a2 = -2.0 * alpha;
    return a2 * std::exp(-a2 * x);
}

// Critical Yaglom law of W = X/t: 2 e^{-2w}.
inline double yaglom_critical(double w) {
    if (w < 0.0)
        throw std::domain_error("yaglom_critical: requires w >= 0");
    return 2.0 * std::exp(-2.0 * w);
}

struct SupercriticalLaw {
    double atom;    // mass at z = 0 (0 when conditioned)
    double density; // continuous part at the requested z
};

// Stationary law of Z = X e^{-alpha t} as t -> inf for alpha > 0:
// atom e^{-2 alpha} plus sum_{l>=1} (2 alpha)^{2l}/(l!(l-1)!) z^{l-1} e^{-2 alpha (1+z)}.
inline SupercriticalLaw supercritical_stationary(double z, double alpha, bool conditioned,
                                                 const SpecFunConfig& cfg = {}) {
    if (!(alpha > 0.0))
        throw std::domain_error("supercritical_stationary: requires alpha > 0");
    if (z < 0.0)
        throw std::domain_error("supercritical_stationary: requires z >= 0");
    const double a2 = 2.0 * alpha;
    const double base = std::exp(-a2 * (1.0 + z));
    double term = base * a2 * a2; // l = 1
    double sum = term;
    for (int l = 1; l < cfg.max_terms; ++l) {
        term *= a2 * a2 * z / (static_cast<double>(l) * (l + 1));
        sum += term;
        if (term <= cfg.series_tol * sum && static_cast<double>(l) * (l + 1) > a2 * a2 * z)
            break;
    }
    if (conditioned)
        return {0.0, sum / (1.0 - std::exp(-a2))};
    return {std::exp(-a2), sum};
}

} // namespace branchdiff

#endif
