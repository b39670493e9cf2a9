#ifndef BRANCHDIFF_SPECFUN_HPP
#define BRANCHDIFF_SPECFUN_HPP

#include <cmath>
#include <stdexcept>

namespace branchdiff {

// Euler-Mascheroni constant.
inline constexpr double gamma_em = 0.57721566490153286;

struct SpecFunConfig {
    double series_tol = 1e-14;
    int max_terms = 500;
};

// E1(x) = int_1^inf e^{-xt}/t dt, x > 0.
// Power series below 1, modified Lentz continued fraction above.
inline double exp_integral_e1(double x, const SpecFunConfig& cfg = {}) {
    if (!(x > 0.0))
        throw std::domain_error("exp_integral_e1: requires x > 0");
    if (x < 1.0) {
        // E1(x) = -gamma - log x - sum_{k>=1} (-x)^k/(k k!)
        double sum = 0.0;
        double pow_term = 1.0;
        for (int k = 1; k <= cfg.max_terms; ++k) {
            pow_term *= -x / k;
            const double add = -pow_term / k;
            sum += add;
            if (std::fabs(add) <= cfg.series_tol * (std::fabs(sum) + 1e-300))
                break;
        }
        return sum - gamma_em - std::log(x);
    }
    // E1(x) = e^{-x} * 1/(x+1 - 1/(x+3 - 4/(x+5 - 9/(...))))
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= cfg.max_terms; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < cfg.series_tol)
            break;
    }
    return h * std::exp(-x);
}

// E2(x) = int_1^inf e^{-xt}/t^2 dt, x >= 0.
inline double exp_integral_e2(double x, const SpecFunConfig& cfg = {}) {
    if (x < 0.0)
        throw std::domain_error("exp_integral_e2: requires x >= 0");
    if (x == 0.0)
        return 1.0;
    if (x < 1e-8)
        return 1.0 + x * (std::log(x) + gamma_em - 1.0);
    return std::exp(-x) - x * exp_integral_e1(x, cfg);
}

// I1(z) = sum_{k>=0} (z/2)^{2k+1} / (k! (k+1)!), z >= 0.
inline double bessel_i1(double z, const SpecFunConfig& cfg = {}) {
    if (z < 0.0)
        throw std::domain_error("bessel_i1: requires z >= 0");
    if (z == 0.0)
        return 0.0;
    const double h = 0.5 * z;
    double term = h;
    double sum = term;
    for (int k = 1; k <= cfg.max_terms; ++k) {
        term *= h * h / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term <= cfg.series_tol * sum && k > 2)
            break;
    }
    return sum;
}

// H_n = sum_{k=1}^n 1/k, H_0 = 0.
inline double harmonic(long n) {
    if (n < 0)
        throw std::domain_error("harmonic: requires n >= 0");
    double h = 0.0;
    for (long k = n; k >= 1; --k)
        h += 1.0 / static_cast<double>(k);
    return h;
}

} // namespace branchdiff

#endif
