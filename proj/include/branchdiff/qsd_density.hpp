#ifndef BRANCHDIFF_QSD_DENSITY_HPP
#define BRANCHDIFF_QSD_DENSITY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "quadrature.hpp"
#include "rates.hpp"
#include "specfun.hpp"

namespace branchdiff {

// zeta0(phi) = sum_i pi_i / (1 + phi_i).
inline double zeta0(const Eigen::VectorXd& phi, const SmallThetaModel& m) {
    double s = 0.0;
    for (int i = 0; i < m.d(); ++i)
        s += m.pi(i) / (1.0 + phi(i));
    return s;
}

namespace density_detail {
// log(1 + x)/x with the removable singularity at x = 0.
inline double log1p_over(double x) {
    if (std::fabs(x) < 1e-8)
        return 1.0 - 0.5 * x;
    return std::log1p(x) / x;
}
} // namespace density_detail

// zeta1(phi) = -sum_{i,j} pi_j P_ji (1+phi_i) ((1+phi_j)^{-1} - (1+phi_i)^{-1})^2
//              phi_i^{-1} log(1+phi_i); i = j terms vanish identically.
inline double zeta1(const Eigen::VectorXd& phi, const SmallThetaModel& m) {
    double s = 0.0;
    for (int i = 0; i < m.d(); ++i) {
        for (int j = 0; j < m.d(); ++j) {
            if (i == j)
                continue;
            const double di = 1.0 / (1.0 + phi(i));
            const double dj = 1.0 / (1.0 + phi(j));
            s -= m.pi(j) * m.P(j, i) * (1.0 + phi(i)) * (dj - di) * (dj - di) *
                 density_detail::log1p_over(phi(i));
        }
    }
    return s;
}

// Residual of the stationary Laplace-transform equation at zeta = zeta0 + theta zeta1:
// sum_i [ -phi_i (1+phi_i) + theta sum_j (P_ij - delta_ij) phi_j ] d zeta/d phi_i
//   - (1 - zeta),
// gradients by central differences with step h.
inline double pde_residual(const Eigen::VectorXd& phi, const SmallThetaModel& m,
                           double h = 1e-4) {
    for (int i = 0; i < m.d(); ++i)
        if (!(phi(i) > h))
            throw std::invalid_argument("pde_residual: step too large for phi");
    const auto zeta = [&m](const Eigen::VectorXd& p) {
        return zeta0(p, m) + m.theta * zeta1(p, m);
    };
    double res = -(1.0 - zeta(phi));
    for (int i = 0; i < m.d(); ++i) {
        Eigen::VectorXd up = phi, dn = phi;
        up(i) += h;
        dn(i) -= h;
        const double grad = (zeta(up) - zeta(dn)) / (2.0 * h);
        double coef = -phi(i) * (1.0 + phi(i));
        for (int j = 0; j < m.d(); ++j)
            coef += m.theta * (m.P(i, j) - (i == j ? 1.0 : 0.0)) * phi(j);
        res += coef * grad;
    }
    return res;
}

// a_ij(x_j) = x_j (1 - P_jj), the i-independent solution of the constraint
// sum_{i != j} P_ji x_j / a_ij(x_j) = 1.
inline double a_default(int j, double xj, const Eigen::MatrixXd& P) {
    if (!(xj > 0.0))
        throw std::domain_error("a_default: requires x_j > 0");
    const double off = 1.0 - P(j, j);
    if (!(off > 0.0))
        throw std::domain_error("a_default: P_jj = 1, constraint unsatisfiable");
    return xj * off;
}

// g_surface(x_i, x_j) = theta pi_j P_ji { x_j e^{-x_j} x_i^{a_ij(x_j) theta - 1} E2(x_i)
//                                        + 2 e^{-x_j} E1(x_i) } + (i <-> j).
inline double g_surface(int i, int j, double xi, double xj, const SmallThetaModel& m) {
    if (!(xi > 0.0) || !(xj > 0.0))
        throw std::domain_error("g_surface: requires positive coordinates");
    if (i == j)
        throw std::invalid_argument("g_surface: requires i != j");
    const auto half = [&m](int a, int b, double xa, double xb) {
        const double ex = a_default(b, xb, m.P) * m.theta - 1.0;
        return m.pi(b) * m.P(b, a) *
               (xb * std::exp(-xb) * std::pow(xa, ex) * exp_integral_e2(xa) +
                2.0 * std::exp(-xb) * exp_integral_e1(xa));
    };
    return m.theta * (half(i, j, xi, xj) + half(j, i, xj, xi));
}

// g_line(x_i) = -theta pi_i (1 - P_ii) { E1(x_i) + [gamma_em (1 - x_i) + log x_i] e^{-x_i} }.
inline double g_line(int i, double xi, const SmallThetaModel& m) {
    if (!(xi > 0.0))
        throw std::domain_error("g_line: requires x_i > 0");
    return -m.theta * m.pi(i) * (1.0 - m.P(i, i)) *
           (exp_integral_e1(xi) +
            (gamma_em * (1.0 - xi) + std::log(xi)) * std::exp(-xi));
}

// O(theta) density component at x: surface piece for two positive coordinates,
// line piece for one, zero for three or more (O(theta) support restriction).
inline double density_eval(const Eigen::VectorXd& x, const SmallThetaModel& m) {
    if (x.size() != m.d())
        throw std::invalid_argument("density_eval: dimension mismatch");
    int np = 0, i0 = -1, i1 = -1;
    for (int i = 0; i < m.d(); ++i) {
        if (x(i) < 0.0)
            throw std::domain_error("density_eval: negative coordinate");
        if (x(i) > 0.0) {
            ++np;
            if (i0 < 0)
                i0 = i;
            else if (i1 < 0)
                i1 = i;
        }
    }
    if (np == 0 || np > 2)
        return 0.0;
    if (np == 1)
        return g_line(i0, x(i0), m);
    return g_surface(i0, i1, x(i0), x(i1), m);
}

// g_alpha(x) = (2|alpha|)^k g_{-1/2, theta/(2|alpha|)}(2|alpha| x), one scale
// factor per positive coordinate (k = 1 line, k = 2 surface), which preserves
// the mass of each component.
inline double rescale_alpha(const Eigen::VectorXd& x, double target_alpha,
                            const SmallThetaModel& m) {
    if (!(target_alpha < 0.0))
        throw std::domain_error("rescale_alpha: requires alpha < 0");
    const double c = -2.0 * target_alpha;
    int np = 0;
    for (int i = 0; i < x.size(); ++i)
        if (x(i) > 0.0)
            ++np;
    SmallThetaModel scaled = m;
    scaled.theta = m.theta / c;
    return std::pow(c, np) * density_eval((c * x).eval(), scaled);
}

// (x1, x2) -> (x, u) with x = x1 + x2, u = x1/x.
inline std::pair<double, double> to_xu(double x1, double x2) {
    if (!(x1 > 0.0) || !(x2 > 0.0))
        throw std::domain_error("to_xu: requires positive coordinates");
    const double x = x1 + x2;
    return {x, x1 / x};
}

// g_surface in (x, u) coordinates: g_XU(x, u) = x g_surface(x u, x (1-u)).
inline double g_surface_xu(int i, int j, double x, double u, const SmallThetaModel& m) {
    if (!(u > 0.0) || !(u < 1.0))
        throw std::domain_error("g_surface_xu: requires u in (0,1)");
    return x * g_surface(i, j, x * u, x * (1.0 - u), m);
}

// ---- quadrature over the density (test oracles and CLI checks) ----

// Whether the singular exponent uses the default a-rule or the a -> 0
// replacement x_i^{-1} admissible for U-moment integrands.
enum class ARule { Default, Zero };

// Integral of g_line(i, .) times a weight over (0, inf).
template <class W>
inline double integrate_line(int i, const SmallThetaModel& m, const W& w,
                             double eps = 1e-11) {
    return integrate([&](double x) { return g_line(i, x, m) * w(x); }, 1e-12, 60.0,
                     eps, 1e-9)
        .value;
}

// Integral of g_surface(i, j, ., .) times a weight w(x_i, x_j) over (0, inf)^2.
// The x^{a theta - 1} singularity is handled by the substitution y = x^{a theta}
// on (0, eps_split]; note x_j/(a theta) = 1/((1 - P_jj) theta) exactly.
template <class W>
inline double integrate_surface(int i, int j, const SmallThetaModel& m, const W& w,
                                ARule rule = ARule::Default, double eps = 1e-10) {
    const double cut = 60.0;
    const double eps_split = 0.1;
    double total = 0.0;
    const auto ordered = [&](int a, int b, auto&& wab) {
        // singular part: int dx_b x_b e^{-x_b} int dx_a x_a^{s-1} E2(x_a) w
        const double off = 1.0 - m.P(b, b);
        const auto inner_sing = [&](double xb) -> double {
            if (rule == ARule::Zero) {
                return xb * integrate(
                                [&](double xa) {
                                    return exp_integral_e2(xa) / xa * wab(xa, xb);
                                },
                                1e-12, cut, eps * 0.1, 1e-9)
                                .value;
            }
            const double st = a_default(b, xb, m.P) * m.theta;
            // For small s t the map y = x^{s t} compresses all variation of the
            // integrand into a layer of relative width ~ s t below y_hi, thin
            // enough for every quadrature node to miss; integrating between
            // mapped breakpoints keeps each piece resolvable.
            const auto piece = [&](double y) {
                const double xa = std::pow(y, 1.0 / st);
                return exp_integral_e2(xa) * wab(xa, xb);
            };
            double inner = 0.0;
            double y_lo = 0.0;
            for (double x_k : {1e-12, 1e-8, 1e-4, 1e-2, eps_split}) {
                const double y_k = std::pow(x_k, st);
                inner += integrate(piece, y_lo, y_k, eps * 0.1, 1e-9).value;
                y_lo = y_k;
            }
            inner /= off * m.theta; // x_b / (s t) with the x_b prefactor folded in
            const double outer =
                xb * integrate(
                         [&](double xa) {
                             return std::pow(xa, st - 1.0) * exp_integral_e2(xa) *
                                    wab(xa, xb);
                         },
                         eps_split, cut, eps * 0.1, 1e-9)
                         .value;
            return inner + outer;
        };
        const double part_sing =
            integrate([&](double xb) { return std::exp(-xb) * inner_sing(xb); },
                      1e-12, cut, eps, 1e-8)
                .value;
        const double part_e1 =
            integrate(
                [&](double xb) {
                    return 2.0 * std::exp(-xb) *
                           integrate([&](double xa) {
                               return exp_integral_e1(xa) * wab(xa, xb);
                           }, 1e-12, cut, eps * 0.1, 1e-9)
                               .value;
                },
                1e-12, cut, eps, 1e-8)
                .value;
        total += m.theta * m.pi(b) * m.P(b, a) * (part_sing + part_e1);
    };
    ordered(i, j, [&](double xa, double xb) { return w(xa, xb); });
    ordered(j, i, [&](double xa, double xb) { return w(xb, xa); });
    return total;
}

// Total mass of the O(theta) density: all surface pieces plus all line pieces.
inline double total_mass(const SmallThetaModel& m) {
    double s = 0.0;
    for (int i = 0; i < m.d(); ++i)
        for (int j = i + 1; j < m.d(); ++j)
            s += integrate_surface(i, j, m, [](double, double) { return 1.0; });
    for (int i = 0; i < m.d(); ++i)
        s += integrate_line(i, m, [](double) { return 1.0; });
    return s;
}

} // namespace branchdiff

#endif
