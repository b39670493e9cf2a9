#ifndef BRANCHDIFF_BGW_HPP
#define BRANCHDIFF_BGW_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"
#include "rng.hpp"

namespace branchdiff {

// Discrete multi-type BGW model with Poisson offspring (pluggable pmf) and
// per-generation mutation matrix r (d = 1 or 2 supported by the eigenvector oracle).
struct DiscreteModel {
    double lambda = 0.975;
    double sigma2 = 0.975; // Poisson: sigma2 = lambda
    Eigen::MatrixXd r;     // row-stochastic mutation matrix
    int m_max = 160;

    DiscreteModel(double lam, Eigen::MatrixXd mut, int mmax)
        : lambda(lam), sigma2(lam), r(std::move(mut)), m_max(mmax) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("DiscreteModel: requires lambda > 0");
        if (m_max < 2)
            throw std::invalid_argument("DiscreteModel: requires m_max >= 2");
        const int d = static_cast<int>(r.rows());
        if (r.cols() != d || d < 1 || d > 2)
            throw std::invalid_argument("DiscreteModel: r must be 1x1 or 2x2");
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) {
                if (r(i, j) < 0.0 || r(i, j) > 1.0)
                    throw std::invalid_argument("DiscreteModel: r entries must lie in [0,1]");
                row += r(i, j);
            }
            if (std::fabs(row - 1.0) > 1e-12)
                throw std::invalid_argument("DiscreteModel: r rows must sum to 1");
        }
    }

    int d() const { return static_cast<int>(r.rows()); }

    static DiscreteModel one_type(double lam, int mmax) {
        return DiscreteModel(lam, Eigen::MatrixXd::Ones(1, 1), mmax);
    }
};

// Poisson offspring pmf p(m, n) = e^{-lambda m} (lambda m)^n / n!.
inline double offspring_pmf(int m, int n, double lambda) {
    if (m < 0 || n < 0)
        throw std::domain_error("offspring_pmf: requires m, n >= 0");
    if (m == 0)
        return n == 0 ? 1.0 : 0.0;
    const double lm = lambda * m;
    return std::exp(n * std::log(lm) - lm - std::lgamma(n + 1.0));
}

// chi(i) = (i/m)(1 - r12) + (1 - i/m) r21.
inline double chi(int i, int m, const DiscreteModel& model) {
    if (model.d() != 2)
        throw std::invalid_argument("chi: requires a 2-type model");
    if (m <= 0 || i < 0 || i > m)
        throw std::domain_error("chi: requires 0 <= i <= m, m > 0");
    const double f = static_cast<double>(i) / m;
    return f * (1.0 - model.r(0, 1)) + (1.0 - f) * model.r(1, 0);
}

// Full 2-type transition probability p(m,n) C(n,j) chi^j (1-chi)^{n-j}.
inline double transition(int m, int i, int n, int j, const DiscreteModel& model) {
    if (j < 0 || j > n)
        return 0.0;
    const double c = chi(i, m, model);
    const double logbin = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                          std::lgamma(n - j + 1.0);
    double logp = logbin;
    if (j > 0)
        logp += j * std::log(c);
    else if (c == 1.0)
        return 0.0;
    if (n - j > 0)
        logp += (n - j) * std::log(1.0 - c);
    else if (c == 0.0 && n > 0)
        return 0.0;
    return offspring_pmf(m, n, model.lambda) * std::exp(logp);
}

struct QsdVector {
    // d = 1: G(m, 0), m = 1..m_max stored at row index m.
    // d = 2: G(k1, k2) over k1 + k2 in [1, m_max].
    Eigen::MatrixXd G;
    double Pi = 0.0; // one-step extinction mass
    long iterations = 0;
    double last_delta = 0.0;
    bool converged = false;
    double boundary_mass = 0.0; // mass with total population == m_max
};

namespace bgw_detail {

// Dense Poisson kernel K(i, k) = P(Poisson(lambda i) = k), i, k = 0..m_max.
inline Eigen::MatrixXd poisson_kernel(double lambda, int m_max) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m_max + 1, m_max + 1);
    K(0, 0) = 1.0;
    for (int i = 1; i <= m_max; ++i)
        for (int k = 0; k <= m_max; ++k)
            K(i, k) = offspring_pmf(i, k, lambda);
    return K;
}

// Binomial thinning kernel M(k, t) = P(Bin(k, p) = t), t = 0..t_max.
inline Eigen::MatrixXd binom_kernel(double p, int m_max, int t_max) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m_max + 1, t_max + 1);
    for (int k = 0; k <= m_max; ++k) {
        const double q = 1.0 - p;
        double term = std::pow(q, k); // t = 0
        for (int t = 0; t <= std::min(k, t_max); ++t) {
            M(k, t) = term;
            term *= p / q * static_cast<double>(k - t) / static_cast<double>(t + 1);
        }
    }
    return M;
}

} // namespace bgw_detail

// Principal left eigenvector of the truncated transition matrix by power
// iteration with L1 renormalization.
//
// For d = 2 the one-step operator is applied in exact factored form via
// Poisson thinning: offspring counts of the two type blocks are independent
// Poissons (two dense kernel products), followed by truncation and a small
// binomial mutation shift-convolution. This reproduces the row-stored
// transition operator exactly at a fraction of the cost.
inline QsdVector qsd_eigenvector(const DiscreteModel& model, double tol = 1e-12,
                                 long max_iter = 200000) {
    const int mm = model.m_max;
    QsdVector out;

    if (model.d() == 1) {
        Eigen::MatrixXd K(mm, mm); // K(m-1, n-1), m, n = 1..m_max
        for (int m = 1; m <= mm; ++m)
            for (int n = 1; n <= mm; ++n)
                K(m - 1, n - 1) = offspring_pmf(m, n, model.lambda);
        Eigen::VectorXd v = Eigen::VectorXd::Constant(mm, 1.0 / mm);
        double eig = 0.0, delta = 1.0;
        long it = 0;
        for (; it < max_iter; ++it) {
            Eigen::VectorXd w = K.transpose() * v;
            eig = w.sum();
            w /= eig;
            delta = (w - v).cwiseAbs().sum();
            v = std::move(w);
            if (delta < tol)
                break;
        }
        out.G = Eigen::MatrixXd::Zero(mm + 1, 1);
        for (int m = 1; m <= mm; ++m)
            out.G(m, 0) = v(m - 1);
        out.Pi = 1.0 - eig;
        out.iterations = it + 1;
        out.last_delta = delta;
        out.converged = delta < tol;
        out.boundary_mass = v(mm - 1);
        return out;
    }

    const double r12 = model.r(0, 1);
    const double r21 = model.r(1, 0);
    const Eigen::MatrixXd K = bgw_detail::poisson_kernel(model.lambda, mm);
    // mutation moves per generation are Poisson-thinned: bound their support
    int t_max = 1;
    {
        const double mu = mm * std::max(r12, r21);
        double tail = std::exp(-mu);
        double cum = tail;
        while (1.0 - cum > 1e-15 && t_max < mm) {
            tail *= mu / t_max;
            cum += tail;
            ++t_max;
        }
    }
    const Eigen::MatrixXd M1 = bgw_detail::binom_kernel(r12, mm, t_max);
    const Eigen::MatrixXd M2 = bgw_detail::binom_kernel(r21, mm, t_max);

    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(mm + 1, mm + 1);
    for (int k1 = 0; k1 <= mm; ++k1)
        for (int k2 = 0; k2 <= mm - k1; ++k2)
            if (k1 + k2 >= 1)
                V(k1, k2) = 1.0;
    V /= V.sum();

    Eigen::MatrixXd W(mm + 1, mm + 1), out_mat(mm + 1, mm + 1);
    double eig = 0.0, delta = 1.0;
    long it = 0;
    for (; it < max_iter; ++it) {
        W.noalias() = K.transpose() * V * K;
        for (int k1 = 0; k1 <= mm; ++k1)
            for (int k2 = mm - k1 + 1; k2 <= mm; ++k2)
                W(k1, k2) = 0.0;
        W(0, 0) = 0.0;
        out_mat.setZero();
        for (int dmove = 0; dmove <= t_max; ++dmove) {
            for (int umove = 0; umove <= t_max; ++umove) {
                const int s = dmove - umove; // net flow type 1 -> type 2
                for (int k1 = std::max(0, dmove); k1 <= mm; ++k1) {
                    const int n1 = k1 - s;
                    if (n1 < 0 || n1 > mm)
                        continue;
                    const double w1 = M1(k1, dmove);
                    if (w1 == 0.0)
                        continue;
                    for (int k2 = std::max(0, umove); k2 <= mm - k1; ++k2) {
                        const int n2 = k2 + s;
                        if (n2 < 0 || n2 > mm)
                            continue;
                        out_mat(n1, n2) += W(k1, k2) * w1 * M2(k2, umove);
                    }
                }
            }
        }
        eig = out_mat.sum();
        out_mat /= eig;
        delta = (out_mat - V).cwiseAbs().sum();
        std::swap(V, out_mat);
        if (delta < tol)
            break;
    }
    out.G = V;
    out.Pi = 1.0 - eig;
    out.iterations = it + 1;
    out.last_delta = delta;
    out.converged = delta < tol;
    for (int k1 = 0; k1 <= mm; ++k1)
        out.boundary_mass += V(k1, mm - k1);
    return out;
}

struct ContinuumSample {
    double x = 0.0;
    double u = 0.0;      // type-1 fraction (d = 2 only)
    double value = 0.0;  // rescaled density estimate
    int m = 0;
    int i = 0;
};

struct ContinuumGrid {
    double dx = 0.0; // x = dx * m
    std::vector<ContinuumSample> surface;  // g_XU(x, u), d = 2
    std::vector<ContinuumSample> marginal; // g_X(x)
};

// Continuum rescaling: X = (log lambda/(alpha sigma2)) Y;
// g_XU(x, u) ~ (m/dx) G(m, i), g_X(x) ~ (1/dx) sum_i G(m, i).
inline ContinuumGrid to_continuum(const DiscreteModel& model, const QsdVector& qsd,
                                  double alpha) {
    ContinuumGrid grid;
    grid.dx = std::log(model.lambda) / (alpha * model.sigma2);
    if (!(grid.dx > 0.0))
        throw std::runtime_error("to_continuum: scaling prefactor must be positive");
    const int mm = model.m_max;
    if (model.d() == 1) {
        for (int m = 1; m <= mm; ++m)
            grid.marginal.push_back({m * grid.dx, 0.0, qsd.G(m, 0) / grid.dx, m, 0});
        return grid;
    }
    std::vector<double> row_sum(mm + 1, 0.0);
    for (int k1 = 0; k1 <= mm; ++k1) {
        for (int k2 = 0; k2 <= mm - k1; ++k2) {
            const int m = k1 + k2;
            if (m < 1)
                continue;
            row_sum[m] += qsd.G(k1, k2);
            grid.surface.push_back({m * grid.dx, static_cast<double>(k1) / m,
                                    m * qsd.G(k1, k2) / grid.dx, m, k1});
        }
    }
    for (int m = 1; m <= mm; ++m)
        grid.marginal.push_back({m * grid.dx, 0.0, row_sum[m] / grid.dx, m, 0});
    return grid;
}

struct Replicate {
    bool survived = false;
    bool capped = false;   // hit the population cap (treated as survival)
    std::uint64_t y = 0;   // total population at stop time
    std::uint64_t y1 = 0;  // type-1 population at stop time
    int generations = 0;
};

struct SimulateOptions {
    long tau_max = 200;
    std::uint64_t pop_cap = 0; // 0 = no cap; reaching it stops the replicate
};

// One replicate of the (1- or 2-type) BGW chain from (y1, y2). Offspring of
// each type block are Poisson; mutation is applied by binomial thinning.
inline Replicate simulate_one(const DiscreteModel& model, std::uint64_t y1,
                              std::uint64_t y2, const SimulateOptions& opt,
                              CounterRng& rng) {
    Replicate rep;
    const bool two = model.d() == 2;
    for (long tau = 0; tau < opt.tau_max; ++tau) {
        const std::uint64_t y = y1 + y2;
        if (y == 0) {
            rep.generations = static_cast<int>(tau);
            return rep;
        }
        if (opt.pop_cap > 0 && y >= opt.pop_cap) {
            rep.survived = true;
            rep.capped = true;
            rep.y = y;
            rep.y1 = y1;
            rep.generations = static_cast<int>(tau);
            return rep;
        }
        const std::uint64_t k1 =
            y1 > 0 ? static_cast<std::uint64_t>(poisson(rng, model.lambda * static_cast<double>(y1))) : 0;
        if (two) {
            const std::uint64_t k2 =
                y2 > 0 ? static_cast<std::uint64_t>(poisson(rng, model.lambda * static_cast<double>(y2))) : 0;
            const std::uint64_t moved12 =
                k1 > 0 ? static_cast<std::uint64_t>(binomial(rng, static_cast<long>(k1), model.r(0, 1))) : 0;
            const std::uint64_t moved21 =
                k2 > 0 ? static_cast<std::uint64_t>(binomial(rng, static_cast<long>(k2), model.r(1, 0))) : 0;
            y1 = k1 - moved12 + moved21;
            y2 = k2 - moved21 + moved12;
        } else {
            y1 = k1;
            y2 = 0;
        }
    }
    rep.survived = (y1 + y2) > 0;
    rep.y = y1 + y2;
    rep.y1 = y1;
    rep.generations = static_cast<int>(opt.tau_max);
    return rep;
}

// n_reps independent replicates; replicate k uses stream (seed, k), so results
// are reproducible and independent of scheduling.
inline std::vector<Replicate> simulate(const DiscreteModel& model, std::uint64_t y1_0,
                                       std::uint64_t y2_0, long n_reps,
                                       std::uint64_t seed, const SimulateOptions& opt) {
    std::vector<Replicate> reps(static_cast<std::size_t>(n_reps));
    parallel_for(static_cast<std::size_t>(n_reps), [&](std::size_t k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k));
        reps[k] = simulate_one(model, y1_0, y2_0, opt, rng);
    });
    return reps;
}

// Kolmogorov-Smirnov distance of samples against a cdf.
template <class Cdf>
inline double ks_distance(std::vector<double> samples, const Cdf& cdf) {
    if (samples.empty())
        throw std::invalid_argument("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        ks = std::max(ks, std::fabs((i + 1) / n - f));
        ks = std::max(ks, std::fabs(i / n - f));
    }
    return ks;
}

} // namespace branchdiff

#endif
