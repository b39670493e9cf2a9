#ifndef BRANCHDIFF_QSD_MOMENTS_HPP
#define BRANCHDIFF_QSD_MOMENTS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rates.hpp"
#include "specfun.hpp"

namespace branchdiff {

struct MomentReport {
    Eigen::VectorXd mu;   // first moments
    Eigen::MatrixXd mu2;  // second moments, symmetric
    std::string method;
    double alpha = -0.5;
};

inline double factorial(int n) {
    if (n < 0)
        throw std::domain_error("factorial: requires n >= 0");
    double f = 1.0;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

// mu_i = pi_i / (2|alpha|), alpha < 0.
inline Eigen::VectorXd mean_vector(double alpha, const RateMatrix& rates) {
    if (!(alpha < 0.0))
        throw std::domain_error("mean_vector: requires alpha < 0");
    return stationary_pi(rates) / (-2.0 * alpha);
}

// Unique symmetric solution of
//   delta_rs mu_r - |alpha| mu_rs + sum_i (gamma_ir mu_is + gamma_is mu_ir) = 0.
inline Eigen::MatrixXd second_moments_linear_solve(double alpha, const RateMatrix& rates) {
    if (!(alpha < 0.0))
        throw std::domain_error("second_moments_linear_solve: requires alpha < 0");
    const int d = rates.d;
    const double abs_a = -alpha;
    const Eigen::VectorXd mu = mean_vector(alpha, rates);

    const auto idx = [d](int r, int s) {
        if (r > s)
            std::swap(r, s);
        return r * d - r * (r - 1) / 2 + (s - r);
    };
    const int n = d * (d + 1) / 2;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < d; ++r) {
        for (int s = r; s < d; ++s) {
            const int row = idx(r, s);
            A(row, idx(r, s)) -= abs_a;
            for (int i = 0; i < d; ++i) {
                A(row, idx(i, s)) += rates.gamma(i, r);
                A(row, idx(i, r)) += rates.gamma(i, s);
            }
            if (r == s)
                b(row) = -mu(r);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
        throw std::runtime_error("second_moments_linear_solve: singular system");
    const Eigen::VectorXd x = lu.solve(b);
    Eigen::MatrixXd m2(d, d);
    for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s)
            m2(r, s) = x(idx(r, s));
    return m2;
}

// mu_ij = pi_i pi_j/(2 alpha^2) (1 + sum_{l>=1} |alpha|/(|alpha| - 2 nu_l) u_i u_j).
inline Eigen::MatrixXd second_moments_spectral(double alpha, const RateMatrix& rates) {
    if (!(alpha < 0.0))
        throw std::domain_error("second_moments_spectral: requires alpha < 0");
    const SpectralData sd = spectral_decompose(rates);
    const int d = rates.d;
    const double abs_a = -alpha;
    Eigen::MatrixXd m2(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double s = 1.0;
            for (int l = 1; l < d; ++l)
                s += abs_a / (abs_a - 2.0 * sd.eigenvalues(l)) * sd.u(i, l) * sd.u(j, l);
            m2(i, j) = sd.pi(i) * sd.pi(j) / (2.0 * alpha * alpha) * s;
        }
    }
    return m2;
}

// mu_ij = pi_i (|alpha| delta_ij + theta pi_j) / (2 alpha^2 (|alpha| + theta)).
inline Eigen::MatrixXd second_moments_pim(double alpha, double theta,
                                          const Eigen::VectorXd& pi) {
    if (!(alpha < 0.0))
        throw std::domain_error("second_moments_pim: requires alpha < 0");
    const int d = static_cast<int>(pi.size());
    const double abs_a = -alpha;
    Eigen::MatrixXd m2(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m2(i, j) = pi(i) * (abs_a * (i == j ? 1.0 : 0.0) + theta * pi(j)) /
                       (2.0 * alpha * alpha * (abs_a + theta));
    return m2;
}

// Second moments truncated at O(theta), reference scale alpha = -1/2:
// mu_kl = 2 pi_k delta_kl + 2 theta (pi_k P_kl + pi_l P_lk - 2 pi_k delta_kl).
inline Eigen::MatrixXd second_moments_order_theta(const SmallThetaModel& m) {
    const int d = m.d();
    Eigen::MatrixXd m2(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            const double diag = (k == l) ? 2.0 * m.pi(k) : 0.0;
            m2(k, l) = diag + 2.0 * m.theta *
                                  (m.pi(k) * m.P(k, l) + m.pi(l) * m.P(l, k) - diag);
        }
    return m2;
}

// O(theta) X-moments at the reference scale alpha = -1/2.
// E[X_r^n] = pi_r n! - theta pi_r (1 - P_rr) (n^2 - n - 1 + n H_n) (n-1)!.
inline double moment_x_power(int r, int n, const SmallThetaModel& m) {
    if (n < 1)
        throw std::domain_error("moment_x_power: requires n >= 1");
    const double pr = m.pi(r);
    const double off = 1.0 - m.P(r, r);
    return pr * factorial(n) -
           m.theta * pr * off * (n * n - n - 1 + n * harmonic(n)) * factorial(n - 1);
}

// E[X_r^{n_r} X_s^{n_s}] = theta pi_r P_rs n_r! (n_s-1)!/(n_s+1) (n_r + 2 n_s + 1) + (r<->s).
inline double moment_x_cross(int r, int s, int nr, int ns, const SmallThetaModel& m) {
    if (nr < 1 || ns < 1)
        throw std::domain_error("moment_x_cross: requires n_r, n_s >= 1");
    if (r == s)
        throw std::domain_error("moment_x_cross: requires r != s");
    const auto half = [&m](int a, int b, int na, int nb) {
        return m.theta * m.pi(a) * m.P(a, b) * factorial(na) * factorial(nb - 1) /
               (nb + 1.0) * (na + 2.0 * nb + 1.0);
    };
    return half(r, s, nr, ns) + half(s, r, ns, nr);
}

// E[U_r^n] = pi_r (1 - theta (1 - P_rr) H_{n-1}).
inline double moment_u(int r, int n, const SmallThetaModel& m) {
    if (n < 1)
        throw std::domain_error("moment_u: requires n >= 1");
    return m.pi(r) * (1.0 - m.theta * (1.0 - m.P(r, r)) * harmonic(n - 1));
}

// E[U_r^{n_r} U_s^{n_s}] = theta pi_s P_sr (n_r-1)! n_s!/(n_r+n_s)! + (r<->s).
inline double moment_u_cross(int r, int s, int nr, int ns, const SmallThetaModel& m) {
    if (nr < 1 || ns < 1)
        throw std::domain_error("moment_u_cross: requires n_r, n_s >= 1");
    if (r == s)
        throw std::domain_error("moment_u_cross: requires r != s");
    return m.theta * m.pi(s) * m.P(s, r) * factorial(nr - 1) * factorial(ns) /
               factorial(nr + ns) +
           m.theta * m.pi(r) * m.P(r, s) * factorial(ns - 1) * factorial(nr) /
               factorial(nr + ns);
}

struct SamplingResult {
    double value = 0.0;
    bool clamped = false; // O(theta) formula went negative and was clamped at 0
};

// Sampling distribution over type counts n = (n_1, ..., n_d):
//   p(n e_r)             = pi_r (1 - theta (1 - P_rr) H_{n-1})
//   p(n_r e_r + n_s e_s) = theta (pi_r P_rs / n_s + pi_s P_sr / n_r)
//   0 at O(theta) for more than two nonzero entries.
inline SamplingResult sampling_distribution(const std::vector<int>& counts,
                                            const SmallThetaModel& m) {
    if (static_cast<int>(counts.size()) != m.d())
        throw std::invalid_argument("sampling_distribution: counts size mismatch");
    int nz = 0, total = 0;
    int r = -1, s = -1;
    for (int i = 0; i < m.d(); ++i) {
        if (counts[i] < 0)
            throw std::invalid_argument("sampling_distribution: negative count");
        if (counts[i] > 0) {
            ++nz;
            if (r < 0)
                r = i;
            else if (s < 0)
                s = i;
        }
        total += counts[i];
    }
    if (total == 0)
        throw std::invalid_argument("sampling_distribution: empty sample");
    if (nz > 2)
        return {0.0, false};
    if (nz == 1) {
        const double v =
            m.pi(r) * (1.0 - m.theta * (1.0 - m.P(r, r)) * harmonic(total - 1));
        if (v < 0.0)
            return {0.0, true};
        return {v, false};
    }
    const double v = m.theta * (m.pi(r) * m.P(r, s) / counts[s] +
                                m.pi(s) * m.P(s, r) / counts[r]);
    return {v, false};
}

// Scale a reference report (alpha = -1/2) to a target alpha < 0.
// First moments pick up (2|alpha|)^{-1}, second moments (2|alpha|)^{-2};
// for small-theta methods the reference must be evaluated at theta/(2|alpha|).
inline MomentReport rescale_moments(const MomentReport& ref, double target_alpha) {
    if (std::fabs(ref.alpha + 0.5) > 1e-12)
        throw std::invalid_argument("rescale_moments: reference must be at alpha = -1/2");
    if (!(target_alpha < 0.0))
        throw std::domain_error("rescale_moments: requires target alpha < 0");
    const double c = -2.0 * target_alpha;
    MomentReport out = ref;
    out.alpha = target_alpha;
    out.mu /= c;
    out.mu2 /= c * c;
    return out;
}

} // namespace branchdiff

#endif
