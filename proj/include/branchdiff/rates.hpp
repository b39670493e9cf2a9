#ifndef BRANCHDIFF_RATES_HPP
#define BRANCHDIFF_RATES_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace branchdiff {

// Scaled mutation generator: off-diagonals >= 0, zero row sums.
struct RateMatrix {
    int d = 0;
    Eigen::MatrixXd gamma;

    explicit RateMatrix(Eigen::MatrixXd g) : d(static_cast<int>(g.rows())), gamma(std::move(g)) {
        if (d < 1 || gamma.cols() != d)
            throw std::invalid_argument("RateMatrix: gamma must be square");
        for (int i = 0; i < d; ++i) {
            double row = 0.0;
            for (int j = 0; j < d; ++j) {
                if (i != j && gamma(i, j) < 0.0)
                    throw std::invalid_argument("RateMatrix: negative off-diagonal rate");
                row += gamma(i, j);
            }
            if (std::fabs(row) > 1e-12)
                throw std::invalid_argument("RateMatrix: row sums must vanish");
        }
    }
};

struct ThetaP {
    double theta = 0.0;
    Eigen::MatrixXd P;
};

struct SpectralData {
    Eigen::VectorXd eigenvalues;   // nu_0 = 0 first, then nonpositive
    Eigen::MatrixXd u;             // column l holds u^{(l)}
    Eigen::VectorXd pi;
};

inline RateMatrix from_theta_p(double theta, const Eigen::MatrixXd& P) {
    if (!(theta > 0.0))
        throw std::invalid_argument("from_theta_p: requires theta > 0");
    const int d = static_cast<int>(P.rows());
    if (P.cols() != d)
        throw std::invalid_argument("from_theta_p: P must be square");
    for (int i = 0; i < d; ++i) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) {
            if (P(i, j) < 0.0)
                throw std::invalid_argument("from_theta_p: P has a negative entry");
            row += P(i, j);
        }
        if (std::fabs(row - 1.0) > 1e-12)
            throw std::invalid_argument("from_theta_p: P rows must sum to 1");
    }
    return RateMatrix(0.5 * theta * (P - Eigen::MatrixXd::Identity(d, d)));
}

// Canonical theta: the smallest theta keeping all P entries nonnegative,
// theta = 2 max_i(-gamma_ii). For a PIM matrix this is 2 sum_i gamma_i,
// which makes P_ij = pi_j.
inline ThetaP to_theta_p(const RateMatrix& rm) {
    double theta = 0.0;
    for (int i = 0; i < rm.d; ++i)
        theta = std::max(theta, -2.0 * rm.gamma(i, i));
    if (theta <= 0.0)
        throw std::invalid_argument("to_theta_p: zero rate matrix has no canonical theta");
    return ThetaP{theta, Eigen::MatrixXd(Eigen::MatrixXd::Identity(rm.d, rm.d) +
                                         (2.0 / theta) * rm.gamma)};
}

namespace rates_detail {
inline void reach(const Eigen::MatrixXd& g, int start, bool transpose, std::vector<char>& seen) {
    const int d = static_cast<int>(g.rows());
    std::vector<int> stack{start};
    seen.assign(d, 0);
    seen[start] = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < d; ++j) {
            const double w = transpose ? g(j, i) : g(i, j);
            if (i != j && w > 0.0 && !seen[j]) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
}
} // namespace rates_detail

inline bool is_irreducible(const RateMatrix& rm) {
    if (rm.d == 1)
        return true;
    std::vector<char> seen;
    rates_detail::reach(rm.gamma, 0, false, seen);
    for (char s : seen)
        if (!s)
            return false;
    rates_detail::reach(rm.gamma, 0, true, seen);
    for (char s : seen)
        if (!s)
            return false;
    return true;
}

// pi gamma = 0, sum pi = 1, via the bordered dense system.
inline Eigen::VectorXd stationary_pi(const RateMatrix& rm) {
    if (!is_irreducible(rm))
        throw std::runtime_error("stationary_pi: rate matrix is reducible, pi not unique");
    const int d = rm.d;
    Eigen::MatrixXd A(d + 1, d);
    A.topRows(d) = rm.gamma.transpose();
    A.bottomRows(1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
    b(d) = 1.0;
    Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);
    for (int i = 0; i < d; ++i)
        if (!(pi(i) > 0.0))
            throw std::runtime_error("stationary_pi: non-positive component");
    return pi;
}

inline bool is_reversible(const RateMatrix& rm, const Eigen::VectorXd& pi, double tol = 1e-10) {
    for (int i = 0; i < rm.d; ++i)
        for (int j = i + 1; j < rm.d; ++j)
            if (std::fabs(pi(i) * rm.gamma(i, j) - pi(j) * rm.gamma(j, i)) > tol)
                return false;
    return true;
}

// Parent-independent rate matrix: gamma_ij = theta/2 (pi_j - delta_ij).
inline RateMatrix pim(double theta, const Eigen::VectorXd& pi) {
    if (!(theta > 0.0))
        throw std::invalid_argument("pim: requires theta > 0");
    const int d = static_cast<int>(pi.size());
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        if (!(pi(i) > 0.0))
            throw std::invalid_argument("pim: pi must be positive");
        s += pi(i);
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw std::invalid_argument("pim: pi must sum to 1");
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            g(i, j) = 0.5 * theta * (pi(j) - (i == j ? 1.0 : 0.0));
    return RateMatrix(std::move(g));
}

// Spectral decomposition of a reversible generator via the symmetrization
// D^{1/2} gamma D^{-1/2}, normalized so sum_i pi_i u_i^{(k)} u_i^{(l)} = delta_kl.
inline SpectralData spectral_decompose(const RateMatrix& rm) {
    Eigen::VectorXd pi = stationary_pi(rm);
    if (!is_reversible(rm, pi))
        throw std::runtime_error("spectral_decompose: rate matrix is not reversible");
    const int d = rm.d;
    Eigen::VectorXd sqrt_pi = pi.array().sqrt();
    Eigen::MatrixXd s(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            s(i, j) = sqrt_pi(i) * rm.gamma(i, j) / sqrt_pi(j);
    s = 0.5 * (s + s.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_decompose: eigensolver failed");

    // SelfAdjointEigenSolver sorts ascending; reorder so nu_0 = 0 comes first.
    SpectralData out;
    out.pi = pi;
    out.eigenvalues.resize(d);
    out.u.resize(d, d);
    for (int l = 0; l < d; ++l) {
        const int src = d - 1 - l;
        out.eigenvalues(l) = es.eigenvalues()(src);
        Eigen::VectorXd w = es.eigenvectors().col(src);
        Eigen::VectorXd u = w.array() / sqrt_pi.array();
        // fix sign: largest-|.| component positive
        int arg = 0;
        for (int i = 1; i < d; ++i)
            if (std::fabs(u(i)) > std::fabs(u(arg)))
                arg = i;
        if (u(arg) < 0.0)
            u = -u;
        out.u.col(l) = u;
    }
    out.eigenvalues(0) = 0.0; // principal eigenvalue is exactly 0
    return out;
}

// Bundled (theta, P, pi) parameterisation shared by the small-theta moment
// and density modules.
struct SmallThetaModel {
    double theta = 0.0;
    Eigen::MatrixXd P;
    Eigen::VectorXd pi;

    static SmallThetaModel from_p(double theta, const Eigen::MatrixXd& P) {
        RateMatrix rm = from_theta_p(theta, P);
        return SmallThetaModel{theta, P, stationary_pi(rm)};
    }

    static SmallThetaModel from_pim(double theta, const Eigen::VectorXd& pi) {
        const int d = static_cast<int>(pi.size());
        RateMatrix rm = pim(theta, pi);
        Eigen::MatrixXd P(d, d);
        for (int i = 0; i < d; ++i)
            P.row(i) = pi.transpose();
        return SmallThetaModel{theta, std::move(P), pi};
    }

    static SmallThetaModel from_rates(const RateMatrix& rm) {
        ThetaP tp = to_theta_p(rm);
        return SmallThetaModel{tp.theta, tp.P, stationary_pi(rm)};
    }

    int d() const { return static_cast<int>(pi.size()); }
};

} // namespace branchdiff

#endif
