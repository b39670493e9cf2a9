#ifndef BRANCHDIFF_RNG_HPP
#define BRANCHDIFF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace branchdiff {

namespace rng_detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace rng_detail

// Counter-based generator: output i of stream (seed, stream) is a fixed hash
// of (key, i), so substreams are independent of scheduling order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(rng_detail::mix64(seed ^ rng_detail::mix64(stream))), ctr_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1), never exactly 0.
    double next_open() {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return u;
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Poisson sampler: multiplicative inversion for small means, Hormann's PTRD
// transformed rejection otherwise.
inline long poisson(CounterRng& rng, double mean) {
    if (mean < 0.0)
        throw std::domain_error("poisson: requires mean >= 0");
    if (mean == 0.0)
        return 0;
    if (mean < 10.0) {
        const double l = std::exp(-mean);
        long k = 0;
        double prod = rng.next_open();
        while (prod > l) {
            prod *= rng.next_open();
            ++k;
        }
        return k;
    }
    // PTRS (Hormann's transformed rejection with squeeze)
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            kf * log_mu - mean - std::lgamma(kf + 1.0))
            return static_cast<long>(kf);
    }
}

namespace rng_detail {
// Binomial by inversion over the pmf recursion, for small n*p.
inline long binomial_inversion(CounterRng& rng, long n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    double f = std::pow(q, static_cast<double>(n));
    double u = rng.next_double();
    long k = 0;
    while (u > f) {
        u -= f;
        ++k;
        if (k > n)
            return n; // guards pow underflow pathologies
        f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    return k;
}
} // namespace rng_detail

// Binomial sampler: inversion for small n*p, Hormann's BTRD rejection otherwise
// (no normal approximation anywhere).
inline long binomial(CounterRng& rng, long n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0)
        throw std::domain_error("binomial: requires n >= 0 and p in [0,1]");
    if (n == 0 || p == 0.0)
        return 0;
    if (p == 1.0)
        return n;
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    long k;
    if (static_cast<double>(n) * pp < 30.0) {
        k = rng_detail::binomial_inversion(rng, n, pp);
    } else {
        const double r = pp / (1.0 - pp);
        const long m = static_cast<long>(std::floor((n + 1) * pp));
        const double nr = (n + 1) * r;
        const double npq = n * pp * (1.0 - pp);
        const double sq = std::sqrt(npq);
        const double b = 1.15 + 2.53 * sq;
        const double a = -0.0873 + 0.0248 * b + 0.01 * pp;
        const double c = n * pp + 0.5;
        const double alpha = (2.83 + 5.1 / b) * sq;
        const double vr = 0.92 - 4.2 / b;
        const double log_r = std::log(r);
        for (;;) {
            double v = rng.next_double();
            double u;
            if (v <= 0.86 * vr) {
                u = v / vr - 0.43;
                k = static_cast<long>(
                    std::floor((2.0 * a / (0.5 - std::fabs(u)) + b) * u + c));
                break;
            }
            if (v >= vr) {
                u = rng.next_double() - 0.5;
            } else {
                u = v / vr - 0.93;
                u = (u < 0 ? -0.5 : 0.5) - u;
                v = rng.next_double() * vr;
            }
            const double us = 0.5 - std::fabs(u);
            const long kk = static_cast<long>(std::floor((2.0 * a / us + b) * u + c));
            if (kk < 0 || kk > n)
                continue;
            v = v * alpha / (a / (us * us) + b);
            const long km = std::labs(kk - m);
            if (km <= 20) {
                // exact pmf ratio f(kk)/f(m) by recursion
                double f = 1.0;
                if (m < kk) {
                    for (long i = m + 1; i <= kk; ++i)
                        f *= nr / i - r;
                } else if (m > kk) {
                    for (long i = kk + 1; i <= m; ++i)
                        v *= nr / i - r;
                }
                if (v <= f) {
                    k = kk;
                    break;
                }
            } else {
                const double lhs = std::log(v);
                const double rhs = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0) -
                                   std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) +
                                   (kk - m) * log_r;
                if (lhs <= rhs) {
                    k = kk;
                    break;
                }
            }
        }
    }
    return flip ? n - k : k;
}

} // namespace branchdiff

#endif
