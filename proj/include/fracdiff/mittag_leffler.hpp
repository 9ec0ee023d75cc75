#pragma once

#include "gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fracdiff {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLParams {
    double alpha = 1.0; // in (0, 1]
    double beta = 1.0;  // > 0

    void validate() const {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::domain_error("MLParams: alpha must be in (0, 1]");
        if (!(beta > 0.0))
            throw std::domain_error("MLParams: beta must be positive");
    }
};

/// Exact integral of the K-kernel t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha)
/// over a time segment [t_lo, t_hi].
struct KernelWeight {
    double lambda = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double value = 0.0;
};

namespace ml_detail {

// Branch switchover defaults. Taylor handles z >= -taylor_cut; the Poincare
// asymptotic series takes over below asym_cut when its truncation error
// allows; the contour integral covers the band in between and serves as
// fallback everywhere on the negative axis.
inline constexpr double taylor_cut = 5.0;
inline constexpr double asym_cut = -15.0;
inline constexpr double positive_cap = 50.0;

// Cancellation in the alternating Taylor series grows like exp(|z|^{1/alpha});
// cap the lost digits at ~1.7 (|z|^{1/alpha} <= 4).
inline double taylor_cut_for(double alpha) {
    return std::min(taylor_cut, std::pow(4.0, alpha));
}

// Kahan-compensated Taylor series sum_{k>=0} z^k / Gamma(alpha k + beta).
// Terms advance through log-gamma ratios so neither z^k nor Gamma overflows.
inline double series(double alpha, double beta, double z) {
    double sum = inv_gamma(beta);
    double comp = 0.0;
    double term = sum;
    int small_streak = 0;
    for (int k = 0; k < 2000; ++k) {
        const double a = alpha * k + beta;
        term *= z * std::exp(log_gamma(a) - log_gamma(a + alpha));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            if (++small_streak >= 3) break;
        } else {
            small_streak = 0;
        }
    }
    return sum;
}

// Poincare expansion E ~ -sum_{k>=1} z^{-k}/Gamma(beta - alpha k), z << 0.
// Divergent; truncated at the smallest term. Returns false when the
// achievable truncation error is too large for the caller's target.
inline bool asymptotic(double alpha, double beta, double z, double& out) {
    // Truncation control uses the sine-free envelope
    //   |z|^{-k} Gamma(1 + alpha k - beta) / pi >= |term_k|,
    // since 1/Gamma(beta - alpha k) oscillates through near-zeros that say
    // nothing about the size of the tail.
    const double logz = std::log(std::abs(z));
    const auto envelope = [&](int k) {
        const double g = 1.0 + alpha * k - beta;
        const double lg = (g > 0.0) ? log_gamma(g) : 0.0;
        return std::exp(lg - k * logz) / M_PI;
    };
    double sum = 0.0;
    double p = 1.0;
    double min_env = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 200; ++k) {
        p /= z;
        const double env = envelope(k);
        if (env > min_env) break; // divergence onset
        sum += -p * inv_gamma(beta - alpha * k);
        min_env = env;
        if (env <= 1e-17 * std::abs(sum)) break;
    }
    out = sum;
    return min_env <= 1e-13 * std::max(std::abs(sum), 1e-300);
}

// Contour-integral representation for 0 < alpha < 1, z < 0, 0 < beta <= 1:
//   E_{alpha,beta}(z) = int_0^inf K(r) dr,
//   K(r) = r^{(1-beta)/alpha} exp(-r^{1/alpha}) / (pi alpha)
//          * [r sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
//          / (r^2 - 2 r z cos(pi alpha) + z^2).
// Integrated by tanh-sinh quadrature, which absorbs the algebraic endpoint
// behavior of r^{(1-beta)/alpha} and exp(-r^{1/alpha}) at r = 0.
inline double integral_band(double alpha, double beta, double z) {
    const double s1 = std::sin(M_PI * (1.0 - beta));
    const double s2 = std::sin(M_PI * (1.0 - beta + alpha));
    const double c = std::cos(M_PI * alpha);
    const double mu = (1.0 - beta) / alpha;
    const auto kern = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double den = (r - z * c) * (r - z * c) + z * z * (1.0 - c * c);
        return std::pow(r, mu) * std::exp(-std::pow(r, 1.0 / alpha)) *
               (r * s1 - z * s2) / (M_PI * alpha * den);
    };
    const double r_max = std::pow(45.0, alpha); // exp(-45) below double eps
    // tanh-sinh nodes on (0, r_max): r = r_max/2 (1 + tanh(pi/2 sinh t))
    const double half = 0.5 * r_max;
    const auto eval = [&](double t, double& r, double& w) {
        const double u = 0.5 * M_PI * std::sinh(t);
        const double ch = std::cosh(u);
        r = half * (1.0 + std::tanh(u));
        w = half * 0.5 * M_PI * std::cosh(t) / (ch * ch);
    };
    const double t_max = 3.8;
    double h = 0.5;
    double r, w;
    eval(0.0, r, w);
    double sum = w * kern(r);
    for (double t = h; t <= t_max; t += h) {
        eval(t, r, w);
        sum += w * kern(r);
        eval(-t, r, w);
        sum += w * kern(r);
    }
    double prev = sum * h;
    for (int lvl = 0; lvl < 10; ++lvl) {
        h *= 0.5;
        for (double t = h; t <= t_max; t += 2.0 * h) {
            eval(t, r, w);
            sum += w * kern(r);
            eval(-t, r, w);
            sum += w * kern(r);
        }
        const double cur = sum * h;
        if (lvl >= 2 &&
            std::abs(cur - prev) <= 5e-15 * std::max(std::abs(cur), 1e-300))
            return cur;
        prev = cur;
    }
    return prev;
}

// Reduce beta into (0, 1] and walk back up with
// E_{alpha,b+alpha}(z) = (E_{alpha,b}(z) - 1/Gamma(b)) / z.
inline double integral_negative(double alpha, double beta, double z) {
    int steps = 0;
    double b = beta;
    while (b > 1.0) {
        b -= alpha;
        ++steps;
    }
    double e = integral_band(alpha, b, z);
    for (int i = 0; i < steps; ++i) {
        e = (e - inv_gamma(b)) / z;
        b += alpha;
    }
    return e;
}

} // namespace ml_detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) on the real line.
/// Relative accuracy ~1e-12 for z in [-1e6, 10]; positive arguments are
/// capped (default 50) to avoid overflow.
inline double ml(const MLParams& p, double z) {
    p.validate();
    if (!std::isfinite(z)) throw std::domain_error("ml: z must be finite");
    if (z > ml_detail::positive_cap)
        throw std::overflow_error("ml: argument exceeds the positive cap");

    const double alpha = p.alpha;
    const double beta = p.beta;

    if (alpha == 1.0) {
        if (beta == 1.0) return std::exp(z);
        if (beta == 2.0) return (z == 0.0) ? 1.0 : std::expm1(z) / z;
        if (z >= -10.0) return ml_detail::series(1.0, beta, z);
        double a = 0.0;
        ml_detail::asymptotic(1.0, beta, z, a);
        return a;
    }

    if (z >= -ml_detail::taylor_cut_for(alpha)) return ml_detail::series(alpha, beta, z);
    if (z <= ml_detail::asym_cut) {
        double a = 0.0;
        if (ml_detail::asymptotic(alpha, beta, z, a)) return a;
    }
    return ml_detail::integral_negative(alpha, beta, z);
}

inline double ml(double alpha, double beta, double z) {
    return ml(MLParams{alpha, beta}, z);
}

/// Fractional relaxation profile E_{alpha,1}(-lambda t^alpha).
inline double relaxation(double alpha, double lambda, double t) {
    if (!(lambda >= 0.0)) throw std::domain_error("relaxation: lambda must be >= 0");
    if (!(t >= 0.0)) throw std::domain_error("relaxation: t must be >= 0");
    if (t == 0.0) return 1.0;
    return ml(alpha, 1.0, -lambda * std::pow(t, alpha));
}

/// Weakly singular kernel t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha).
/// Undefined at t = 0; integrals touching 0 go through k_segment.
inline double k_kernel(double alpha, double lambda, double t) {
    if (!(lambda >= 0.0)) throw std::domain_error("k_kernel: lambda must be >= 0");
    if (!(t > 0.0)) throw std::domain_error("k_kernel: t must be positive");
    return std::pow(t, alpha - 1.0) * ml(alpha, alpha, -lambda * std::pow(t, alpha));
}

/// Exact integral of k_kernel over [t_lo, t_hi], via the antiderivative
/// -(1/lambda) E_{alpha,1}(-lambda t^alpha). The lambda = 0 limit is
/// (t_hi^alpha - t_lo^alpha) / Gamma(alpha + 1).
inline KernelWeight k_segment(double alpha, double lambda, double t_lo, double t_hi) {
    if (!(lambda >= 0.0)) throw std::domain_error("k_segment: lambda must be >= 0");
    if (!(t_lo >= 0.0)) throw std::domain_error("k_segment: t_lo must be >= 0");
    if (t_hi < t_lo) throw std::invalid_argument("k_segment: t_hi < t_lo");
    KernelWeight w{lambda, t_lo, t_hi, 0.0};
    if (t_hi == t_lo) return w;
    if (lambda * std::pow(t_hi, alpha) < 1e-4) {
        // difference of two E values near 1 cancels; three series terms
        // carry relative error below (lambda t^alpha)^3 ~ 1e-12
        double acc = 0.0, sign = 1.0;
        for (int m = 0; m < 3; ++m) {
            const double p = (m + 1) * alpha;
            acc += sign * (std::pow(t_hi, p) - std::pow(t_lo, p)) / gamma_fn(p + 1.0);
            sign *= -lambda;
            if (lambda == 0.0) break;
        }
        w.value = acc;
    } else {
        const double e_lo = (t_lo == 0.0) ? 1.0 : ml(alpha, 1.0, -lambda * std::pow(t_lo, alpha));
        const double e_hi = ml(alpha, 1.0, -lambda * std::pow(t_hi, alpha));
        w.value = (e_lo - e_hi) / lambda;
    }
    return w;
}

} // namespace fracdiff
