#pragma once

#include "mittag_leffler.hpp"

#include <cmath>
#include <vector>

namespace fracdiff {

/// Piecewise-Chebyshev interpolant of tau -> E_{alpha,1}(-lambda tau^alpha)
/// in log(tau), two panels per decade. Product-integration convolutions touch
/// O(N^2) distinct time differences on graded grids; direct ml() calls there
/// dominate the runtime, while the relaxation profile is analytic in log(tau)
/// and interpolates to ~1e-13.
class RelaxationTable {
  public:
    RelaxationTable(double alpha, double lambda, double tau_min, double tau_max)
        : alpha_(alpha), lambda_(lambda) {
        if (!(lambda > 0.0)) return; // E == 1 identically
        lo_ = std::log(std::max(tau_min, 1e-300));
        const double hi = std::log(tau_max);
        const int panels =
            std::max(1, static_cast<int>(std::ceil((hi - lo_) / std::log(10.0) * 2.0)));
        width_ = (hi - lo_) / panels;
        coeffs_.resize(panels);
        for (int p = 0; p < panels; ++p) {
            const double a = lo_ + p * width_;
            const double b = a + width_;
            std::vector<double> fx(degree + 1);
            for (int k = 0; k <= degree; ++k) {
                const double xk = std::cos(M_PI * (k + 0.5) / (degree + 1));
                const double tau = std::exp(0.5 * (a + b) + 0.5 * (b - a) * xk);
                fx[k] = ml(alpha_, 1.0, -lambda_ * std::pow(tau, alpha_));
            }
            auto& c = coeffs_[p];
            c.assign(degree + 1, 0.0);
            for (int j = 0; j <= degree; ++j) {
                double s = 0.0;
                for (int k = 0; k <= degree; ++k)
                    s += fx[k] * std::cos(M_PI * j * (k + 0.5) / (degree + 1));
                c[j] = 2.0 / (degree + 1) * s;
            }
            c[0] *= 0.5;
        }
    }

    /// E_{alpha,1}(-lambda tau^alpha); tau below the table floor returns the
    /// exact limit 1 minus the leading series term.
    double operator()(double tau) const {
        if (lambda_ == 0.0 || tau == 0.0) return 1.0;
        const double x = std::log(tau);
        if (x < lo_)
            return 1.0 - lambda_ * std::pow(tau, alpha_) / gamma_fn(alpha_ + 1.0);
        return eval_log(x);
    }

    double lambda() const { return lambda_; }
    double log_floor() const { return lo_; }

    /// True when segments up to t_max fall in the small-argument series
    /// branch of segment().
    bool segment_is_series(double t_max) const {
        return lambda_ * std::pow(t_max, alpha_) < 1e-4;
    }

    /// Interpolant evaluation from a precomputed log(tau) >= log_floor();
    /// hot path of the graded-grid convolution where the log is shared
    /// across modes.
    double eval_log(double x) const {
        int p = static_cast<int>((x - lo_) / width_);
        if (p < 0) p = 0;
        if (p >= static_cast<int>(coeffs_.size())) p = static_cast<int>(coeffs_.size()) - 1;
        const double a = lo_ + p * width_;
        const double xi = 2.0 * (x - a) / width_ - 1.0;
        const auto& c = coeffs_[p];
        double b1 = 0.0, b2 = 0.0;
        for (int j = degree; j >= 1; --j) {
            const double b0 = 2.0 * xi * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return xi * b1 - b2 + c[0];
    }

    /// Exact integral of the K-kernel over [tau_lo, tau_hi] through the
    /// cached antiderivative (mirrors k_segment).
    double segment(double tau_lo, double tau_hi) const {
        if (tau_hi == tau_lo) return 0.0;
        if (lambda_ * std::pow(tau_hi, alpha_) < 1e-4) {
            // small-argument series, same branch point as k_segment
            double acc = 0.0, sign = 1.0;
            for (int m = 0; m < 3; ++m) {
                const double p = (m + 1) * alpha_;
                acc += sign * (std::pow(tau_hi, p) - std::pow(tau_lo, p)) / gamma_fn(p + 1.0);
                sign *= -lambda_;
                if (lambda_ == 0.0) break;
            }
            return acc;
        }
        return ((*this)(tau_lo) - (*this)(tau_hi)) / lambda_;
    }

  private:
    static constexpr int degree = 12;
    double alpha_;
    double lambda_;
    double lo_ = 0.0;
    double width_ = 1.0;
    std::vector<std::vector<double>> coeffs_;
};

} // namespace fracdiff
