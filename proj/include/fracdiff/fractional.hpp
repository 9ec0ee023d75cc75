#pragma once

#include "gamma.hpp"
#include "time_grid.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fracdiff {

/// Riemann-Liouville integral (J^beta f)(t) = 1/Gamma(beta) int_0^t
/// (t-s)^{beta-1} f(s) ds, discretized by product integration with a
/// piecewise-linear interpolant of f (kernel moments in closed form).
inline TimeSignal rl_integral(const TimeSignal& f, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("rl_integral: beta must be positive");
    const auto& g = f.grid;
    const std::size_t n = g.steps();
    std::vector<double> out(n + 1, 0.0);
    const double inv_gb1 = 1.0 / gamma_fn(beta + 1.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const double tk = g.t(k);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            // kernel moments over [t_j, t_{j+1}] with r = t_k - s
            const double a = tk - g.t(j);
            const double b = tk - g.t(j + 1);
            const double pa = std::pow(a, beta);
            const double pb = std::pow(b, beta);
            const double m0 = (pa - pb) * inv_gb1; // int r^{beta-1}/Gamma(beta)
            // int (s - t_j) r^{beta-1}/Gamma(beta) ds
            const double m1 = a * m0 - (pa * a - pb * b) * inv_gb1 * beta / (beta + 1.0);
            const double slope = (f[j + 1] - f[j]) / g.dt(j);
            acc += f[j] * m0 + slope * m1;
        }
        out[k] = acc;
    }
    return TimeSignal(g, std::move(out));
}

/// L1 weights w_{k,j} for the Caputo derivative at node k:
/// caputo_l1(y)[k] = sum_j w_{k,j} (y_{j+1} - y_j), j = 0..k-1.
inline std::vector<double> l1_weights(double alpha, const TimeGrid& grid, std::size_t k) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("l1_weights: alpha must be in (0,1)");
    if (k < 1 || k > grid.steps()) throw std::out_of_range("l1_weights: node index out of range");
    const double tk = grid.t(k);
    const double c = 1.0 / gamma_fn(2.0 - alpha);
    std::vector<double> w(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double a = tk - grid.t(j);
        const double b = tk - grid.t(j + 1);
        w[j] = c * (std::pow(a, 1.0 - alpha) - std::pow(b, 1.0 - alpha)) / grid.dt(j);
    }
    return w;
}

/// L1-scheme pointwise Caputo derivative of order alpha in (0,1).
/// Node 0 has no history and is reported as absent.
struct CaputoDerivative {
    TimeGrid grid;
    std::vector<std::optional<double>> values; // values[0] == nullopt

    double at(std::size_t k) const {
        if (!values[k]) throw std::out_of_range("CaputoDerivative: undefined at node 0");
        return *values[k];
    }
};

inline CaputoDerivative caputo_l1(const TimeSignal& y, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("caputo_l1: alpha must be in (0,1)");
    const auto& g = y.grid;
    const std::size_t n = g.steps();
    CaputoDerivative d;
    d.grid = g;
    d.values.assign(n + 1, std::nullopt);
    const double c = 1.0 / gamma_fn(2.0 - alpha);
    for (std::size_t k = 1; k <= n; ++k) {
        const double tk = g.t(k);
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double a = tk - g.t(j);
            const double b = tk - g.t(j + 1);
            const double w = c * (std::pow(a, 1.0 - alpha) - std::pow(b, 1.0 - alpha)) / g.dt(j);
            acc += w * (y[j + 1] - y[j]);
        }
        d.values[k] = acc;
    }
    return d;
}

/// Residual of the inverse pair: max |caputo_l1(rl_integral(f, alpha)) - f|
/// over interior nodes.
inline double check_inverse(const TimeSignal& f, double alpha) {
    const TimeSignal g = rl_integral(f, alpha);
    const CaputoDerivative d = caputo_l1(g, alpha);
    double worst = 0.0;
    for (std::size_t k = 1; k <= f.grid.steps(); ++k)
        worst = std::max(worst, std::abs(d.at(k) - f[k]));
    return worst;
}

} // namespace fracdiff
