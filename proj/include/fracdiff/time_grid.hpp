#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracdiff {

/// Time lattice 0 = t_0 < t_1 < ... < t_N = T, uniform or graded
/// t_k = T (k/N)^gamma. Graded grids concentrate nodes near t = 0 where
/// solutions behave like t^alpha.
struct TimeGrid {
    double horizon = 1.0;
    std::vector<double> nodes;

    static TimeGrid uniform(double T, std::size_t n_steps) {
        check(T, n_steps);
        TimeGrid g;
        g.horizon = T;
        g.nodes.resize(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k)
            g.nodes[k] = T * static_cast<double>(k) / static_cast<double>(n_steps);
        g.nodes.back() = T;
        return g;
    }

    static TimeGrid graded(double T, std::size_t n_steps, double gamma) {
        check(T, n_steps);
        if (!(gamma >= 1.0)) throw std::invalid_argument("TimeGrid: grading exponent must be >= 1");
        TimeGrid g;
        g.horizon = T;
        g.nodes.resize(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k)
            g.nodes[k] = T * std::pow(static_cast<double>(k) / static_cast<double>(n_steps), gamma);
        g.nodes.back() = T;
        return g;
    }

    std::size_t steps() const { return nodes.size() - 1; }
    double t(std::size_t k) const { return nodes[k]; }
    double dt(std::size_t j) const { return nodes[j + 1] - nodes[j]; }

  private:
    static void check(double T, std::size_t n_steps) {
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n_steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
    }
};

/// Scalar function of time sampled on a TimeGrid.
struct TimeSignal {
    TimeGrid grid;
    std::vector<double> values;

    TimeSignal() = default;
    TimeSignal(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.nodes.size())
            throw std::invalid_argument("TimeSignal: value count must match grid nodes");
    }

    template <typename F>
    static TimeSignal sample(const TimeGrid& g, F&& f) {
        std::vector<double> v(g.nodes.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(g.nodes[k]);
        return TimeSignal(g, std::move(v));
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](std::size_t k) { return values[k]; }
};

} // namespace fracdiff
