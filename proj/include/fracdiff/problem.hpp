#pragma once

#include "space_grid.hpp"
#include "time_grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace fracdiff {

/// Discrete instance of the evolution problem: fractional order, lattices,
/// coefficients, initial value a on the space nodes and source F on the
/// space x time lattice (column k = time node k).
struct ProblemSpec {
    double alpha = 0.5;
    SpaceGrid grid;
    TimeGrid tgrid;
    CoefficientSet coeffs;
    Eigen::VectorXd a;
    Eigen::MatrixXd F;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("ProblemSpec: alpha must be in (0,1)");
        const auto n = static_cast<Eigen::Index>(grid.size());
        const auto nt = static_cast<Eigen::Index>(tgrid.steps() + 1);
        if (a.size() != n) throw std::invalid_argument("ProblemSpec: initial value size mismatch");
        if (F.rows() != n || F.cols() != nt)
            throw std::invalid_argument("ProblemSpec: source shape mismatch");
        if (!a.allFinite() || !F.allFinite())
            throw std::invalid_argument("ProblemSpec: data must be finite");
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const Point xp = grid.node(p);
            if (!(coeffs.a(xp) > 0.0))
                throw std::invalid_argument("ProblemSpec: ellipticity violated");
            if (grid.on_boundary(p) && coeffs.sigma(xp) < 0.0)
                throw std::invalid_argument("ProblemSpec: sigma must be nonnegative");
        }
    }

    /// Samples callable data onto the lattices.
    static ProblemSpec build(double alpha, SpaceGrid grid, TimeGrid tgrid, CoefficientSet coeffs,
                             const ScalarField& a_fn, const TimeField& f_fn) {
        ProblemSpec p;
        p.alpha = alpha;
        p.grid = std::move(grid);
        p.tgrid = std::move(tgrid);
        p.coeffs = std::move(coeffs);
        const auto n = static_cast<Eigen::Index>(p.grid.size());
        const auto nt = static_cast<Eigen::Index>(p.tgrid.steps() + 1);
        p.a.resize(n);
        p.F.resize(n, nt);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Point x = p.grid.node(static_cast<std::size_t>(i));
            p.a(i) = a_fn(x);
            for (Eigen::Index k = 0; k < nt; ++k)
                p.F(i, k) = f_fn(x, p.tgrid.t(static_cast<std::size_t>(k)));
        }
        p.validate();
        return p;
    }

    /// Discrete H1 norm of the initial value (trapezoid L2 plus forward
    /// difference-quotient energy).
    double a_h1_norm() const {
        double s = 0.0;
        const auto add_axis = [&](std::size_t stride, std::size_t line_n, std::size_t lines,
                                  std::size_t line_stride, double h, double cross) {
            for (std::size_t l = 0; l < lines; ++l)
                for (std::size_t i = 0; i + 1 < line_n; ++i) {
                    const double d = (a(static_cast<Eigen::Index>(l * line_stride + (i + 1) * stride)) -
                                      a(static_cast<Eigen::Index>(l * line_stride + i * stride))) / h;
                    s += h * cross * d * d;
                }
        };
        if (grid.dimension == 1) {
            const double h = grid.h(0);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double w = (i == 0 || i + 1 == grid.size()) ? 0.5 * h : h;
                s += w * a(static_cast<Eigen::Index>(i)) * a(static_cast<Eigen::Index>(i));
            }
            add_axis(1, grid.n[0], 1, 0, h, 1.0);
        } else {
            for (std::size_t p = 0; p < grid.size(); ++p) {
                const std::size_t i = p % grid.n[0], j = p / grid.n[0];
                const double wx = (i == 0 || i + 1 == grid.n[0]) ? 0.5 * grid.h(0) : grid.h(0);
                const double wy = (j == 0 || j + 1 == grid.n[1]) ? 0.5 * grid.h(1) : grid.h(1);
                s += wx * wy * a(static_cast<Eigen::Index>(p)) * a(static_cast<Eigen::Index>(p));
            }
            add_axis(1, grid.n[0], grid.n[1], grid.n[0], grid.h(0), grid.h(1));
            add_axis(grid.n[0], grid.n[1], grid.n[0], 1, grid.h(1), grid.h(0));
        }
        return std::sqrt(s);
    }
};

} // namespace fracdiff
