#pragma once

#include "field.hpp"
#include "fractional.hpp"
#include "operators.hpp"
#include "problem.hpp"

#include <Eigen/Dense>

#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracdiff {

namespace l1_detail {

/// Implicit L1 march on v = u - a for the chosen operator variant, with an
/// optional extra source added to F (used by the monotone iteration). The
/// generalized initial condition is exact: v(.,0) = 0.
inline Field march(const ProblemSpec& p, OperatorVariant variant, const Eigen::MatrixXd* extra) {
    p.validate();
    const auto n = static_cast<Eigen::Index>(p.grid.size());
    const std::size_t nt = p.tgrid.steps();

    Field u;
    u.producer = Producer::l1;
    u.grid = p.grid;
    u.tgrid = p.tgrid;
    u.values.resize(n, static_cast<Eigen::Index>(nt + 1));
    u.values.col(0) = p.a;

    std::vector<Eigen::VectorXd> v(nt + 1);
    v[0] = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 1; k <= nt; ++k) {
        const double tk = p.tgrid.t(k);
        const std::vector<double> w = l1_weights(p.alpha, p.tgrid, k);
        Eigen::VectorXd rhs = p.F.col(static_cast<Eigen::Index>(k));
        if (extra) rhs += extra->col(static_cast<Eigen::Index>(k));
        rhs += w[k - 1] * v[k - 1];
        for (std::size_t j = 0; j + 1 < k; ++j) rhs -= w[j] * (v[j + 1] - v[j]);

        const DiscreteOperator op = assemble(p.coeffs, p.grid, variant, tk);
        rhs -= op.matrix * p.a;
        Eigen::MatrixXd lhs = op.matrix;
        lhs.diagonal().array() += w[k - 1];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
        v[k] = lu.solve(rhs);
        const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        if (!v[k].allFinite() || (lhs * v[k] - rhs).cwiseAbs().maxCoeff() >
                                     1e-8 * static_cast<double>(n) * scale) {
            std::ostringstream msg;
            msg << "solve_l1: singular or ill-conditioned step matrix at step " << k
                << " (t = " << tk << ")";
            throw std::runtime_error(msg.str());
        }
        u.values.col(static_cast<Eigen::Index>(k)) = v[k] + p.a;
    }
    return u;
}

} // namespace l1_detail

/// Implicit L1 time-stepper for the full operator. Shares no kernel or
/// quadrature code with the spectral solver.
inline Field solve_l1(const ProblemSpec& p) {
    return l1_detail::march(p, OperatorVariant::FullA, nullptr);
}

/// Scalar reduction: dt^alpha (y - a) = lam_rhs * y + f with y(0) = a,
/// marched by the same implicit L1 stepping (lam_rhs = -A in the matrix
/// problem; lam_rhs = +1 gives the pure growth benchmark).
inline TimeSignal solve_l1_scalar(double alpha, const TimeGrid& tgrid, double lam_rhs, double a,
                                  const TimeSignal& f) {
    if (f.grid.nodes != tgrid.nodes)
        throw std::invalid_argument("solve_l1_scalar: forcing grid mismatch");
    const std::size_t nt = tgrid.steps();
    std::vector<double> v(nt + 1, 0.0);
    TimeSignal y(tgrid, std::vector<double>(nt + 1, a));
    for (std::size_t k = 1; k <= nt; ++k) {
        const std::vector<double> w = l1_weights(alpha, tgrid, k);
        double rhs = f[k] + w[k - 1] * v[k - 1] + lam_rhs * a;
        for (std::size_t j = 0; j + 1 < k; ++j) rhs -= w[j] * (v[j + 1] - v[j]);
        const double lhs = w[k - 1] - lam_rhs;
        if (lhs == 0.0)
            throw std::runtime_error("solve_l1_scalar: singular step at step " + std::to_string(k));
        v[k] = rhs / lhs;
        y[k] = v[k] + a;
    }
    return y;
}

} // namespace fracdiff
