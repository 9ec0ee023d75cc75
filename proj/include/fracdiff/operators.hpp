#pragma once

#include "space_grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace fracdiff {

enum class OperatorVariant { FullA, A0, A1 };

/// Matrix realization of the elliptic operator on a SpaceGrid, together
/// with the quadrature weights that define the discrete L2 inner product.
/// The A0 variant is symmetric under those weights.
struct DiscreteOperator {
    Eigen::MatrixXd matrix;
    OperatorVariant variant = OperatorVariant::A0;
    bool symmetric = false;
    Eigen::VectorXd inner_product_weights;
    SpaceGrid grid;

    double weighted_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
        return u.dot(inner_product_weights.cwiseProduct(v));
    }
    double weighted_norm(const Eigen::VectorXd& u) const {
        return std::sqrt(weighted_dot(u, u));
    }
};

/// First m eigenpairs of the self-adjoint variant, ascending, with
/// weighted-orthonormal eigenvectors and a deterministic sign convention.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors; // columns
    Eigen::VectorXd weights;      // inner product weights of the source operator

    std::size_t count() const { return static_cast<std::size_t>(eigenvalues.size()); }
    double project(const Eigen::VectorXd& v, std::size_t mode) const {
        return eigenvectors.col(static_cast<Eigen::Index>(mode)).dot(weights.cwiseProduct(v));
    }
};

struct AssembleOptions {
    bool validate = true; // test hook: skip coefficient sign checks
};

namespace op_detail {

inline Eigen::VectorXd quadrature_weights(const SpaceGrid& grid) {
    const auto axis_w = [](std::size_t n, double h) {
        Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), h);
        w(0) = 0.5 * h;
        w(static_cast<Eigen::Index>(n - 1)) = 0.5 * h;
        return w;
    };
    if (grid.dimension == 1) return axis_w(grid.n[0], grid.h(0));
    const Eigen::VectorXd wx = axis_w(grid.n[0], grid.h(0));
    const Eigen::VectorXd wy = axis_w(grid.n[1], grid.h(1));
    Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.n[1]; ++j)
        for (std::size_t i = 0; i < grid.n[0]; ++i)
            w(static_cast<Eigen::Index>(i + grid.n[0] * j)) =
                wx(static_cast<Eigen::Index>(i)) * wy(static_cast<Eigen::Index>(j));
    return w;
}

// Adds the finite-volume discretization of -d/dx_axis(a d/dx_axis) along one
// grid line, with Robin flux closure at the two endpoints (half-cell rows).
// `idx` maps the position along the line to the global node index.
template <typename IndexFn>
inline void add_diffusion_line(Eigen::MatrixXd& M, const SpaceGrid& grid,
                               const ScalarField& a, const ScalarField& sigma,
                               int axis, std::size_t line_n, IndexFn idx) {
    const double h = grid.h(axis);
    const auto midpoint = [&](std::size_t i) {
        Point p = grid.node(idx(i));
        Point q = grid.node(idx(i + 1));
        return Point{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    };
    for (std::size_t i = 0; i + 1 < line_n; ++i) {
        const double am = a(midpoint(i));
        const auto r0 = static_cast<Eigen::Index>(idx(i));
        const auto r1 = static_cast<Eigen::Index>(idx(i + 1));
        // interior rows carry 1/h^2; half-cell boundary rows carry 2/h^2
        const double s0 = (i == 0) ? 2.0 : 1.0;
        const double s1 = (i + 2 == line_n) ? 2.0 : 1.0;
        M(r0, r0) += s0 * am / (h * h);
        M(r0, r1) -= s0 * am / (h * h);
        M(r1, r1) += s1 * am / (h * h);
        M(r1, r0) -= s1 * am / (h * h);
    }
    // Robin flux terms at the two line ends
    const auto first = static_cast<Eigen::Index>(idx(0));
    const auto last = static_cast<Eigen::Index>(idx(line_n - 1));
    M(first, first) += 2.0 / h * sigma(grid.node(idx(0)));
    M(last, last) += 2.0 / h * sigma(grid.node(idx(line_n - 1)));
}

// Second-order first-derivative stencil along one axis: centered in the
// interior, one-sided at the line endpoints.
template <typename IndexFn>
inline void add_drift_line(Eigen::MatrixXd& M, const SpaceGrid& grid, const TimeField& b,
                           double t, int axis, std::size_t line_n, IndexFn idx, double sign) {
    const double h = grid.h(axis);
    for (std::size_t i = 0; i < line_n; ++i) {
        const auto r = static_cast<Eigen::Index>(idx(i));
        const double bv = sign * b(grid.node(idx(i)), t);
        if (bv == 0.0) continue;
        if (i == 0) {
            M(r, static_cast<Eigen::Index>(idx(0))) += bv * (-3.0) / (2.0 * h);
            M(r, static_cast<Eigen::Index>(idx(1))) += bv * 4.0 / (2.0 * h);
            M(r, static_cast<Eigen::Index>(idx(2))) += bv * (-1.0) / (2.0 * h);
        } else if (i + 1 == line_n) {
            M(r, static_cast<Eigen::Index>(idx(line_n - 1))) += bv * 3.0 / (2.0 * h);
            M(r, static_cast<Eigen::Index>(idx(line_n - 2))) += bv * (-4.0) / (2.0 * h);
            M(r, static_cast<Eigen::Index>(idx(line_n - 3))) += bv * 1.0 / (2.0 * h);
        } else {
            M(r, static_cast<Eigen::Index>(idx(i + 1))) += bv / (2.0 * h);
            M(r, static_cast<Eigen::Index>(idx(i - 1))) -= bv / (2.0 * h);
        }
    }
}

} // namespace op_detail

/// Assembles the requested operator variant at time t:
///   FullA: -div(a grad u) - b . grad u - c u    (Robin closure)
///   A0:    -div(a grad u) + c0 u                (symmetric under weights)
///   A1:    -div(a grad u) - b . grad u + b0 u
inline DiscreteOperator assemble(const CoefficientSet& coeffs, const SpaceGrid& grid,
                                 OperatorVariant variant, double t = 0.0,
                                 const AssembleOptions& options = {}) {
    const std::size_t n = grid.size();
    if (options.validate) {
        for (std::size_t p = 0; p < n; ++p) {
            const Point xp = grid.node(p);
            if (!(coeffs.a(xp) > 0.0))
                throw std::invalid_argument("assemble: ellipticity violated (a <= 0 on the grid)");
            if (grid.on_boundary(p) && coeffs.sigma(xp) < 0.0)
                throw std::invalid_argument("assemble: sigma must be nonnegative on the boundary");
            if (variant == OperatorVariant::A1 && !(coeffs.b0(xp, t) > 0.0))
                throw std::invalid_argument("assemble: A1 requires b0 > 0 on the grid");
        }
        if (coeffs.c0 < 0.0) throw std::invalid_argument("assemble: c0 must be nonnegative");
    }

    DiscreteOperator op;
    op.grid = grid;
    op.variant = variant;
    op.inner_product_weights = op_detail::quadrature_weights(grid);
    op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    if (grid.dimension == 1) {
        op_detail::add_diffusion_line(op.matrix, grid, coeffs.a, coeffs.sigma, 0, grid.n[0],
                                      [](std::size_t i) { return i; });
    } else {
        const std::size_t nx = grid.n[0], ny = grid.n[1];
        for (std::size_t j = 0; j < ny; ++j)
            op_detail::add_diffusion_line(op.matrix, grid, coeffs.a, coeffs.sigma, 0, nx,
                                          [&](std::size_t i) { return i + nx * j; });
        for (std::size_t i = 0; i < nx; ++i)
            op_detail::add_diffusion_line(op.matrix, grid, coeffs.a, coeffs.sigma, 1, ny,
                                          [&](std::size_t j) { return i + nx * j; });
    }

    switch (variant) {
    case OperatorVariant::A0:
        op.matrix.diagonal().array() += coeffs.c0;
        op.symmetric = true;
        break;
    case OperatorVariant::FullA:
    case OperatorVariant::A1: {
        const double sign = -1.0; // both variants carry -b . grad
        if (grid.dimension == 1) {
            op_detail::add_drift_line(op.matrix, grid, coeffs.b[0], t, 0, grid.n[0],
                                      [](std::size_t i) { return i; }, sign);
        } else {
            const std::size_t nx = grid.n[0], ny = grid.n[1];
            for (std::size_t j = 0; j < ny; ++j)
                op_detail::add_drift_line(op.matrix, grid, coeffs.b[0], t, 0, nx,
                                          [&](std::size_t i) { return i + nx * j; }, sign);
            for (std::size_t i = 0; i < nx; ++i)
                op_detail::add_drift_line(op.matrix, grid, coeffs.b[1], t, 1, ny,
                                          [&](std::size_t j) { return i + nx * j; }, sign);
        }
        for (std::size_t p = 0; p < n; ++p) {
            const auto r = static_cast<Eigen::Index>(p);
            if (variant == OperatorVariant::A1)
                op.matrix(r, r) += coeffs.b0(grid.node(p), t);
            else
                op.matrix(r, r) -= coeffs.c(grid.node(p), t);
        }
        op.symmetric = false;
        break;
    }
    }
    return op;
}

/// First m weighted-orthonormal eigenpairs of a symmetric (A0) operator.
inline EigenSystem eigendecompose(const DiscreteOperator& op, std::size_t m) {
    if (op.variant != OperatorVariant::A0)
        throw std::invalid_argument("eigendecompose: operator must be the A0 variant");
    const auto n = op.matrix.rows();
    if (m > static_cast<std::size_t>(n)) throw std::invalid_argument("eigendecompose: m > n");

    // M phi = lambda phi with W M symmetric -> solve the similar symmetric
    // problem W^{1/2} M W^{-1/2} psi = lambda psi, phi = W^{-1/2} psi.
    const Eigen::VectorXd ws = op.inner_product_weights.array().sqrt();
    const Eigen::MatrixXd sym =
        ws.asDiagonal() * op.matrix * ws.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd symm = 0.5 * (sym + sym.transpose()); // scrub roundoff skew
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symm);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: eigensolver failed to converge");

    EigenSystem es;
    es.weights = op.inner_product_weights;
    es.eigenvalues = solver.eigenvalues().head(static_cast<Eigen::Index>(m));
    es.eigenvectors.resize(n, static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        Eigen::VectorXd phi =
            ws.cwiseInverse().cwiseProduct(solver.eigenvectors().col(static_cast<Eigen::Index>(k)));
        phi /= std::sqrt(phi.dot(op.inner_product_weights.cwiseProduct(phi)));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(phi(i)) > 1e-12) {
                if (phi(i) < 0.0) phi = -phi;
                break;
            }
        }
        es.eigenvectors.col(static_cast<Eigen::Index>(k)) = phi;
    }
    return es;
}

/// Minimum discrete Rayleigh quotient (A1 v, v)_W / ||v||^2_{H1,discrete}
/// over random probes plus low eigenvectors of the symmetrized operator.
/// A positive return certifies discrete coercivity of A1 at this t.
inline double coercivity_check(const DiscreteOperator& op, std::size_t probes,
                               std::uint64_t seed = 12345) {
    if (op.variant != OperatorVariant::A1)
        throw std::invalid_argument("coercivity_check: operator must be the A1 variant");
    const auto n = op.matrix.rows();
    const Eigen::VectorXd& w = op.inner_product_weights;

    const auto h1_norm2 = [&](const Eigen::VectorXd& v) {
        double s = v.dot(w.cwiseProduct(v));
        const auto diff_axis = [&](std::size_t stride, std::size_t line_n, std::size_t lines,
                                   std::size_t line_stride, double h) {
            for (std::size_t l = 0; l < lines; ++l)
                for (std::size_t i = 0; i + 1 < line_n; ++i) {
                    const auto p = static_cast<Eigen::Index>(l * line_stride + i * stride);
                    const auto q = static_cast<Eigen::Index>(l * line_stride + (i + 1) * stride);
                    const double d = (v(q) - v(p)) / h;
                    s += h * d * d * (op.grid.dimension == 2 ? op.grid.h(stride == 1 ? 1 : 0) : 1.0);
                }
        };
        if (op.grid.dimension == 1) {
            diff_axis(1, op.grid.n[0], 1, 0, op.grid.h(0));
        } else {
            diff_axis(1, op.grid.n[0], op.grid.n[1], op.grid.n[0], op.grid.h(0));
            diff_axis(op.grid.n[0], op.grid.n[1], op.grid.n[0], 1, op.grid.h(1));
        }
        return s;
    };

    const auto rayleigh = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd av = op.matrix * v;
        return av.dot(w.cwiseProduct(v)) / h1_norm2(v);
    };

    double worst = std::numeric_limits<double>::infinity();
    // eigenvector candidates of the weighted-symmetric part
    {
        const Eigen::VectorXd ws = w.array().sqrt();
        const Eigen::MatrixXd sym = ws.asDiagonal() * op.matrix * ws.cwiseInverse().asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sym + sym.transpose()));
        const auto k_max = std::min<Eigen::Index>(8, n);
        for (Eigen::Index k = 0; k < k_max; ++k) {
            const Eigen::VectorXd v = ws.cwiseInverse().cwiseProduct(solver.eigenvectors().col(k));
            worst = std::min(worst, rayleigh(v));
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    for (std::size_t p = 0; p < probes; ++p) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
        worst = std::min(worst, rayleigh(v));
    }
    return worst;
}

/// Solves the auxiliary problem A1 psi = 1 with inhomogeneous Robin flux
/// data 1 (conormal derivative + sigma psi = 1 on the boundary).
inline Eigen::VectorXd solve_psi(const CoefficientSet& coeffs, const SpaceGrid& grid, double t) {
    const DiscreteOperator op = assemble(coeffs, grid, OperatorVariant::A1, t);
    const auto n = op.matrix.rows();
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
    // finite-volume boundary rows pick up the flux datum scaled by 2/h
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!grid.on_boundary(p)) continue;
        const auto r = static_cast<Eigen::Index>(p);
        if (grid.dimension == 1) {
            rhs(r) += 2.0 / grid.h(0);
        } else {
            const std::size_t i = p % grid.n[0], j = p / grid.n[0];
            if (i == 0 || i == grid.n[0] - 1) rhs(r) += 2.0 / grid.h(0);
            if (j == 0 || j == grid.n[1] - 1) rhs(r) += 2.0 / grid.h(1);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.matrix);
    const Eigen::VectorXd psi = lu.solve(rhs);
    const double resid = (op.matrix * psi - rhs).cwiseAbs().maxCoeff();
    if (!(resid <= 1e-10 * static_cast<double>(n) * std::max(1.0, rhs.cwiseAbs().maxCoeff()))) {
        const double cond_proxy = op.matrix.cwiseAbs().rowwise().sum().maxCoeff() /
                                  std::max(lu.matrixLU().diagonal().cwiseAbs().minCoeff(), 1e-300);
        throw std::runtime_error("solve_psi: ill-conditioned system, condition estimate ~" +
                                 std::to_string(cond_proxy));
    }
    return psi;
}

} // namespace fracdiff
