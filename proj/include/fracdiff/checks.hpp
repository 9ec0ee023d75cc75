#pragma once

#include "fractional.hpp"
#include "operators.hpp"
#include "problem.hpp"
#include "solver_l1.hpp"
#include "solver_mild.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace fracdiff {

/// A check ran on data violating its hypotheses; distinct from a check
/// failure so drivers can exit differently.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Witness {
    std::size_t ix = 0;
    std::size_t it = 0;
};

/// Outcome of one discrete certificate. worst_violation is signed: the
/// smallest margin seen, negative when the property is violated.
struct CheckReport {
    std::string check_name;
    bool pass = false;
    double worst_violation = 0.0;
    Witness witness;
    double tolerance = 0.0;
    std::uint64_t fingerprint = 0;

    void finalize() { pass = worst_violation >= -tolerance; }
};

namespace check_detail {

inline void fnv(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
}

inline void fnv(std::uint64_t& h, double v) { fnv(h, &v, sizeof v); }

} // namespace check_detail

/// Stable 64-bit digest of a discrete instance (lattices, data, and
/// coefficient samples at the initial and final times).
inline std::uint64_t fingerprint(const ProblemSpec& p) {
    using check_detail::fnv;
    std::uint64_t h = 0xcbf29ce484222325ull;
    fnv(h, p.alpha);
    fnv(h, static_cast<double>(p.grid.dimension));
    fnv(h, static_cast<double>(p.grid.n[0]));
    fnv(h, static_cast<double>(p.grid.n[1]));
    fnv(h, p.grid.length[0]);
    fnv(h, p.grid.length[1]);
    for (double t : p.tgrid.nodes) fnv(h, t);
    for (Eigen::Index i = 0; i < p.a.size(); ++i) fnv(h, p.a(i));
    fnv(h, p.F.data(), sizeof(double) * static_cast<std::size_t>(p.F.size()));
    const double times[2] = {0.0, p.tgrid.horizon};
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const Point x = p.grid.node(i);
        fnv(h, p.coeffs.a(x));
        fnv(h, p.coeffs.sigma(x));
        for (double t : times) {
            fnv(h, p.coeffs.b[0](x, t));
            fnv(h, p.coeffs.b[1](x, t));
            fnv(h, p.coeffs.c(x, t));
            fnv(h, p.coeffs.b0(x, t));
        }
    }
    fnv(h, p.coeffs.c0);
    return h;
}

namespace check_detail {

// minimum entry of a lattice function with its witness
inline void track_min(CheckReport& r, double v, std::size_t ix, std::size_t it, bool& first) {
    if (first || v < r.worst_violation) {
        r.worst_violation = v;
        r.witness = {ix, it};
        first = false;
    }
}

} // namespace check_detail

/// Nodewise nonnegativity of a solution field.
inline CheckReport check_positivity(const Field& u, double tol) {
    CheckReport r;
    r.check_name = "positivity";
    r.tolerance = tol;
    bool first = true;
    for (Eigen::Index k = 0; k < u.values.cols(); ++k)
        for (Eigen::Index i = 0; i < u.values.rows(); ++i)
            check_detail::track_min(r, u.values(i, k), static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(k), first);
    r.finalize();
    return r;
}

/// Nodewise ordering u1 >= u2 for solutions of ordered data.
inline CheckReport check_comparison(const Field& u1, const Field& u2, double tol) {
    if (u1.values.rows() != u2.values.rows() || u1.values.cols() != u2.values.cols())
        throw std::invalid_argument("check_comparison: grid mismatch");
    CheckReport r;
    r.check_name = "comparison";
    r.tolerance = tol;
    bool first = true;
    for (Eigen::Index k = 0; k < u1.values.cols(); ++k)
        for (Eigen::Index i = 0; i < u1.values.rows(); ++i)
            check_detail::track_min(r, u1.values(i, k) - u2.values(i, k),
                                    static_cast<std::size_t>(i), static_cast<std::size_t>(k),
                                    first);
    r.finalize();
    return r;
}

/// Solution ordering under ordering of the zeroth-order coefficient:
/// c1 >= c2 implies u(c1) >= u(c2) for nonnegative data.
inline CheckReport check_c_monotonicity(const ProblemSpec& p, const TimeField& c1,
                                        const TimeField& c2, double tol) {
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const Point x = p.grid.node(i);
        for (double t : p.tgrid.nodes)
            if (c1(x, t) < c2(x, t))
                throw PreconditionError("check_c_monotonicity: c1 < c2 at a node");
    }
    ProblemSpec p1 = p, p2 = p;
    p1.coeffs.c = c1;
    p2.coeffs.c = c2;
    CheckReport r = check_comparison(solve_l1(p1), solve_l1(p2), tol);
    r.check_name = "c_monotonicity";
    r.fingerprint = fingerprint(p);
    return r;
}

/// Solution ordering under Robin coefficient ordering, valid under the
/// hypothesis c < 0 and sigma2 >= sigma1 >= sigma0 > 0 on the boundary.
inline CheckReport check_sigma_monotonicity(const ProblemSpec& p, const ScalarField& sigma1,
                                            const ScalarField& sigma2, double sigma0, double tol) {
    if (!(sigma0 > 0.0))
        throw PreconditionError("check_sigma_monotonicity: sigma0 must be positive");
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const Point x = p.grid.node(i);
        for (double t : p.tgrid.nodes)
            if (!(p.coeffs.c(x, t) < 0.0))
                throw PreconditionError("check_sigma_monotonicity: requires c < 0 on the lattice");
        if (!p.grid.on_boundary(i)) continue;
        if (!(sigma1(x) >= sigma0) || !(sigma2(x) >= sigma1(x)))
            throw PreconditionError("check_sigma_monotonicity: sigma ordering violated");
    }
    ProblemSpec p1 = p, p2 = p;
    p1.coeffs.sigma = sigma1;
    p2.coeffs.sigma = sigma2;
    CheckReport r = check_comparison(solve_l1(p1), solve_l1(p2), tol);
    r.check_name = "sigma_monotonicity";
    r.fingerprint = fingerprint(p);
    return r;
}

inline bool grid_sigma_nonzero(const ProblemSpec& p, std::size_t i) {
    return p.grid.on_boundary(i) && p.coeffs.sigma(p.grid.node(i)) != 0.0;
}

/// Lower bound u >= delta Gamma(beta+1)/Gamma(alpha+beta+1) t^{alpha+beta}
/// for sources dominating delta t^beta under Neumann data.
inline CheckReport check_example_bound(const ProblemSpec& p, const Field& u, double delta,
                                       double beta, double tol) {
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const Point x = p.grid.node(i);
        if (grid_sigma_nonzero(p, i))
            throw PreconditionError("check_example_bound: requires sigma = 0");
        if (p.a(static_cast<Eigen::Index>(i)) != 0.0)
            throw PreconditionError("check_example_bound: requires a = 0");
        for (std::size_t k = 0; k < p.tgrid.nodes.size(); ++k) {
            const double t = p.tgrid.t(k);
            if (p.coeffs.c(x, t) != 0.0 || p.coeffs.b[0](x, t) != 0.0 ||
                p.coeffs.b[1](x, t) != 0.0)
                throw PreconditionError("check_example_bound: requires a zeroth-order-free A");
            if (p.F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) <
                delta * std::pow(t, beta) - 1e-14)
                throw PreconditionError("check_example_bound: F must dominate delta t^beta");
        }
    }
    CheckReport r;
    r.check_name = "example_bound";
    r.tolerance = tol;
    r.fingerprint = fingerprint(p);
    const double scale = delta * gamma_fn(beta + 1.0) / gamma_fn(p.alpha + beta + 1.0);
    bool first = true;
    for (Eigen::Index k = 0; k < u.values.cols(); ++k) {
        const double bound = scale * std::pow(p.tgrid.t(static_cast<std::size_t>(k)), p.alpha + beta);
        for (Eigen::Index i = 0; i < u.values.rows(); ++i)
            check_detail::track_min(r, u.values(i, k) - bound, static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(k), first);
    }
    r.finalize();
    return r;
}

/// Barrier data for the positivity certificate w = u + eps (M + psi + t^alpha).
struct BarrierParams {
    double epsilon = 1e-3;
    double M = 0.0;
    Eigen::MatrixXd psi; // per-time-node solves of the auxiliary problem
};

/// Solves the psi problems per time node and picks M so that M + psi >= 0
/// and dt^alpha psi + b0 M > 0 hold with margin on the lattice.
inline BarrierParams make_barrier_params(const ProblemSpec& p, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("make_barrier_params: epsilon must be > 0");
    BarrierParams bp;
    bp.epsilon = epsilon;
    const auto n = static_cast<Eigen::Index>(p.grid.size());
    const auto nt = static_cast<Eigen::Index>(p.tgrid.steps() + 1);
    bp.psi.resize(n, nt);
    for (Eigen::Index k = 0; k < nt; ++k)
        bp.psi.col(k) = solve_psi(p.coeffs, p.grid, p.tgrid.t(static_cast<std::size_t>(k)));

    double max_neg_psi = 0.0;
    double max_ratio = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point x = p.grid.node(static_cast<std::size_t>(i));
        TimeSignal psi_i = TimeSignal(p.tgrid, std::vector<double>(static_cast<std::size_t>(nt)));
        for (Eigen::Index k = 0; k < nt; ++k) psi_i[static_cast<std::size_t>(k)] = bp.psi(i, k);
        const CaputoDerivative dpsi = caputo_l1(psi_i, p.alpha);
        for (Eigen::Index k = 0; k < nt; ++k) {
            max_neg_psi = std::max(max_neg_psi, -bp.psi(i, k));
            if (k == 0) continue;
            const double b0v = p.coeffs.b0(x, p.tgrid.t(static_cast<std::size_t>(k)));
            max_ratio = std::max(max_ratio, (1.0 - dpsi.at(static_cast<std::size_t>(k))) / b0v);
        }
    }
    bp.M = 1.0 + max_neg_psi + std::max(max_ratio, 0.0);
    return bp;
}

/// Constructive positivity certificate: checks that the barrier-shifted
/// field w has (a) positive A1 residual, (b) boundary flux >= eps, and
/// (c) nonnegative minimum, all from the first positive time node on.
inline CheckReport barrier_certificate(const Field& u, const ProblemSpec& p,
                                       const BarrierParams& bp, double tol) {
    const auto n = static_cast<Eigen::Index>(p.grid.size());
    const auto nt = static_cast<Eigen::Index>(p.tgrid.steps() + 1);
    if (bp.psi.rows() != n || bp.psi.cols() != nt)
        throw std::invalid_argument("barrier_certificate: psi shape mismatch");
    // BarrierParams invariants
    for (Eigen::Index k = 0; k < nt; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(bp.M + bp.psi(i, k) >= 0.0))
                throw std::invalid_argument("barrier_certificate: M + psi < 0 at a node");

    Eigen::MatrixXd w = u.values;
    for (Eigen::Index k = 0; k < nt; ++k) {
        const double shift = std::pow(p.tgrid.t(static_cast<std::size_t>(k)), p.alpha);
        w.col(k) += bp.epsilon * (Eigen::VectorXd::Constant(n, bp.M + shift) + bp.psi.col(k));
    }

    CheckReport r;
    r.check_name = "barrier";
    r.tolerance = tol;
    r.fingerprint = fingerprint(p);
    bool first = true;

    // (a) dt^alpha w + A1 w - F > 0 for t >= t_1
    std::vector<CaputoDerivative> dw(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        TimeSignal wi(p.tgrid, std::vector<double>(static_cast<std::size_t>(nt)));
        for (Eigen::Index k = 0; k < nt; ++k) wi[static_cast<std::size_t>(k)] = w(i, k);
        dw[static_cast<std::size_t>(i)] = caputo_l1(wi, p.alpha);
    }
    for (Eigen::Index k = 1; k < nt; ++k) {
        const double t = p.tgrid.t(static_cast<std::size_t>(k));
        const DiscreteOperator a1 = assemble(p.coeffs, p.grid, OperatorVariant::A1, t);
        const Eigen::VectorXd aw = a1.matrix * w.col(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double resid = dw[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(k)) +
                                 aw(i) - p.F(i, k);
            check_detail::track_min(r, resid, static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(k), first);
        }
    }

    // (b) boundary flux of w at least eps (second-order one-sided conormal)
    const auto flux = [&](const Eigen::VectorXd& col, std::size_t p0, std::size_t p1,
                          std::size_t p2, double h) {
        const double du = (-3.0 * col(static_cast<Eigen::Index>(p0)) +
                           4.0 * col(static_cast<Eigen::Index>(p1)) -
                           col(static_cast<Eigen::Index>(p2))) / (2.0 * h);
        const Point x = p.grid.node(p0);
        return -p.coeffs.a(x) * du + p.coeffs.sigma(x) * col(static_cast<Eigen::Index>(p0));
    };
    for (Eigen::Index k = 1; k < nt; ++k) {
        const auto col = w.col(k);
        const auto check_line = [&](std::size_t p0, std::size_t p1, std::size_t p2, double h) {
            check_detail::track_min(r, flux(col, p0, p1, p2, h) - bp.epsilon, p0,
                                    static_cast<std::size_t>(k), first);
        };
        if (p.grid.dimension == 1) {
            const std::size_t m = p.grid.n[0];
            check_line(0, 1, 2, p.grid.h(0));
            check_line(m - 1, m - 2, m - 3, p.grid.h(0));
        } else {
            const std::size_t nx = p.grid.n[0], ny = p.grid.n[1];
            for (std::size_t j = 0; j < ny; ++j) {
                check_line(nx * j, nx * j + 1, nx * j + 2, p.grid.h(0));
                check_line(nx * j + nx - 1, nx * j + nx - 2, nx * j + nx - 3, p.grid.h(0));
            }
            for (std::size_t i = 0; i < nx; ++i) {
                check_line(i, i + nx, i + 2 * nx, p.grid.h(1));
                check_line(i + nx * (ny - 1), i + nx * (ny - 2), i + nx * (ny - 3), p.grid.h(1));
            }
        }
    }

    // (c) min w >= 0
    for (Eigen::Index k = 0; k < nt; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            check_detail::track_min(r, w(i, k), static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(k), first);

    r.finalize();
    return r;
}

/// Fractional extremum principle: at an interior-in-time minimum node the
/// discrete Caputo derivative is nonpositive.
inline CheckReport extremum_principle_probe(const TimeSignal& y, double alpha, double tol = 1e-6) {
    std::size_t argmin = 0;
    for (std::size_t k = 1; k < y.size(); ++k)
        if (y[k] < y[argmin]) argmin = k;
    if (argmin == 0)
        throw PreconditionError("extremum_principle_probe: minimum attained at t = 0");
    const CaputoDerivative d = caputo_l1(y, alpha);
    CheckReport r;
    r.check_name = "extremum";
    r.tolerance = tol;
    r.worst_violation = -d.at(argmin); // nonpositive derivative = nonnegative margin
    r.witness = {0, argmin};
    r.finalize();
    return r;
}

} // namespace fracdiff
