#pragma once

#include "field.hpp"
#include "mittag_leffler.hpp"
#include "operators.hpp"
#include "problem.hpp"
#include "relaxation_table.hpp"
#include "threads.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracdiff {

/// Modal response (L f)(t) = int_0^t (t-s)^{alpha-1} E_{alpha,alpha}
/// (-lambda (t-s)^alpha) f(s) ds for one eigenvalue.
struct ModeResponse {
    double lambda = 0.0;
    TimeSignal f;
    TimeSignal Lnf;
};

/// Picard iteration failed to contract; carries the sweep history.
struct NonContractionError : std::runtime_error {
    std::vector<double> history;
    explicit NonContractionError(const std::string& what, std::vector<double> h)
        : std::runtime_error(what), history(std::move(h)) {}
};

namespace mild_detail {

inline bool is_uniform(const TimeGrid& g) {
    const double dt0 = g.horizon / static_cast<double>(g.steps());
    for (std::size_t j = 0; j < g.steps(); ++j)
        if (std::abs(g.dt(j) - dt0) > 1e-12 * g.horizon) return false;
    return true;
}

inline double min_step(const TimeGrid& g) {
    double m = g.horizon;
    for (std::size_t j = 0; j < g.steps(); ++j) m = std::min(m, g.dt(j));
    return m;
}

// Product-integration convolution of the K-kernel with piecewise-constant
// forcings (rows of fbar, one per mode). Uniform grids reduce to a length-N
// weight table per mode; graded grids evaluate the cached antiderivative
// once per (k, j) pair with the log hoisted out of the mode loop.
inline void convolve_all(const std::vector<RelaxationTable>& tables, const TimeGrid& g,
                         const Eigen::MatrixXd& fbar, Eigen::MatrixXd& out) {
    const std::size_t n = g.steps();
    const std::size_t m = tables.size();
    out.setZero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n + 1));
    if (is_uniform(g)) {
        const double dt = g.horizon / static_cast<double>(n);
        parallel_for(m, [&](std::size_t mode) {
            std::vector<double> w(n + 1, 0.0);
            for (std::size_t d = 1; d <= n; ++d)
                w[d] = tables[mode].segment(static_cast<double>(d - 1) * dt,
                                            static_cast<double>(d) * dt);
            for (std::size_t k = 1; k <= n; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < k; ++j)
                    acc += fbar(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(j)) *
                           w[k - j];
                out(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(k)) = acc;
            }
        });
        return;
    }
    parallel_for(n, [&](std::size_t k1) {
        const std::size_t k = k1 + 1;
        std::vector<double> logtau(k);
        std::vector<double> e(k + 1);
        const double tk = g.t(k);
        for (std::size_t j = 0; j < k; ++j) logtau[j] = std::log(tk - g.t(j));
        for (std::size_t mode = 0; mode < m; ++mode) {
            const RelaxationTable& tab = tables[mode];
            const double lam = tab.lambda();
            double acc = 0.0;
            if (tab.segment_is_series(tk)) {
                // small lambda t^alpha: per-segment series, no cancellation
                for (std::size_t j = 0; j < k; ++j)
                    acc += fbar(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(j)) *
                           tab.segment(tk - g.t(j + 1), tk - g.t(j));
            } else {
                for (std::size_t j = 0; j < k; ++j) e[j] = tab.eval_log(logtau[j]);
                e[k] = 1.0;
                for (std::size_t j = 0; j < k; ++j)
                    acc += fbar(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(j)) *
                           (e[j + 1] - e[j]);
                acc /= lam;
            }
            out(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(k)) = acc;
        }
    });
}

inline std::vector<double> convolve(const RelaxationTable& table, const TimeGrid& g,
                                    const std::vector<double>& fbar) {
    std::vector<RelaxationTable> tables{table};
    Eigen::MatrixXd fb(1, static_cast<Eigen::Index>(fbar.size()));
    for (std::size_t j = 0; j < fbar.size(); ++j) fb(0, static_cast<Eigen::Index>(j)) = fbar[j];
    Eigen::MatrixXd out;
    convolve_all(tables, g, fb, out);
    return std::vector<double>(out.data(), out.data() + out.size());
}

inline std::vector<double> cell_averages(const TimeSignal& f) {
    std::vector<double> fbar(f.grid.steps());
    for (std::size_t j = 0; j < fbar.size(); ++j) fbar[j] = 0.5 * (f[j] + f[j + 1]);
    return fbar;
}

} // namespace mild_detail

/// Product-integration evaluation of the modal response for one eigenvalue.
inline ModeResponse mode_response(double lambda, const TimeSignal& f, double alpha) {
    if (!(lambda >= 0.0)) throw std::domain_error("mode_response: lambda must be >= 0");
    MLParams{alpha, 1.0}.validate();
    const RelaxationTable table(alpha, lambda, mild_detail::min_step(f.grid), f.grid.horizon);
    ModeResponse r;
    r.lambda = lambda;
    r.f = f;
    r.Lnf = TimeSignal(f.grid, mild_detail::convolve(table, f.grid, mild_detail::cell_averages(f)));
    return r;
}

/// Homogeneous propagator: sum_n E_{alpha,1}(-lambda_n t^alpha) (a,phi_n) phi_n.
inline Eigen::VectorXd propagate_S(const EigenSystem& eig, const Eigen::VectorXd& a, double t,
                                   double alpha) {
    if (!(t >= 0.0)) throw std::domain_error("propagate_S: t must be >= 0");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size());
    for (std::size_t n = 0; n < eig.count(); ++n) {
        const double lam = std::max(eig.eigenvalues(static_cast<Eigen::Index>(n)), 0.0);
        const double factor = (t == 0.0) ? 1.0 : ml(alpha, 1.0, -lam * std::pow(t, alpha));
        out += factor * eig.project(a, n) * eig.eigenvectors.col(static_cast<Eigen::Index>(n));
    }
    return out;
}

/// Spectral mild-solution solver: u = G + Ru with G = S(.)a + K*F and
/// R the modal convolution of the lower-order terms Q = b.grad + (c0 + c),
/// iterated to a sup-norm fixed point.
inline Field solve_mild(const ProblemSpec& p, std::size_t m_modes, double tol,
                        std::size_t max_sweeps) {
    p.validate();
    const std::size_t n = p.grid.size();
    const std::size_t nt = p.tgrid.steps();
    const EigenSystem eig = eigendecompose(assemble(p.coeffs, p.grid, OperatorVariant::A0), m_modes);

    // modal kernel tables; eigensolver roundoff can leave lambda ~ -1e-13,
    // the segment small-argument branch absorbs that after clamping
    std::vector<RelaxationTable> tables;
    tables.reserve(m_modes);
    const double tau_min = mild_detail::min_step(p.tgrid);
    for (std::size_t m = 0; m < m_modes; ++m)
        tables.emplace_back(p.alpha,
                            std::max(eig.eigenvalues(static_cast<Eigen::Index>(m)), 0.0),
                            tau_min, p.tgrid.horizon);

    // G in modal coordinates: relaxation of a_n plus convolution of f_n
    Eigen::MatrixXd f_modal(static_cast<Eigen::Index>(m_modes), static_cast<Eigen::Index>(nt + 1));
    for (std::size_t m = 0; m < m_modes; ++m)
        for (std::size_t k = 0; k <= nt; ++k)
            f_modal(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
                eig.project(p.F.col(static_cast<Eigen::Index>(k)), m);
    const Eigen::MatrixXd f_bar =
        0.5 * (f_modal.leftCols(static_cast<Eigen::Index>(nt)) +
               f_modal.rightCols(static_cast<Eigen::Index>(nt)));
    Eigen::MatrixXd g_modal;
    mild_detail::convolve_all(tables, p.tgrid, f_bar, g_modal);
    for (std::size_t m = 0; m < m_modes; ++m) {
        const double a_n = eig.project(p.a, m);
        for (std::size_t k = 0; k <= nt; ++k)
            g_modal(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) +=
                tables[m](p.tgrid.t(k)) * a_n;
    }

    Field u;
    u.producer = Producer::spectral;
    u.grid = p.grid;
    u.tgrid = p.tgrid;
    u.values = eig.eigenvectors * g_modal;

    // centered first differences (one-sided at line ends) for b.grad u
    const auto apply_q = [&](const Eigen::MatrixXd& v, std::size_t k, Eigen::VectorXd& q) {
        const double t = p.tgrid.t(k);
        q.setZero();
        const auto col = v.col(static_cast<Eigen::Index>(k));
        const auto axis_term = [&](int axis, std::size_t stride, std::size_t line_n,
                                   std::size_t lines, std::size_t line_stride) {
            const double h = p.grid.h(axis);
            for (std::size_t l = 0; l < lines; ++l)
                for (std::size_t i = 0; i < line_n; ++i) {
                    const std::size_t idx = l * line_stride + i * stride;
                    const double bv = p.coeffs.b[axis](p.grid.node(idx), t);
                    if (bv == 0.0) continue;
                    double d;
                    if (i == 0)
                        d = (-3.0 * col(static_cast<Eigen::Index>(idx)) +
                             4.0 * col(static_cast<Eigen::Index>(idx + stride)) -
                             col(static_cast<Eigen::Index>(idx + 2 * stride))) / (2.0 * h);
                    else if (i + 1 == line_n)
                        d = (3.0 * col(static_cast<Eigen::Index>(idx)) -
                             4.0 * col(static_cast<Eigen::Index>(idx - stride)) +
                             col(static_cast<Eigen::Index>(idx - 2 * stride))) / (2.0 * h);
                    else
                        d = (col(static_cast<Eigen::Index>(idx + stride)) -
                             col(static_cast<Eigen::Index>(idx - stride))) / (2.0 * h);
                    q(static_cast<Eigen::Index>(idx)) += bv * d;
                }
        };
        if (p.grid.dimension == 1) {
            axis_term(0, 1, p.grid.n[0], 1, 0);
        } else {
            axis_term(0, 1, p.grid.n[0], p.grid.n[1], p.grid.n[0]);
            axis_term(1, p.grid.n[0], p.grid.n[1], p.grid.n[0], 1);
        }
        for (std::size_t i = 0; i < n; ++i)
            q(static_cast<Eigen::Index>(i)) +=
                (p.coeffs.c0 + p.coeffs.c(p.grid.node(i), t)) * col(static_cast<Eigen::Index>(i));
    };

    Eigen::MatrixXd q_modal(static_cast<Eigen::Index>(m_modes), static_cast<Eigen::Index>(nt + 1));
    Eigen::VectorXd qcol(static_cast<Eigen::Index>(n));

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double loss_worst = 0.0;
        for (std::size_t k = 0; k <= nt; ++k) {
            apply_q(u.values, k, qcol);
            for (std::size_t m = 0; m < m_modes; ++m)
                q_modal(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) =
                    eig.project(qcol, m);
            // relative projection loss of Qu measures mode truncation
            const Eigen::VectorXd recon =
                eig.eigenvectors * q_modal.col(static_cast<Eigen::Index>(k));
            const double qn = std::sqrt(qcol.dot(eig.weights.cwiseProduct(qcol)));
            if (qn > 0.0) {
                const Eigen::VectorXd res = qcol - recon;
                loss_worst =
                    std::max(loss_worst, std::sqrt(res.dot(eig.weights.cwiseProduct(res))) / qn);
            }
        }
        u.truncation_loss = std::max(u.truncation_loss, loss_worst);
        if (loss_worst > 1e-6) u.truncation_warning = true;

        const Eigen::MatrixXd q_bar =
            0.5 * (q_modal.leftCols(static_cast<Eigen::Index>(nt)) +
                   q_modal.rightCols(static_cast<Eigen::Index>(nt)));
        Eigen::MatrixXd conv;
        mild_detail::convolve_all(tables, p.tgrid, q_bar, conv);
        const Eigen::MatrixXd next = eig.eigenvectors * (g_modal + conv);
        const double delta = (next - u.values).cwiseAbs().maxCoeff();
        u.iteration_report.push_back(delta);
        u.values = next;
        if (delta <= tol) return u;
        const std::size_t r = u.iteration_report.size();
        if (r >= 5) {
            bool non_decreasing = true;
            for (std::size_t i = r - 4; i < r; ++i)
                if (u.iteration_report[i] < u.iteration_report[i - 1]) non_decreasing = false;
            if (non_decreasing)
                throw NonContractionError(
                    "solve_mild: sweep deltas not decreasing over 5 consecutive sweeps",
                    u.iteration_report);
        }
    }
    std::ostringstream msg;
    msg << "solve_mild: no convergence to tol " << tol << " within " << max_sweeps
        << " sweeps, last delta " << (u.iteration_report.empty() ? 0.0 : u.iteration_report.back());
    throw NonContractionError(msg.str(), u.iteration_report);
}

} // namespace fracdiff
