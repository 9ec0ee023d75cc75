#pragma once

#include "solver_l1.hpp"

#include <vector>

namespace fracdiff {

/// Monotone iteration u_0 = 0, u_1 = a, and for n >= 1 the solve of
/// dt^alpha (u_{n+1} - a) + A1 u_{n+1} = (b0 + c) u_n + F. For nonnegative
/// data every iterate stays nonnegative and the sequence approaches the
/// solution of the full problem.
inline std::vector<Field> picard_sequence(const ProblemSpec& p, std::size_t n_terms) {
    p.validate();
    const auto n = static_cast<Eigen::Index>(p.grid.size());
    const auto nt = static_cast<Eigen::Index>(p.tgrid.steps() + 1);

    std::vector<Field> seq;
    seq.reserve(n_terms);
    const auto constant_field = [&](const Eigen::VectorXd& slice) {
        Field f;
        f.producer = Producer::l1;
        f.grid = p.grid;
        f.tgrid = p.tgrid;
        f.values = slice.replicate(1, nt);
        return f;
    };
    if (n_terms >= 1) seq.push_back(constant_field(Eigen::VectorXd::Zero(n)));
    if (n_terms >= 2) seq.push_back(constant_field(p.a));

    Eigen::MatrixXd extra(n, nt);
    while (seq.size() < n_terms) {
        const Field& prev = seq.back();
        for (Eigen::Index k = 0; k < nt; ++k) {
            const double t = p.tgrid.t(static_cast<std::size_t>(k));
            for (Eigen::Index i = 0; i < n; ++i) {
                const Point x = p.grid.node(static_cast<std::size_t>(i));
                extra(i, k) = (p.coeffs.b0(x, t) + p.coeffs.c(x, t)) * prev.values(i, k);
            }
        }
        seq.push_back(l1_detail::march(p, OperatorVariant::A1, &extra));
    }
    return seq;
}

} // namespace fracdiff
