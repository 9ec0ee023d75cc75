#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fracdiff/checks.hpp>

#include <cmath>

using namespace fracdiff;

namespace {

Field make_field(const SpaceGrid& g, const TimeGrid& tg, double fill) {
    Field f;
    f.grid = g;
    f.tgrid = tg;
    f.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(g.size()),
                                         static_cast<Eigen::Index>(tg.steps() + 1), fill);
    return f;
}

ProblemSpec positive_instance(double alpha, double c_amp, std::size_t n, std::size_t nt) {
    SpaceGrid g = SpaceGrid::interval(1.0, n);
    TimeGrid tg = TimeGrid::graded(1.0, nt, 2.0 / alpha);
    CoefficientSet co;
    co.c = const_tfield(c_amp);
    co.sigma = const_field(0.5);
    return ProblemSpec::build(alpha, g, tg, co,
                              [](const Point& q) { return 1.0 + 0.5 * std::cos(M_PI * q.x); },
                              [](const Point& q, double t) { return 0.5 * t * (1.0 + q.x); });
}

} // namespace

TEST_CASE("positivity check and its witness") {
    SpaceGrid g = SpaceGrid::interval(1.0, 5);
    TimeGrid tg = TimeGrid::uniform(1.0, 3);
    Field f = make_field(g, tg, 2.0);
    CheckReport ok = check_positivity(f, 1e-12);
    CHECK(ok.pass);
    CHECK(ok.check_name == "positivity");
    CHECK(ok.worst_violation == 2.0);

    f.values(3, 2) = -0.25;
    CheckReport bad = check_positivity(f, 1e-12);
    CHECK(!bad.pass);
    CHECK(bad.worst_violation == -0.25);
    CHECK(bad.witness.ix == 3);
    CHECK(bad.witness.it == 2);
    // witness points back at the offending entry
    CHECK(f.values(static_cast<Eigen::Index>(bad.witness.ix),
                   static_cast<Eigen::Index>(bad.witness.it)) == bad.worst_violation);
    // a tolerance wider than the dip flips the verdict, not the margin
    CheckReport loose = check_positivity(f, 0.5);
    CHECK(loose.pass);
    CHECK(loose.worst_violation == -0.25);
}

TEST_CASE("comparison check") {
    SpaceGrid g = SpaceGrid::interval(1.0, 7);
    TimeGrid tg = TimeGrid::uniform(1.0, 4);
    Field a = make_field(g, tg, 1.0);
    Field b = make_field(g, tg, 1.0);
    CheckReport same = check_comparison(a, b, 0.0);
    CHECK(same.pass);
    CHECK(same.worst_violation == 0.0);

    b.values(2, 1) = 1.5;
    CheckReport bad = check_comparison(a, b, 1e-12);
    CHECK(!bad.pass);
    CHECK(bad.worst_violation == -0.5);
    CHECK(bad.witness.ix == 2);
    CHECK(bad.witness.it == 1);

    // ordering is transitive through the reported margins
    Field c = make_field(g, tg, 0.25);
    CHECK(check_comparison(a, c, 0.0).pass);
    CHECK(check_comparison(b, c, 0.0).pass);

    Field wrong = make_field(SpaceGrid::interval(1.0, 5), tg, 1.0);
    CHECK_THROWS_AS(check_comparison(a, wrong, 0.0), std::invalid_argument);
}

TEST_CASE("fingerprint is stable and data sensitive") {
    ProblemSpec p = positive_instance(0.5, 0.0, 11, 16);
    CHECK(fingerprint(p) == fingerprint(p));
    ProblemSpec q = p;
    q.alpha = 0.6;
    CHECK(fingerprint(q) != fingerprint(p));
    ProblemSpec r = p;
    r.F(3, 2) += 1e-9;
    CHECK(fingerprint(r) != fingerprint(p));
}

TEST_CASE("zeroth-order monotonicity") {
    ProblemSpec p = positive_instance(0.5, 0.0, 21, 48);
    SUBCASE("ordered coefficients pass") {
        // larger c weakens the absorption, so the c1 solution dominates
        CheckReport r = check_c_monotonicity(p, const_tfield(0.0), const_tfield(-0.5), 1e-10);
        CHECK(r.pass);
        CHECK(r.check_name == "c_monotonicity");
        CHECK(r.fingerprint == fingerprint(p));
    }
    SUBCASE("reversed ordering is a precondition violation") {
        CHECK_THROWS_AS(check_c_monotonicity(p, const_tfield(-0.5), const_tfield(0.0), 1e-10),
                        PreconditionError);
    }
}

TEST_CASE("Robin coefficient monotonicity") {
    ProblemSpec p = positive_instance(0.5, -1.0, 21, 48);
    SUBCASE("ordered boundary coefficients pass") {
        CheckReport r = check_sigma_monotonicity(p, const_field(1.0), const_field(2.0), 0.5, 1e-10);
        CHECK(r.pass);
        CHECK(r.check_name == "sigma_monotonicity");
    }
    SUBCASE("sigma0 must be positive") {
        CHECK_THROWS_AS(check_sigma_monotonicity(p, const_field(1.0), const_field(2.0), 0.0, 1e-10),
                        PreconditionError);
    }
    SUBCASE("requires strictly negative c") {
        ProblemSpec q = positive_instance(0.5, 0.0, 21, 48);
        CHECK_THROWS_AS(check_sigma_monotonicity(q, const_field(1.0), const_field(2.0), 0.5, 1e-10),
                        PreconditionError);
    }
    SUBCASE("reversed sigma ordering is rejected") {
        CHECK_THROWS_AS(check_sigma_monotonicity(p, const_field(2.0), const_field(1.0), 0.5, 1e-10),
                        PreconditionError);
    }
}

TEST_CASE("power-source lower bound") {
    const double alpha = 0.5, delta = 2.0;
    SpaceGrid g = SpaceGrid::interval(1.0, 21);
    TimeGrid tg = TimeGrid::uniform(1.0, 64);
    CoefficientSet co;
    ProblemSpec p = ProblemSpec::build(alpha, g, tg, co, const_field(0.0),
                                       [delta](const Point&, double) { return delta; });
    Field u = solve_mild(p, 6, 1e-12, 20);
    SUBCASE("the exact-source case sits on the bound") {
        CheckReport r = check_example_bound(p, u, delta, 0.0, 1e-8);
        CHECK(r.pass);
        CHECK(std::abs(r.worst_violation) < 1e-8);
    }
    SUBCASE("a dominating source leaves a strict margin") {
        ProblemSpec q = ProblemSpec::build(
            alpha, g, tg, co, const_field(0.0),
            [delta](const Point&, double t) { return delta * (1.0 + t); });
        Field uq = solve_mild(q, 6, 1e-12, 20);
        CheckReport r = check_example_bound(q, uq, delta, 0.0, 1e-10);
        CHECK(r.pass);
        CHECK(r.worst_violation >= 0.0); // pinned at t = 0 where both sides vanish
        const double scale = delta / gamma_fn(q.alpha + 1.0);
        const Eigen::Index last = uq.values.cols() - 1;
        CHECK(uq.values.col(last).minCoeff() - scale > 1e-3);
    }
    SUBCASE("delta = 0 is trivially satisfied by any nonnegative field") {
        CheckReport r = check_example_bound(p, u, 0.0, 0.0, 1e-12);
        CHECK(r.pass);
    }
    SUBCASE("hypothesis violations") {
        ProblemSpec bad = p;
        bad.a.setConstant(1.0);
        CHECK_THROWS_AS(check_example_bound(bad, u, delta, 0.0, 1e-8), PreconditionError);
        ProblemSpec robin = p;
        robin.coeffs.sigma = const_field(1.0);
        CHECK_THROWS_AS(check_example_bound(robin, u, delta, 0.0, 1e-8), PreconditionError);
        ProblemSpec drift = p;
        drift.coeffs.c = const_tfield(0.5);
        CHECK_THROWS_AS(check_example_bound(drift, u, delta, 0.0, 1e-8), PreconditionError);
        ProblemSpec weak = p;
        weak.F.array() -= 0.5;
        CHECK_THROWS_AS(check_example_bound(weak, u, delta, 0.0, 1e-8), PreconditionError);
    }
}

TEST_CASE("barrier certificate") {
    ProblemSpec p = positive_instance(0.5, 0.0, 31, 64);
    Field u = solve_l1(p);
    SUBCASE("constructed parameters satisfy the invariants") {
        BarrierParams bp = make_barrier_params(p, 0.1);
        CHECK(bp.M >= 1.0);
        CHECK((bp.M + bp.psi.array()).minCoeff() >= 0.0);
        CHECK_THROWS_AS(make_barrier_params(p, 0.0), std::invalid_argument);
    }
    SUBCASE("certificate passes on a positivity-preserving instance") {
        BarrierParams bp = make_barrier_params(p, 0.1);
        CheckReport r = barrier_certificate(u, p, bp, 1e-8);
        CHECK(r.pass);
        CHECK(r.check_name == "barrier");
        CHECK(r.fingerprint == fingerprint(p));
    }
    SUBCASE("degenerate barrier reduces to the raw inequalities") {
        BarrierParams bp = make_barrier_params(p, 0.1);
        bp.epsilon = 0.0; // w = u; flux and residual margins are only O(h^2)
        CheckReport r = barrier_certificate(u, p, bp, 5e-3);
        CHECK(r.pass);
    }
    SUBCASE("malformed parameters are rejected") {
        BarrierParams bp = make_barrier_params(p, 0.1);
        bp.psi.conservativeResize(bp.psi.rows() - 1, bp.psi.cols());
        CHECK_THROWS_AS(barrier_certificate(u, p, bp, 1e-8), std::invalid_argument);
        BarrierParams low = make_barrier_params(p, 0.1);
        low.M = -100.0;
        CHECK_THROWS_AS(barrier_certificate(u, p, low, 1e-8), std::invalid_argument);
    }
}

TEST_CASE("discrete extremum principle probe") {
    TimeGrid tg = TimeGrid::uniform(1.0, 128);
    SUBCASE("parabola with an interior minimum") {
        TimeSignal y = TimeSignal::sample(tg, [](double t) { return (t - 0.6) * (t - 0.6); });
        CheckReport r = extremum_principle_probe(y, 0.5);
        CHECK(r.pass);
        CHECK(r.check_name == "extremum");
        CHECK(tg.t(r.witness.it) == doctest::Approx(0.6).epsilon(1e-2));
    }
    SUBCASE("oscillatory signals keep the sign property") {
        for (double alpha : {0.3, 0.5, 0.8}) {
            TimeSignal y = TimeSignal::sample(
                tg, [](double t) { return std::cos(5.0 * t) + 0.3 * std::sin(9.0 * t); });
            CHECK(extremum_principle_probe(y, alpha).pass);
        }
    }
    SUBCASE("minimum at the initial node violates the hypothesis") {
        TimeSignal y = TimeSignal::sample(tg, [](double t) { return t; });
        CHECK_THROWS_AS(extremum_principle_probe(y, 0.5), PreconditionError);
        TimeSignal c = TimeSignal::sample(tg, [](double) { return 4.0; });
        CHECK_THROWS_AS(extremum_principle_probe(c, 0.5), PreconditionError);
    }
}
