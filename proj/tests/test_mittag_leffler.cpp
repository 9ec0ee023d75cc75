#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fracdiff/mittag_leffler.hpp>
#include <fracdiff/relaxation_table.hpp>

#include <mpfr.h>

#include <cmath>
#include <random>

using namespace fracdiff;

// e^{x^2} erfc(x) in 256-bit arithmetic; closed form of E_{1/2,1}(-x)
static double half_order_reference(double x) {
    mpfr_t t, r;
    mpfr_init2(t, 256);
    mpfr_init2(r, 256);
    mpfr_set_d(t, x, MPFR_RNDN);
    mpfr_sqr(r, t, MPFR_RNDN);
    mpfr_exp(r, r, MPFR_RNDN);
    mpfr_erfc(t, t, MPFR_RNDN);
    mpfr_mul(r, r, t, MPFR_RNDN);
    const double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(t);
    mpfr_clear(r);
    return out;
}

TEST_CASE("frozen oracle values") {
    CHECK(ml(1.0, 1.0, -1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(ml(0.5, 1.0, -1.0) == doctest::Approx(0.42758357615580700).epsilon(1e-13));
    CHECK(ml(0.5, 1.0, -2.0) == doctest::Approx(0.25539567631050574).epsilon(1e-13));
    CHECK(ml(0.5, 0.5, -1.0) == doctest::Approx(0.13660600739194928).epsilon(1e-13));
    CHECK(ml(0.3, 1.0, -1.0) == doctest::Approx(0.45659440832969067).epsilon(1e-13));
    CHECK(ml(0.8, 1.0, -5.0) == doctest::Approx(0.057595384762152254).epsilon(1e-12));
    CHECK(ml(0.5, 0.5, -3.0) == doctest::Approx(0.027186130003586436).epsilon(1e-12));
}

TEST_CASE("classical special cases") {
    for (double z : {-30.0, -2.0, -0.3, 0.0, 1.0, 10.0}) {
        CHECK(ml(1.0, 1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-14));
        if (z != 0.0) CHECK(ml(1.0, 2.0, z) == doctest::Approx(std::expm1(z) / z).epsilon(1e-13));
    }
    CHECK(ml(0.5, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ml(0.7, 0.4, 0.0) == doctest::Approx(inv_gamma(0.4)).epsilon(1e-15));
}

TEST_CASE("half order closed form across all branches") {
    for (int i = 0; i <= 60; ++i) {
        const double x = 0.05 * std::pow(2000.0, i / 60.0);
        const double ref = half_order_reference(x);
        CHECK(std::abs(ml(0.5, 1.0, -x) - ref) <= 1e-12 * std::abs(ref));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((MLParams{0.0, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((MLParams{1.2, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((MLParams{0.5, 0.0}.validate()), std::domain_error);
    CHECK_THROWS_AS(ml(0.5, -1.0, 1.0), std::domain_error);
}

TEST_CASE("complete monotonicity of the relaxation profile") {
    for (double alpha : {0.2, 0.5, 0.9}) {
        double prev = relaxation(alpha, 3.0, 0.0);
        CHECK(prev == 1.0);
        for (int k = 1; k <= 60; ++k) {
            const double v = relaxation(alpha, 3.0, 0.05 * k);
            CHECK(v > 0.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("relaxation bounds on the negative axis") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ua(0.05, 1.0), ut(0.0, 100.0), ul(0.0, 50.0);
    for (int i = 0; i < 300; ++i) {
        const double v = relaxation(ua(rng), ul(rng), ut(rng));
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("kernel segment additivity spans the branch cuts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.1, 0.95), ul(0.01, 200.0);
    for (int i = 0; i < 50; ++i) {
        const double alpha = ua(rng), lam = ul(rng);
        const double whole = k_segment(alpha, lam, 0.0, 2.0).value;
        const double split = k_segment(alpha, lam, 0.0, 0.03).value +
                             k_segment(alpha, lam, 0.03, 0.7).value +
                             k_segment(alpha, lam, 0.7, 2.0).value;
        CHECK(whole == doctest::Approx(split).epsilon(1e-12));
        CHECK(lam * whole <= 1.0 + 1e-12);
    }
}

TEST_CASE("kernel identity against the relaxation profile") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(0.1, 0.95), ul(1e-6, 100.0), uT(0.05, 5.0);
    for (int i = 0; i < 40; ++i) {
        const double alpha = ua(rng), lam = ul(rng), T = uT(rng);
        const double lhs = lam * k_segment(alpha, lam, 0.0, T).value;
        const double rhs = 1.0 - relaxation(alpha, lam, T);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("k_kernel and k_segment domain errors") {
    CHECK_THROWS_AS(k_kernel(0.5, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(k_kernel(0.5, -1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(k_segment(0.5, -1.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(k_segment(0.5, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK(k_segment(0.5, 3.0, 0.4, 0.4).value == 0.0);
}

TEST_CASE("lambda zero segment is the power rule") {
    const double v = k_segment(0.6, 0.0, 0.0, 1.5).value;
    CHECK(v == doctest::Approx(std::pow(1.5, 0.6) / gamma_fn(1.6)).epsilon(1e-14));
}

TEST_CASE("cached relaxation table matches direct evaluation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.15, 0.95);
    std::uniform_real_distribution<double> ull(-2.0, 4.0);
    for (int rep = 0; rep < 8; ++rep) {
        const double alpha = ua(rng);
        const double lam = std::pow(10.0, ull(rng));
        RelaxationTable tab(alpha, lam, 1e-10, 3.0);
        for (int i = 0; i <= 200; ++i) {
            const double tau = 1e-10 * std::pow(3e10, i / 200.0);
            const double direct = ml(alpha, 1.0, -lam * std::pow(tau, alpha));
            CHECK(std::abs(tab(tau) - direct) <= 5e-11 * direct);
        }
        // segment forms agree with k_segment
        for (double lo : {0.0, 0.01, 0.4})
            CHECK(tab.segment(lo, 1.7) ==
                  doctest::Approx(k_segment(alpha, lam, lo, 1.7).value).epsilon(5e-10));
    }
}
