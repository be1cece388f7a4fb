#include "doctest.h"

#include <cmath>

#include "vl/laguerre.hpp"

using namespace vl;

namespace {

// Oracle: Laguerre polynomial from its explicit factorial sum, in long double.
long double laguerre_by_sum(int n, long double x) {
    long double sum = 0, binom = 1, factorial = 1, power = 1;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            binom = binom * (n - k + 1) / k;
            factorial *= k;
            power *= x;
        }
        sum += (k % 2 ? -1 : 1) * binom * power / factorial;
    }
    return sum;
}

// The frequently printed closed form with the extra 2^(n-k) factor.
double printed_form(int n, double t, double a) {
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double coeff = std::pow(-1.0, k) * std::tgamma(n + 1) * std::pow(2.0, n - k) /
                             (std::tgamma(k + 1) * std::pow(std::tgamma(n - k + 1), 2));
        sum += coeff * std::pow(2 * a * t, n - k);
    }
    return std::sqrt(2 * a) * sum * std::exp(-a * t);
}

int sign_changes(int n, double a) {
    const int steps = 400000;
    const double horizon = 40.0 / a;
    int changes = 0;
    double previous = 0.0;
    for (int j = 0; j <= steps; ++j) {
        const double v = eval_laguerre(n, horizon * j / steps, a);
        if (v == 0.0) continue;
        if (previous != 0.0 && (v > 0) != (previous > 0)) ++changes;
        previous = v;
    }
    return changes;
}

} // namespace

TEST_SUITE("laguerre") {

TEST_CASE("eval_laguerre examples") {
    CHECK(eval_laguerre(0, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(eval_laguerre(1, 1.0, 0.5)) < 1e-15);
    CHECK(eval_laguerre(2, 0.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(eval_laguerre(3, -1.0, 1.0) == 0.0);
}

TEST_CASE("eval_laguerre rejects bad time scales") {
    CHECK_THROWS_AS(eval_laguerre(0, 1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(eval_laguerre(0, 1.0, -1.0), InvalidParameter);
    CHECK_THROWS_AS(eval_laguerre(0, 1.0, std::nan("")), InvalidParameter);
    CHECK_THROWS_AS(eval_laguerre(0, 1.0, INFINITY), InvalidParameter);
}

TEST_CASE("recurrence matches the factorial sum") {
    for (int n = 0; n <= 12; ++n)
        for (double x : {0.0, 0.3, 1.0, 2.5, 7.0, 15.0}) {
            const double expected = static_cast<double>(laguerre_by_sum(n, x));
            CHECK(laguerre_polynomial(n, x) ==
                  doctest::Approx(expected).epsilon(1e-10).scale(1.0));
        }
}

TEST_CASE("eval_laguerre_all agrees with single evaluations") {
    const auto all = eval_laguerre_all<double>(7, 3.2, 0.4);
    for (int r = 0; r < 7; ++r) CHECK(all(r) == doctest::Approx(eval_laguerre(r, 3.2, 0.4)));
}

TEST_CASE("value at the origin is sqrt(2a) for every order") {
    for (double a : {0.01, 0.5, 3.0, 50.0})
        for (int n = 0; n < 15; ++n)
            CHECK(eval_laguerre(n, 0.0, a) == doctest::Approx(std::sqrt(2 * a)).epsilon(1e-14));
}

TEST_CASE("build_basis_matrix examples") {
    auto b = build_basis_matrix({1, 0.5}, 2);
    REQUIRE(b.samples.rows() == 3);
    REQUIRE(b.samples.cols() == 1);
    CHECK(b.samples(0, 0) == doctest::Approx(1.0));
    CHECK(b.samples(1, 0) == doctest::Approx(std::exp(-0.5)));
    CHECK(b.samples(2, 0) == doctest::Approx(std::exp(-1.0)));

    b = build_basis_matrix({2, 0.5}, 0);
    REQUIRE(b.samples.rows() == 1);
    CHECK(b.samples(0, 0) == doctest::Approx(1.0));
    CHECK(b.samples(0, 1) == doctest::Approx(1.0));

    CHECK(build_basis_matrix({5, 2.0}, 0).samples.rows() == 1);
    CHECK(build_basis_matrix<float>({3, 0.25}, 10).samples.allFinite());
    CHECK_THROWS_AS(build_basis_matrix({0, 1.0}, 3), InvalidParameter);
}

TEST_CASE("orthonormality defect examples") {
    CHECK(continuous_orthonormality_defect(0, 0, 1.0, 1e-3, 40.0) < 1e-4);
    CHECK(continuous_orthonormality_defect(0, 1, 1.0, 1e-3, 40.0) < 1e-4);
    // Coarser grids and shorter horizons are worse.
    CHECK(continuous_orthonormality_defect(2, 2, 1.0, 1e-4, 60.0) <
          continuous_orthonormality_defect(2, 2, 1.0, 1e-1, 60.0));
}

TEST_CASE("orthonormality over orders 0..6 and three decades of a") {
    for (double a : {0.1, 1.0, 10.0})
        for (int m = 0; m <= 6; ++m)
            for (int n = m; n <= 6; ++n)
                CHECK(continuous_orthonormality_defect(m, n, a, 1e-3 / a, 40.0 / a) < 1e-4);
}

TEST_CASE("printed closed form is not normalized") {
    // Its l_1 is sqrt(2a)(4at - 1)e^{-at}, whose squared integral is 5.
    const double a = 0.7, dt = 1e-3 / a, horizon = 60.0 / a;
    double integral = 0.0;
    const auto steps = static_cast<int>(horizon / dt);
    for (int j = 0; j <= steps; ++j) {
        const double v = printed_form(1, j * dt, a);
        integral += (j == 0 || j == steps ? 0.5 : 1.0) * dt * v * v;
    }
    CHECK(integral == doctest::Approx(5.0).epsilon(0.002));
    // The printed form and the orthonormal one agree at order 0.
    CHECK(printed_form(0, 1.3, a) == doctest::Approx(eval_laguerre(0, 1.3, a)));
}

TEST_CASE("l_n has exactly n sign changes") {
    for (double a : {0.5, 2.0})
        for (int n = 0; n <= 8; ++n) CHECK(sign_changes(n, a) == n);
}

TEST_CASE("project_onto_basis examples") {
    const LaguerreSeriesSpec spec{4, 0.3};
    const auto basis = build_basis_matrix(spec, 60);

    auto p = project_onto_basis(basis.samples.col(0), spec);
    CHECK(p.coefficients(0) == doctest::Approx(1.0).epsilon(1e-9));
    for (int r = 1; r < 4; ++r) CHECK(std::abs(p.coefficients(r)) < 1e-9);
    CHECK(p.residual_sse < 1e-18);
    CHECK_FALSE(p.rank_deficient);

    p = project_onto_basis(Eigen::VectorXd::Zero(61), spec);
    CHECK(p.coefficients.isZero(0.0));
    CHECK(p.residual_sse == 0.0);

    Eigen::VectorXd decay(101);
    for (int t = 0; t <= 100; ++t) decay(t) = std::exp(-0.3 * t) * std::cos(0.4 * t);
    const double sse4 = project_onto_basis(decay, {4, 0.3}).residual_sse;
    const double sse1 = project_onto_basis(decay, {1, 0.3}).residual_sse;
    CHECK(sse4 < sse1);
}

TEST_CASE("projection flags degenerate sample matrices") {
    // At a huge time scale every column is sqrt(2a) at t = 0 and ~0 after.
    const auto p = project_onto_basis(Eigen::VectorXd::Ones(4), {3, 1e3});
    CHECK(p.rank_deficient);
    CHECK(p.coefficients.allFinite());
    CHECK_THROWS_AS(project_onto_basis(Eigen::VectorXd::Ones(2), {3, 1.0}), InvalidParameter);
}

TEST_CASE("nested projections never increase the residual") {
    Eigen::VectorXd signal(81);
    for (int t = 0; t <= 80; ++t) signal(t) = std::exp(-0.1 * t) - 0.5 * std::exp(-0.6 * t) + 0.01 * t * std::exp(-0.2 * t);
    for (double a : {0.05, 0.3, 1.5}) {
        double previous = INFINITY;
        for (int r = 1; r <= 10; ++r) {
            const double sse = project_onto_basis(signal, {r, a}).residual_sse;
            CHECK(sse <= previous + 1e-12);
            previous = sse;
        }
    }
}

TEST_CASE("Bessel inequality for the continuous-grid projection") {
    // Quadrature tolerance: the weighted Gram matrix differs from I by
    // O(dt^2) under the trapezoid rule; dt = 1e-4/a keeps that below 1e-8.
    for (double a : {0.2, 1.0}) {
        const double dt = 1e-4 / a;
        const auto count = static_cast<Eigen::Index>(std::llround(40.0 / a / dt)) + 1;
        Eigen::VectorXd f(count);
        for (Eigen::Index j = 0; j < count; ++j) {
            const double t = j * dt;
            f(j) = std::exp(-0.25 * t) * std::cos(0.3 * t) + (t < 2 ? 1.0 : 0.0);
        }
        for (int r : {1, 3, 6}) {
            const auto p = project_onto_basis_continuous(f, dt, {r, a});
            CHECK(p.coefficients.squaredNorm() <= p.signal_energy + 1e-8);
        }
        // A basis element is captured completely.
        Eigen::VectorXd l2(count);
        for (Eigen::Index j = 0; j < count; ++j) l2(j) = eval_laguerre(2, j * dt, a);
        const auto p = project_onto_basis_continuous(l2, dt, {4, a});
        CHECK(p.coefficients.squaredNorm() <= p.signal_energy + 1e-8);
        CHECK(p.coefficients(2) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

} // TEST_SUITE
