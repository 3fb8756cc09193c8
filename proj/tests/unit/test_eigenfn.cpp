#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "stablehit/eigenfn.hpp"
#include "stablehit/model.hpp"

using namespace stablehit;

TEST_CASE("g_jump closed forms") {
    auto sym = EigenEvaluator(make_model(1.5, 0.5), Side::plus);
    CHECK(sym.g_jump().jump == Catch::Approx(0.0).margin(1e-15));

    // theta = pi/6 at alpha = 1.5 (the spectral boundary rho = 1/3):
    // jump = 2 sin(2 pi/3) sin(pi/6) = sin(2 pi/3).
    auto b = EigenEvaluator(make_model(1.5, 1.0 / 3.0), Side::plus);
    CHECK(b.g_jump().jump == Catch::Approx(0.8660254037844386).epsilon(1e-12));
    auto j = b.g_jump();
    CHECK(j.right_limit - j.left_limit == j.jump);
}

TEST_CASE("g_eigen approaches the one-sided limits") {
    // theta = +0.05 pi (rho = 0.45): frozen boundary values.
    auto e = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    auto j = e.g_jump();
    CHECK(j.right_limit == Catch::Approx(0.629320391051).epsilon(1e-11));
    CHECK(j.left_limit == Catch::Approx(0.358367949546).epsilon(1e-11));
    // Approach is Hölder alpha - 1 = 1/2.
    CHECK(e.g_eigen(1e-10) == Catch::Approx(j.right_limit).margin(1e-4));
    CHECK(e.g_eigen(-1e-10) == Catch::Approx(j.left_limit).margin(1e-4));
    CHECK_THROWS_AS(e.g_eigen(0.0), boundary_value_error);
}

TEST_CASE("g_eigen splitting and direct routes agree across the switch") {
    auto e = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    // 0.5 - eps uses the split form, 0.5 + eps the direct form.
    double below = e.g_eigen(0.4999999);
    double above = e.g_eigen(0.5000001);
    CHECK(below == Catch::Approx(above).epsilon(1e-6));
    for (double x : {-2.0, -0.499, 0.3, 1.0, 10.0}) {
        CHECK(std::isfinite(e.g_eigen(x)));
        CHECK(e.g_eigen(x) > 0.0);
    }
}

TEST_CASE("g_eigen is symmetric at theta = 0 and completely monotone") {
    auto e = EigenEvaluator(make_model(1.7, 0.5), Side::plus);
    for (double x : {0.01, 0.3, 1.0, 4.0}) {
        CHECK(e.g_eigen(x) == e.g_eigen(-x));
    }

    // Monotonicity proxy on a geometric grid: positive, decreasing, convex
    // (midpoint inequality with the grid's actual spacing weights).
    auto a = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    std::vector<double> xs, g;
    for (double x = 0.05; x < 60.0; x *= 1.6) {
        xs.push_back(x);
        g.push_back(a.g_eigen(x));
    }
    for (size_t i = 0; i + 1 < g.size(); ++i) {
        CHECK(g[i] > 0.0);
        CHECK(g[i + 1] < g[i]);
    }
    for (size_t i = 0; i + 2 < g.size(); ++i) {
        const double lam = (xs[i + 2] - xs[i + 1]) / (xs[i + 2] - xs[i]);
        CHECK(lam * g[i] + (1.0 - lam) * g[i + 2] > g[i + 1]);
    }
}

TEST_CASE("g_eigen is Hölder continuous with exponent alpha - 1") {
    auto e = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    const double expo = 0.5;
    double worst = 0.0;
    std::vector<double> xs;
    for (double x = 1e-6; x <= 1.0; x *= 4.0) xs.push_back(x);
    for (size_t i = 0; i < xs.size(); ++i) {
        for (size_t k = i + 1; k < xs.size(); ++k) {
            const double num = std::fabs(e.g_eigen(xs[i]) - e.g_eigen(xs[k]));
            worst = std::max(worst, num / std::pow(xs[k] - xs[i], expo));
        }
    }
    CHECK(worst < 5.0);
}

TEST_CASE("f_eigen vanishes at the origin and mirrors across sides") {
    auto m = make_model(1.5, 0.45);
    auto p = EigenEvaluator(m, Side::plus);
    auto q = EigenEvaluator(m, Side::minus);
    CHECK(p.f_eigen(0.0) == 0.0);
    CHECK(std::fabs(p.f_eigen(1e-8)) < 2e-4);
    CHECK(std::fabs(p.f_eigen(-1e-8)) < 2e-4);
    for (double x : {-3.0, -1.0, -0.2, 0.7, 2.0, 5.0}) {
        CHECK(p.f_eigen(x) == Catch::Approx(q.f_eigen(-x)).epsilon(1e-12).margin(1e-14));
    }
}

TEST_CASE("f_eigen symmetric form at theta = 0") {
    auto m = make_model(1.5, 0.5);
    auto e = EigenEvaluator(m, Side::plus);
    for (double x : {0.4, 1.3, -2.2}) {
        const double expect =
            std::sin(std::fabs(x) + pi / 1.5 - pi / 2.0) - e.g_eigen(x);
        CHECK(e.f_eigen(x) == Catch::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("closed-form transform values and symmetry") {
    auto e = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    auto v0 = e.g_fourier_closed(0.0);
    CHECK(v0.real() == Catch::Approx(0.4330127018922193).epsilon(1e-14));
    CHECK(v0.imag() == 0.0);
    for (double xi : {0.3, 1.0, 7.0}) {
        auto v = e.g_fourier_closed(xi);
        auto w = e.g_fourier_closed(-xi);
        CHECK(w.real() == Catch::Approx(v.real()).epsilon(1e-13));
        CHECK(w.imag() == Catch::Approx(-v.imag()).epsilon(1e-13).margin(1e-15));
    }
    // |F G(xi)| <= C min(1, 1/|xi|).
    for (double xi : {1e2, 1e4, 1e6}) {
        CHECK(std::abs(e.g_fourier_closed(xi)) * xi < 3.0);
    }
}

TEST_CASE("closed-form transform is regular through psi(xi) = 1") {
    // At theta = 0 the psi pole at xi = +-1 cancels against the rational
    // term; limit value sin(pi/alpha) (-(alpha-1)/2 + 1/(|xi|+1)).
    const double alpha = 1.5;
    auto e = EigenEvaluator(make_model(alpha, 0.5), Side::plus);
    const double lim = std::sin(pi / alpha) * (-(alpha - 1.0) / 2.0 + 0.5);
    CHECK(e.g_fourier_closed(1.0).real() == Catch::Approx(lim).epsilon(1e-12));
    CHECK(e.g_fourier_closed(-1.0).real() == Catch::Approx(lim).epsilon(1e-12));
    for (double d : {1e-12, 1e-7, 9e-4, 2e-3, 0.1}) {
        CHECK(std::abs(e.g_fourier_closed(1.0 + d) -
                       e.g_fourier_closed(1.0 - d)) < 2.0 * d + 1e-12);
    }
}

TEST_CASE("transform quadrature route matches the closed form") {
    for (double rho : {0.5, 0.45}) {
        auto e = EigenEvaluator(make_model(1.5, rho), Side::plus);
        for (double xi : {-10.0, -2.0, -0.5, 0.1, 1.0, 5.0}) {
            auto num = e.g_fourier_numeric(xi);
            auto cf = e.g_fourier_closed(xi);
            CHECK(std::abs(num - cf) <= 1e-6 * std::abs(cf));
        }
    }
}

TEST_CASE("total mass of G matches the transform at zero") {
    auto e = EigenEvaluator(make_model(1.5, 0.45), Side::plus);
    auto v = e.g_fourier_numeric(0.0);
    CHECK(v.real() == Catch::Approx(0.4330127018922193).epsilon(1e-8));
    CHECK(v.imag() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("minus side equals plus side of the mirrored model") {
    auto m = make_model(1.4, 0.57);
    auto mm = make_model(1.4, 1.0 - 0.57);
    auto a = EigenEvaluator(m, Side::minus);
    auto b = EigenEvaluator(mm, Side::plus);
    for (double x : {-1.5, 0.25, 2.0}) {
        CHECK(a.g_eigen(x) == Catch::Approx(b.g_eigen(x)).epsilon(1e-12));
        CHECK(a.f_eigen(x) == Catch::Approx(b.f_eigen(x)).epsilon(1e-12));
    }
}
