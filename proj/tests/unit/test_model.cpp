#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "stablehit/model.hpp"

using namespace stablehit;

TEST_CASE("make_model populates the symmetric case") {
    auto m = make_model(1.5, 0.5);
    CHECK(m.theta == 0.0);
    CHECK(m.sim_beta == Catch::Approx(0.0).margin(1e-15));
    CHECK(m.sim_sigma == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_model at the spectral boundary") {
    // rho = 1 - 1/alpha is the lower boundary; |theta| = pi/alpha - pi/2.
    auto m = make_model(1.5, 1.0 / 3.0);
    CHECK(m.theta == Catch::Approx(pi / 6.0).epsilon(1e-14));
    CHECK(std::fabs(m.sim_beta) == Catch::Approx(1.0).epsilon(1e-9));
    auto hi = make_model(1.5, 2.0 / 3.0);
    CHECK(hi.theta == Catch::Approx(-pi / 6.0).epsilon(1e-14));
    CHECK(std::fabs(hi.sim_beta) == Catch::Approx(1.0).epsilon(1e-9));
    CHECK(hi.sim_beta == Catch::Approx(-m.sim_beta).epsilon(1e-9));
}

TEST_CASE("make_model rejects out-of-range parameters") {
    CHECK_THROWS_AS(make_model(1.5, 0.8), domain_error);
    CHECK_THROWS_AS(make_model(2.0, 0.5), domain_error);
    CHECK_THROWS_AS(make_model(1.0, 0.5), domain_error);
    CHECK_THROWS_AS(make_model(2.5, 0.5), domain_error);
    CHECK_THROWS_AS(make_model(1.5, 0.2), domain_error);
}

TEST_CASE("psi normalization and rotated-ray realness") {
    auto m = make_model(1.5, 0.55);
    CHECK(std::abs(psi(m, 1.0)) == Catch::Approx(1.0).epsilon(1e-14));

    // psi is real and positive on the rays arg(xi) = theta and arg(-xi) = -theta.
    for (double r : {0.3, 1.0, 7.5}) {
        auto on_ray = psi(m, std::polar(r, m.theta));
        CHECK(on_ray.imag() == Catch::Approx(0.0).margin(1e-12 * std::abs(on_ray)));
        CHECK(on_ray.real() == Catch::Approx(std::pow(r, m.alpha)).epsilon(1e-13));
        auto neg_ray = psi(m, -std::polar(r, -m.theta));
        CHECK(neg_ray.imag() == Catch::Approx(0.0).margin(1e-12 * std::abs(neg_ray)));
    }
}

TEST_CASE("psi on a rotated argument gives a pure power") {
    auto m = make_model_theta(1.5, 0.2);
    auto v = psi(m, 2.0 * std::polar(1.0, m.theta));
    CHECK(v.real() == Catch::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
    CHECK(v.imag() == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("psi is Hermitian on the real axis") {
    auto m = make_model(1.7, 0.52);
    for (double x : {0.1, 1.0, 4.2, 100.0}) {
        auto a = psi(m, x);
        auto b = psi(m, -x);
        CHECK(b.real() == Catch::Approx(a.real()).epsilon(1e-13));
        CHECK(b.imag() == Catch::Approx(-a.imag()).epsilon(1e-13));
    }
}

TEST_CASE("psi homogeneity in the cut plane") {
    auto m = make_model(1.3, 0.6);
    const std::complex<double> xis[] = {{1.0, 0.5}, {-2.0, 1.0}, {0.3, -0.7}};
    for (auto xi : xis) {
        for (double c : {0.5, 2.0, 10.0}) {
            auto lhs = psi(m, c * xi);
            auto rhs = std::pow(c, m.alpha) * psi(m, xi);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
        }
    }
}

TEST_CASE("psi rejects the branch cut") {
    auto m = make_model(1.5, 0.5);
    CHECK_THROWS_AS(psi(m, std::complex<double>(0.0, 1.0)), domain_error);
}

TEST_CASE("simulation convention consistency") {
    for (double rho : {0.5, 0.55, 0.6, 2.0 / 3.0 - 1e-9}) {
        auto m = make_model(1.5, rho);
        const double lhs = std::pow(m.sim_sigma, m.alpha) *
                           std::sqrt(1.0 + std::pow(std::tan(m.alpha * m.theta), 2.0));
        CHECK(lhs == Catch::Approx(1.0).epsilon(1e-12));
    }
}
