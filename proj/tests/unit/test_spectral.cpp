#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "stablehit/eigenfn.hpp"
#include "stablehit/model.hpp"
#include "stablehit/spectral.hpp"

using namespace stablehit;

namespace {

RayTransformPair pair_a() {
    return RayTransformPair(make_model(1.5, 0.55), TestFunction::explog(+1, 1.0),
                            TestFunction::explog(-1, 2.0));
}

RayTransformPair pair_b() {
    return RayTransformPair(
        make_model(1.5, 0.55),
        TestFunction::explog(+1, 1.0) + TestFunction::explog(-1, 1.5),
        TestFunction::explog(-1, 1.0) + TestFunction::explog(+1, 1.2));
}

// Boundary value by Richardson extrapolation in the ladder eps = 1e-3,
// 1e-4, 1e-5 (exact for expansions in powers of eps through eps^2).
ComplexValue boundary_ladder(const RayTransformPair& pr, double s, int j) {
    const double sa = std::pow(s, pr.model().alpha);
    auto at = [&](double eps) {
        return phi_ray(pr, ComplexValue{-sa, eps}, j);
    };
    const ComplexValue a = at(1e-3);
    const ComplexValue b = at(1e-4);
    const ComplexValue c = at(1e-5);
    const ComplexValue r1 = (10.0 * b - a) / 9.0;
    const ComplexValue r2 = (10.0 * c - b) / 9.0;
    return (100.0 * r2 - r1) / 99.0;
}

double sine_pairing(const StableModel& m, const TestFunction& w, double sign,
                    double s) {
    const double sth = std::sin(m.theta);
    const double cth = std::cos(m.theta);
    auto val = [&](double x) {
        const double wx = w(x);
        if (wx == 0.0) return 0.0;
        return std::exp(sign * s * x * sth) * std::sin(s * x * cth) * wx;
    };
    const QuadResult pos = integrate_to_inf(val, 0.0, {});
    const QuadResult neg =
        integrate_to_inf([&](double x) { return val(-x); }, 0.0, {});
    return pos.value + neg.value;
}

double eigen_pairing(const StableModel& m, Side side, const TestFunction& w,
                     double s) {
    const EigenEvaluator ev(m, side, {});
    auto val = [&](double x) {
        const double wx = w(x);
        if (wx == 0.0) return 0.0;
        return ev.f_eigen(s * x) * wx;
    };
    const QuadResult pos = integrate_to_inf(val, 0.0, {});
    const QuadResult neg =
        integrate_to_inf([&](double x) { return val(-x); }, 0.0, {});
    return pos.value + neg.value;
}

} // namespace

TEST_CASE("phi_0 along the ray matches the resolvent at the origin") {
    const auto pr = pair_a();
    const ComplexValue p0 = phi_ray(pr, ComplexValue{1.0, 0.0}, 0);
    CHECK(p0.real() == Catch::Approx(0.7603228390907436).epsilon(1e-10));
    CHECK(std::fabs(p0.imag()) < 1e-12);

    // phi_0(lambda) = lambda^{1/alpha - 1} phi_0(1) by scaling.
    const ComplexValue p5 = phi_ray(pr, ComplexValue{5.0, 0.0}, 0);
    CHECK(p5.real() ==
          Catch::Approx(std::pow(5.0, 1.0 / 1.5 - 1.0) * p0.real()).epsilon(1e-10));

    RayTransformPair sym(make_model(1.5, 0.5), TestFunction::explog(+1, 1.0),
                         TestFunction::explog(-1, 1.0));
    CHECK(phi_ray(sym, ComplexValue{1.0, 0.0}, 0).real() ==
          Catch::Approx(0.7698003589).epsilon(1e-9));
}

TEST_CASE("ray values are frozen") {
    const auto pr = pair_a();
    const double vals[5] = {7.603228390908e-01, 2.472063362524e-01,
                            1.722890602227e-01, 6.796941036774e-02,
                            1.195248549809e-02};
    for (int j = 0; j <= 4; ++j) {
        const ComplexValue p = phi_ray(pr, ComplexValue{1.0, 0.0}, j);
        CHECK(p.real() == Catch::Approx(vals[j]).epsilon(1e-9));
        CHECK(std::fabs(p.imag()) < 1e-11);
    }
}

TEST_CASE("Fourier and ray routes agree for both pairs") {
    const auto pa = pair_a();
    for (double lam : {0.5, 1.0, 5.0}) {
        for (int j = 0; j <= 4; ++j) {
            const double ray = phi_ray(pa, ComplexValue{lam, 0.0}, j).real();
            const double fou = phi_fourier(pa, lam, j);
            CHECK(std::fabs(fou - ray) <= 1e-6 * std::fabs(ray));
        }
    }
    const auto pb = pair_b();
    for (int j = 0; j <= 4; ++j) {
        const double ray = phi_ray(pb, ComplexValue{1.0, 0.0}, j).real();
        const double fou = phi_fourier(pb, 1.0, j);
        CHECK(std::fabs(fou - ray) <= 1e-6 * std::fabs(ray));
    }
}

TEST_CASE("phi_j is conjugate-symmetric and phi_4 decays in lambda") {
    const auto pr = pair_a();
    const ComplexValue lam{0.3, 0.7};
    for (int j : {1, 4}) {
        const ComplexValue up = phi_ray(pr, lam, j);
        const ComplexValue dn = phi_ray(pr, std::conj(lam), j);
        CHECK(std::abs(dn - std::conj(up)) <= 1e-12 * std::abs(up));
    }
    double prev = std::numeric_limits<double>::infinity();
    for (double l : {1.0, 10.0, 100.0}) {
        const double v = std::abs(phi_ray(pr, ComplexValue{l, 0.0}, 4));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("phi_ray and kl_value reject out-of-domain arguments") {
    const auto pr = pair_a();
    CHECK_THROWS_AS(phi_ray(pr, ComplexValue{-1.0, 0.0}, 0), domain_error);
    CHECK_THROWS_AS(phi_ray(pr, ComplexValue{0.0, 0.0}, 0), domain_error);
    CHECK_THROWS_AS(phi_ray(pr, ComplexValue{1.0, 0.0}, 5), domain_error);
    CHECK_THROWS_AS(kl_value(pr, 0, 0.0), domain_error);
    CHECK_THROWS_AS(kl_value(pr, 4, 1.0), domain_error);
    CHECK_THROWS_AS(phi_fourier(pr, -1.0, 0), domain_error);
    CHECK_THROWS_AS(bilinear_timedomain(pr, 0.0), domain_error);
}

TEST_CASE("K_0 from the principal-value engine matches the closed form") {
    const auto pr = pair_a();
    const double alpha = 1.5;
    for (double s : {0.5, 1.0, 2.0}) {
        const double closed = kl_value(pr, 0, s).K;
        const QuadResult pv = integrate_pv_power(
            [&](double r) { return pr.h(0, r); }, s, alpha, {});
        CHECK(pv.value / pi == Catch::Approx(closed).epsilon(1e-8));
    }
}

TEST_CASE("boundary ladder converges to K - iL") {
    const auto pr = pair_a();
    const double alpha = 1.5;
    for (double s : {0.5, 2.0}) {
        for (int j : {1, 3}) {
            const ComplexValue ext = boundary_ladder(pr, s, j);
            const KLPoint kl = kl_value(pr, j, s);
            CHECK(std::abs(ext - ComplexValue{kl.K, -kl.L}) <= 1e-5);
        }
    }
    // And for the assembled phi_4.
    const ComplexValue e4 = boundary_ladder(pr, 1.0, 4);
    CHECK(e4.imag() == Catch::Approx(im_phi4_neg(pr, 1.0)).epsilon(1e-6));
    CHECK(im_phi4_neg(pr, 1.0) ==
          Catch::Approx(-3.6438983670e-02).epsilon(1e-8));
    (void)alpha;
}

TEST_CASE("x-space forms of K_1 and K_2 match the principal values") {
    const auto pr = pair_a();
    const auto& m = pr.model();
    for (double s : {0.5, 1.0, 2.0}) {
        const double pv = kl_value(pr, 1, s).K;
        const double xs = k1_xspace(m, pr.f(), s);
        CHECK(std::fabs(xs - pv) <= 1e-5 * std::max(std::fabs(pv), 1e-3));
    }
    CHECK(k1_xspace(m, pr.f(), 1.0) ==
          Catch::Approx(-1.531319860869e-01).epsilon(1e-8));
    CHECK(k2_xspace(m, pr.g(), 1.0) ==
          Catch::Approx(-1.603407954385e-02).epsilon(1e-7));
    CHECK(k2_xspace(m, pr.g(), 1.0) ==
          Catch::Approx(kl_value(pr, 2, 1.0).K).epsilon(1e-5));
}

TEST_CASE("resolvent-quotient identities on the cut") {
    const auto pr = pair_a();
    const auto& m = pr.model();
    const double alpha = m.alpha;
    const double cth = std::cos(m.theta);
    const double spa = std::sin(pi / alpha);
    for (double s : {0.5, 1.0}) {
        const KLPoint p0 = kl_value(pr, 0, s);
        const KLPoint p1 = kl_value(pr, 1, s);
        const KLPoint p2 = kl_value(pr, 2, s);
        const ComplexValue z0{p0.K, -p0.L};
        const ComplexValue z1{p1.K, -p1.L};
        const ComplexValue z2{p2.K, -p2.L};

        // Im 1/(K_0 - iL_0) = alpha s^{alpha-1} sin^2(pi/alpha) / cos theta.
        const double rhs0 =
            alpha * std::pow(s, alpha - 1.0) * spa * spa / cth;
        CHECK((1.0 / z0).imag() == Catch::Approx(rhs0).epsilon(1e-12));

        // Im z_j/z_0 = -(sin(pi/alpha)/cos theta) int F^{+-}(s x) w(x) dx.
        const double rhs1 =
            -(spa / cth) * eigen_pairing(m, Side::plus, pr.f(), s);
        const double rhs2 =
            -(spa / cth) * eigen_pairing(m, Side::minus, pr.g(), s);
        CHECK((z1 / z0).imag() == Catch::Approx(rhs1).margin(1e-5));
        CHECK((z2 / z0).imag() == Catch::Approx(rhs2).margin(1e-5));
    }
}

TEST_CASE("sine-product identity for the L combination") {
    const auto pr = pair_a();
    const auto& m = pr.model();
    for (double s : {0.7, 1.5}) {
        const KLPoint p0 = kl_value(pr, 0, s);
        const KLPoint p1 = kl_value(pr, 1, s);
        const KLPoint p2 = kl_value(pr, 2, s);
        const KLPoint p3 = kl_value(pr, 3, s);
        const double lhs = p3.L - p1.L * p2.L / p0.L;
        const double rhs = sine_pairing(m, pr.f(), -1.0, s) *
                           sine_pairing(m, pr.g(), +1.0, s) /
                           (m.alpha * std::pow(s, m.alpha - 1.0) *
                            std::cos(m.theta));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("K_1 stays within the s^{-alpha} log envelope") {
    // The principal-value route scales to every s; the x-space form is only
    // usable while e^{s |x sin theta|} stays within f's decay reach.
    const auto pr = pair_a();
    for (double s : {1.0, 10.0, 100.0, 1000.0}) {
        const double k1 = kl_value(pr, 1, s).K;
        const double ratio =
            std::fabs(k1) * std::pow(s, pr.model().alpha) / std::log1p(s);
        CHECK(ratio < 0.5);
        CHECK(ratio > 0.01);
    }
    CHECK(kl_value(pr, 1, 1000.0).K ==
          Catch::Approx(-1.740418e-05).epsilon(1e-5));
}

TEST_CASE("kl_table is deterministic across thread counts") {
    const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
    const SpectralTable one = kl_table(pair_a(), grid, {}, 1);
    const SpectralTable four = kl_table(pair_a(), grid, {}, 4);
    for (int j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(one.K[j][i] == four.K[j][i]);
            CHECK(one.L[j][i] == four.L[j][i]);
        }
    }
    // Cells agree with scalar kl_value.
    const auto pr = pair_a();
    const KLPoint p = kl_value(pr, 2, 2.0);
    CHECK(one.K[2][3] == Catch::Approx(p.K).epsilon(1e-12));
    CHECK(one.L[2][3] == Catch::Approx(p.L).epsilon(1e-12));

    CHECK_THROWS_AS(kl_table(pair_a(), {1.0, 0.5}, {}, 1), domain_error);
    CHECK_THROWS_AS(kl_table(pair_a(), {0.0, 1.0}, {}, 1), domain_error);
}

TEST_CASE("duality: reflected swap and time reversal preserve phi_4") {
    const auto m = make_model(1.5, 0.55);
    const auto md = make_model(1.5, 0.45);
    RayTransformPair base(m, TestFunction::explog(+1, 1.0),
                          TestFunction::explog(-1, 2.0));
    // (f, g) -> (g(-.), f(-.)) in the same model.
    RayTransformPair swapped(m, TestFunction::explog(+1, 2.0),
                             TestFunction::explog(-1, 1.0));
    // (f, g) -> (g, f) in the reversed model theta -> -theta.
    RayTransformPair reversed(md, TestFunction::explog(-1, 2.0),
                              TestFunction::explog(+1, 1.0));
    for (double lam : {0.7, 1.0}) {
        const ComplexValue v = phi_ray(base, ComplexValue{lam, 0.0}, 4);
        const ComplexValue vs = phi_ray(swapped, ComplexValue{lam, 0.0}, 4);
        const ComplexValue vr = phi_ray(reversed, ComplexValue{lam, 0.0}, 4);
        CHECK(std::abs(vs - v) <= 1e-12 * std::abs(v));
        CHECK(std::abs(vr - v) <= 1e-12 * std::abs(v));
    }
    CHECK(im_phi4_neg(swapped, 1.0) ==
          Catch::Approx(im_phi4_neg(base, 1.0)).epsilon(1e-12));
}

TEST_CASE("time-domain pairing is positive, decaying, and frozen") {
    const auto pr = pair_a();
    const double b1 = bilinear_timedomain(pr, 1.0);
    CHECK(b1 == Catch::Approx(9.359169747986e-03).epsilon(1e-6));
    const double b3 = bilinear_timedomain(pr, 3.0);
    CHECK(b3 == Catch::Approx(3.121287974460e-03).epsilon(1e-6));
    CHECK(b1 > 0.0);
    CHECK(b3 > 0.0);
    CHECK(b3 < b1);
}

TEST_CASE("eigenfunction expansion calibrates to the 1/pi prefactor") {
    const auto pr = pair_a();
    const double ref = bilinear_timedomain(pr, 1.0);
    const double base = eigenform_integral(pr, 1.0);
    CHECK(base == Catch::Approx(2.940269888381e-02).epsilon(1e-6));

    const double resid_pi = std::fabs(base / pi - ref);
    const double resid_one = std::fabs(base - ref);
    CHECK(resid_pi <= 1e-4 * std::fabs(ref));
    CHECK(resid_one >= 10.0 * 1e-4 * std::fabs(ref));

    const BilinearResult r = bilinear_eigenform(pr, 1.0, 1.0 / pi);
    CHECK(r.t == 1.0);
    CHECK(r.prefactor_used == 1.0 / pi);
    CHECK(r.value_reference == Catch::Approx(ref).epsilon(1e-12));
    CHECK(r.value_eigenform == Catch::Approx(base / pi).epsilon(1e-12));
}

TEST_CASE("phi_5 chain: limit, boundary ladder, and bound") {
    const auto m = make_model(1.5, 0.55);
    const auto g = TestFunction::explog(-1, 2.0);
    const double lg0 = g.laplace(ComplexValue{0.0, 0.0}, {}).real();
    CHECK(lg0 == Catch::Approx(4.075615665440e-01).epsilon(1e-9));

    // lambda phi_5(lambda) -> Lg(0) with shrinking gap.
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double lam : {1e2, 1e3, 1e4}) {
        const ComplexValue v = phi5(m, g, ComplexValue{lam, 0.0});
        const double gap = std::abs(lam * v - lg0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap <= 2e-3);

    // Ladder extrapolation of phi_5 onto the cut vs the K/L assembly.
    const double alpha = m.alpha;
    for (double s : {0.5, 1.5}) {
        const double sa = std::pow(s, alpha);
        auto at = [&](double eps) {
            return phi5(m, g, ComplexValue{-sa, eps});
        };
        const ComplexValue a = at(1e-3);
        const ComplexValue b = at(1e-4);
        const ComplexValue c = at(1e-5);
        const ComplexValue ext =
            (100.0 * ((10.0 * c - b) / 9.0) - (10.0 * b - a) / 9.0) / 99.0;
        const ComplexValue bnd = phi5_boundary(m, g, s);
        CHECK(std::abs(ext - bnd) <= 1e-5);
        CHECK(im_phi5_neg(m, g, s) == Catch::Approx(bnd.imag()).epsilon(1e-12));
    }
    CHECK(phi5_boundary(m, g, 0.5).imag() ==
          Catch::Approx(-3.65441525e-01).epsilon(1e-7));

    // |lambda phi_5(-lambda^2)| <= C min(lambda^{1 - 2/alpha}, 1/lambda).
    for (double lam : {0.3, 1.0, 3.0, 10.0}) {
        const double s = std::pow(lam * lam, 1.0 / alpha);
        const ComplexValue v = phi5_boundary(m, g, s);
        const double bound =
            std::min(std::pow(lam, 1.0 - 2.0 / alpha), 1.0 / lam);
        CHECK(lam * std::abs(v) <= bound);
    }
}
