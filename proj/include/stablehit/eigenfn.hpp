#pragma once

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace stablehit {

// Generalized eigenfunctions of the killed semigroup.  G is the completely
// monotone part, represented on each half-line by the Laplace-type kernel
//
//     mu_a(t) = (alpha sin(pi/alpha)/pi) t^alpha sin(a)
//               / (t^{2 alpha} - 2 t^alpha cos(a) + 1),
//
// with angle a = alpha (pi/2 - theta) for the positive argument and
// a = alpha (pi/2 + theta) for the negative one.  F combines an oscillating
// exponential envelope with -G.  The minus side is the plus side with theta
// negated (equivalently rho replaced by 1 - rho).

enum class Side { plus, minus };

struct GJump {
    double right_limit;
    double left_limit;
    double jump;
};

namespace detail {

// Stable for all t: dividing numerator and denominator by t^{2 alpha} maps
// t -> 1/t onto q -> q, so q = t^{+-alpha} always lies in [0, 1] and the
// denominator stays within [sin^2 a, 4].
inline double mu_kernel(double alpha, double a, double t) {
    const double q = t <= 1.0 ? std::pow(t, alpha) : std::pow(t, -alpha);
    const double d = (q - std::cos(a)) * (q - std::cos(a)) +
                     std::sin(a) * std::sin(a);
    return alpha * std::sin(pi / alpha) / pi * std::sin(a) * q / d;
}

// int_0^infty mu_a(t) dt = sin(pi/alpha - a/alpha), the one-sided limit of
// the Laplace representation at the origin.
inline double mu_total_mass(double alpha, double a) {
    return std::sin(pi / alpha - a / alpha);
}

// alpha/(w^alpha - 1) - 1/(w - 1): the two poles at w = 1 cancel to the
// finite limit -(alpha - 1)/2.  Inside |w - 1| <= 1e-3 the difference is
// formed by series (w^alpha - 1 = alpha d u v with u = log(w)/d and
// v = (e^E - 1)/E at E = alpha d u), which keeps full relative accuracy
// through the cancellation.
inline ComplexValue pole_pair(double alpha, ComplexValue w) {
    const ComplexValue d = w - 1.0;
    if (std::abs(d) > 1e-3) {
        return alpha / (std::pow(w, alpha) - 1.0) - 1.0 / d;
    }
    ComplexValue a{-0.5, 0.0};  // (u - 1)/d
    ComplexValue dp{1.0, 0.0};
    for (int k = 3; k <= 8; ++k) {
        dp *= -d;
        a += dp / double(k);
    }
    const ComplexValue u = 1.0 + a * d;
    const ComplexValue e = alpha * d * u;
    ComplexValue c{0.5, 0.0};  // (v - 1)/E
    ComplexValue ep{1.0, 0.0};
    double fact = 2.0;
    for (int k = 3; k <= 8; ++k) {
        ep *= e;
        fact *= k;
        c += ep / fact;
    }
    const ComplexValue um1 = a * d;
    // (u v - 1)/d, regular at d = 0.
    const ComplexValue uvm1_over_d = a + alpha * u * c * (1.0 + um1);
    return -uvm1_over_d / (1.0 + uvm1_over_d * d);
}

} // namespace detail

class EigenEvaluator {
public:
    EigenEvaluator(StableModel model, Side side, QuadPolicy pol = {})
        : model_(model), side_(side), pol_(pol),
          theta_(side == Side::plus ? model.theta : -model.theta),
          a_pos_(model.alpha * (pi / 2.0 - theta_)),
          a_neg_(model.alpha * (pi / 2.0 + theta_)) {}

    const StableModel& model() const { return model_; }
    Side side() const { return side_; }

    // G at x != 0.  The two one-sided limits at 0 differ; ask g_jump for
    // them.
    double g_eigen(double x) const {
        if (x == 0.0) {
            throw boundary_value_error(
                "g_eigen: G is defined at 0 only through one-sided limits; "
                "use g_jump");
        }
        const double a = x > 0.0 ? a_pos_ : a_neg_;
        const double ax = std::fabs(x);
        const double alpha = model_.alpha;
        if (ax < 0.5) {
            // Splitting off the one-sided limit keeps the O(|x|^{alpha-1})
            // correction at full relative accuracy.
            auto f = [&](double t) {
                return detail::mu_kernel(alpha, a, t) * -std::expm1(-t * ax);
            };
            return detail::mu_total_mass(alpha, a) -
                   integrate_to_inf(f, 0.0, pol_).value;
        }
        auto f = [&](double t) {
            const double e = t * ax;
            return e > 745.0 ? 0.0
                             : detail::mu_kernel(alpha, a, t) * std::exp(-e);
        };
        return integrate_to_inf(f, 0.0, pol_).value;
    }

    GJump g_jump() const {
        GJump j;
        j.right_limit = detail::mu_total_mass(model_.alpha, a_pos_);
        j.left_limit = detail::mu_total_mass(model_.alpha, a_neg_);
        j.jump = j.right_limit - j.left_limit;
        return j;
    }

    // F(x) = e^{-x sin theta} sin(|x| cos theta + theta sign x
    //        + pi/alpha - pi/2) - G(x), continuous through 0 with F(0) = 0.
    double f_eigen(double x) const {
        if (x == 0.0) return 0.0;
        const double phase = std::fabs(x) * std::cos(theta_) +
                             (x > 0.0 ? theta_ : -theta_) +
                             pi / model_.alpha - pi / 2.0;
        return std::exp(-x * std::sin(theta_)) * std::sin(phase) - g_eigen(x);
    }

    // Closed-form Fourier transform of G (transform convention
    // int G(x) e^{-i xi x} dx): sin(pi/alpha) (alpha/(psi(xi) - 1)
    // - 1/(e^{-i theta} xi - 1) + 1/(e^{i theta} xi + 1)).  At xi = 0 the
    // psi singularity is removable (psi(0) - 1 = -1); at theta = 0,
    // xi = +-1 the psi pole cancels against the rational term, so the pair
    // is evaluated jointly.
    ComplexValue g_fourier_closed(double xi) const {
        const double alpha = model_.alpha;
        const double spa = std::sin(pi / alpha);
        if (xi == 0.0) return ComplexValue{(2.0 - alpha) * spa, 0.0};
        const ComplexValue one{1.0, 0.0};
        const ComplexValue em = std::polar(1.0, -theta_);
        const ComplexValue ep = std::polar(1.0, theta_);
        if (xi > 0.0) {
            // psi(xi) = (e^{-i theta} xi)^alpha pairs with the first
            // rational term.
            return spa * (detail::pole_pair(alpha, em * xi) +
                          one / (ep * xi + one));
        }
        return spa * (detail::pole_pair(alpha, ep * -xi) -
                      one / (em * xi - one));
    }

    // The same transform evaluated from the Laplace representation: the
    // x-integral against e^{-i xi x} is exchanged with the kernel integral,
    // leaving int mu(t)/(t +- i xi) dt on each half-line.  Serves as the
    // independent check of the closed form.
    ComplexValue g_fourier_numeric(double xi) const {
        const double alpha = model_.alpha;
        auto f = [&](double t) -> ComplexValue {
            const ComplexValue pos = detail::mu_kernel(alpha, a_pos_, t) /
                                     ComplexValue{t, xi};
            const ComplexValue neg = detail::mu_kernel(alpha, a_neg_, t) /
                                     ComplexValue{t, -xi};
            return pos + neg;
        };
        return integrate_to_inf(f, 0.0, pol_).value;
    }

private:
    StableModel model_;
    Side side_;
    QuadPolicy pol_;
    double theta_;
    double a_pos_, a_neg_;
};

} // namespace stablehit
