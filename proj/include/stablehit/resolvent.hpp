#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace stablehit {

// Free transition density, potential kernels, and the hitting-time Laplace
// transform.  Everything here is Fourier inversion against psi:
//
//     p_t(x)      = (1/2 pi) int e^{i xi x} e^{-t psi(xi)} d xi,
//     u_lambda(x) = (1/2 pi) int e^{i xi x} / (psi(xi) + lambda) d xi,
//
// reduced to [0, inf) by Hermitian symmetry.  The resolvent integrand only
// decays like |xi|^{-alpha}, so its far field is summed analytically: a
// geometric expansion of 1/(psi + lambda) in lambda/psi, each power term
// integrated by parts into an asymptotic series in 1/(x xi).

namespace detail {

inline std::atomic<long>& density_clip_count() {
    static std::atomic<long> count{0};
    return count;
}

inline double clip_density(double v) {
    if (v < 0.0 && v >= -1e-12) {
        density_clip_count().fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    return v;
}

// int_Xi^inf e^{i x xi} xi^{-p} d xi by repeated integration by parts:
//   -e^{i Xi x} sum_k (p)_k Xi^{-p-k} / (i x)^{k+1},
// the asymptotic series truncated at its smallest term.  Needs |x| Xi
// comfortably above p (the caller arranges |x| Xi >= 40).
inline ComplexValue osc_power_tail(double x, double p, double Xi,
                                   double abs_tol) {
    const ComplexValue ix{0.0, x};
    ComplexValue ix_pow = ix;
    double rising = 1.0;
    double xi_pow = std::pow(Xi, -p);
    ComplexValue sum{0.0, 0.0};
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 18; ++k) {
        const ComplexValue term = rising * xi_pow / ix_pow;
        const double mag = std::abs(term);
        if (mag > prev_mag) break;
        sum += term;
        prev_mag = mag;
        if (mag < abs_tol) break;
        rising *= p + k;
        xi_pow /= Xi;
        ix_pow *= ix;
    }
    return -std::polar(1.0, Xi * x) * sum;
}

// int_0^inf e^{i xi x} / (psi(xi) + lambda) d xi for one Hermitian leg.
// theta_sign = -1 evaluates the mirrored leg (psi at negative arguments).
inline ComplexValue resolvent_halfline(const StableModel& m, double lambda,
                                       double x, int theta_sign,
                                       const QuadPolicy& pol) {
    const double alpha = m.alpha;
    const double theta = theta_sign > 0 ? m.theta : -m.theta;
    const double scale = std::pow(lambda, 1.0 / alpha);
    double Xi = std::pow(30.0, 1.0 / alpha) * scale;
    if (x != 0.0) Xi = std::max(Xi, 40.0 / std::fabs(x));

    auto f = [&](double xi) -> ComplexValue {
        const ComplexValue ps =
            std::pow(std::polar(xi, -theta), alpha) + lambda;
        return std::polar(1.0, xi * x) / ps;
    };
    std::vector<double> pts{0.0};
    for (double b = std::min(scale, Xi) / 4.0; b < Xi; b *= 2.0) {
        pts.push_back(b);
    }
    pts.push_back(Xi);
    const ComplexValue head = integrate_adaptive_panels(f, pts, pol).value;

    // 1/(psi + lambda) = sum_m (-lambda)^m e^{i alpha theta (m+1)}
    //                    xi^{-alpha (m+1)} beyond Xi.
    ComplexValue tail{0.0, 0.0};
    double coef_mag = 1.0;
    for (int mth = 0; mth < 60; ++mth) {
        const double p = alpha * (mth + 1);
        const double lead = coef_mag * std::pow(Xi, -p) / (std::fabs(x) * p);
        if (lead < 0.25 * pol.abs_tol) break;
        const ComplexValue coef =
            std::pow(-lambda, mth) * std::polar(1.0, alpha * theta * (mth + 1));
        tail += coef * osc_power_tail(x, p, Xi, 0.25 * pol.abs_tol / coef_mag);
        coef_mag *= lambda;
    }
    return head + tail;
}

} // namespace detail

// Number of density evaluations clipped from a tiny negative roundoff value
// (in (-1e-12, 0)) up to zero since process start.
inline long density_clip_count() {
    return detail::density_clip_count().load(std::memory_order_relaxed);
}

inline double p_free(const StableModel& m, double t, double x,
                     const QuadPolicy& pol = {}) {
    if (!(t > 0.0)) throw domain_error("p_free: need t > 0");
    auto f = [&](double xi) {
        const ComplexValue e =
            ComplexValue{0.0, xi * x} -
            t * std::pow(std::polar(xi, -m.theta), m.alpha);
        return e.real() < -745.0 ? 0.0 : std::exp(e).real();
    };
    const double v = integrate_to_inf(f, 0.0, pol).value / pi;
    return detail::clip_density(v);
}

// u_lambda(0) in closed form.
inline double u_lambda_zero(const StableModel& m, double lambda) {
    if (!(lambda > 0.0)) throw domain_error("u_lambda: need lambda > 0");
    return std::cos(m.theta) / (m.alpha * std::sin(pi / m.alpha)) *
           std::pow(lambda, 1.0 / m.alpha - 1.0);
}

inline double u_lambda(const StableModel& m, double lambda, double x,
                       const QuadPolicy& pol = {}) {
    if (!(lambda > 0.0)) throw domain_error("u_lambda: need lambda > 0");
    if (x == 0.0) return u_lambda_zero(m, lambda);
    return detail::resolvent_halfline(m, lambda, x, +1, pol).real() / pi;
}

// Both Hermitian legs evaluated independently; the imaginary part is a
// quadrature self-diagnostic (vanishes identically in exact arithmetic).
inline ComplexValue u_lambda_two_leg(const StableModel& m, double lambda,
                                     double x, const QuadPolicy& pol = {}) {
    if (!(lambda > 0.0)) throw domain_error("u_lambda: need lambda > 0");
    const ComplexValue pos = detail::resolvent_halfline(m, lambda, x, +1, pol);
    const ComplexValue neg =
        detail::resolvent_halfline(m, lambda, -x, -1, pol);
    return (pos + neg) / (2.0 * pi);
}

// Potential kernel of the process killed on hitting the origin.
inline double u0_kernel(const StableModel& m, double lambda, double x,
                        double y, const QuadPolicy& pol = {}) {
    if (x == 0.0 || y == 0.0) return 0.0;
    const double v = u_lambda(m, lambda, y - x, pol) -
                     u_lambda(m, lambda, -x, pol) *
                         u_lambda(m, lambda, y, pol) /
                         u_lambda_zero(m, lambda);
    return detail::clip_density(v);
}

// E^x e^{-lambda tau_0} = u_lambda(-x) / u_lambda(0).
inline double hitting_laplace(const StableModel& m, double lambda, double x,
                              const QuadPolicy& pol = {}) {
    if (x == 0.0) {
        throw domain_error("hitting_laplace: x must be nonzero");
    }
    return u_lambda(m, lambda, -x, pol) / u_lambda_zero(m, lambda);
}

} // namespace stablehit
