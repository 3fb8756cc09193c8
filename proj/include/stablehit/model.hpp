#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace stablehit {

using ComplexValue = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Strictly stable process with index alpha in (1,2), normalized so that
// |psi(1)| = 1.  The characteristic exponent is
//
//     psi(xi) = (e^{-i theta} xi)^alpha          for xi > 0,
//     psi(xi) = (e^{+i theta} (-xi))^alpha       for xi < 0,
//
// where theta = (1 - 2 rho) pi/2 and rho = P(X_1 > 0).  The ray
// arg(xi) = theta carries the real values psi(r e^{i theta}) = r^alpha.
// Transform conventions throughout: Ff(xi) = int f(x) e^{-i xi x} dx, so
// F p_t(xi) = e^{-t psi(xi)} and E e^{i xi X_t} = e^{-t psi(-xi)}.
//
// sim_beta / sim_sigma translate the model into the standard one-parameter
// (S1) convention used by the exact increment sampler,
// E e^{i xi X_1} = exp(-sigma^alpha |xi|^alpha (1 - i beta tan(pi alpha/2)
// sign xi)):
//
//     beta  = -tan(alpha theta) / tan(pi alpha / 2),
//     sigma = cos(alpha theta)^{1/alpha}.
struct StableModel {
    double alpha;
    double rho;
    double theta;
    double sim_beta;
    double sim_sigma;
};

inline StableModel make_model(double alpha, double rho) {
    if (!(alpha > 1.0) || !(alpha < 2.0)) {
        std::ostringstream os;
        os << "make_model: alpha = " << alpha << " violates 1 < alpha < 2";
        throw domain_error(os.str());
    }
    // Slack of a few ulp keeps the closed boundary usable: 1 - 1/alpha is
    // itself rounded, and the boundary is a legitimate (spectrally one-sided)
    // model.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon();
    const double rho_lo = 1.0 - 1.0 / alpha - slack;
    const double rho_hi = 1.0 / alpha + slack;
    if (!(rho >= rho_lo) || !(rho <= rho_hi)) {
        std::ostringstream os;
        os << "make_model: rho = " << rho << " violates " << rho_lo
           << " <= rho <= " << rho_hi << " (alpha = " << alpha << ")";
        throw domain_error(os.str());
    }
    StableModel m;
    m.alpha = alpha;
    m.rho = rho;
    m.theta = (1.0 - 2.0 * rho) * pi / 2.0;
    // At the boundary |theta| = pi/alpha - pi/2 these hit beta = -+1 exactly
    // (up to roundoff): tan(alpha theta) = -tan(alpha pi/2) there.
    m.sim_beta = -std::tan(alpha * m.theta) / std::tan(alpha * pi / 2.0);
    if (m.sim_beta > 1.0) m.sim_beta = 1.0;
    if (m.sim_beta < -1.0) m.sim_beta = -1.0;
    m.sim_sigma = std::pow(std::cos(alpha * m.theta), 1.0 / alpha);
    return m;
}

// Maximal asymmetry angle pi/alpha - pi/2 for the given index.
inline double theta_max(double alpha) { return pi / alpha - pi / 2.0; }

// Model specified by the angle directly; rho = 1/2 - theta/pi.
inline StableModel make_model_theta(double alpha, double theta) {
    return make_model(alpha, 0.5 - theta / pi);
}

// Holomorphic extension of the characteristic exponent to C \ iR,
// principal branches.  Purely imaginary arguments are a branch cut.
inline ComplexValue psi(const StableModel& m, ComplexValue xi) {
    if (xi.real() == 0.0) {
        throw domain_error("psi: argument on the imaginary axis (branch cut)");
    }
    const ComplexValue rot = std::polar(1.0, xi.real() > 0.0 ? -m.theta : m.theta);
    const ComplexValue base = xi.real() > 0.0 ? xi : -xi;
    return std::pow(rot * base, m.alpha);
}

inline ComplexValue psi(const StableModel& m, double xi) {
    return psi(m, ComplexValue(xi, 0.0));
}

} // namespace stablehit
