#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace stablehit {

template <class T>
struct QuadResult {
    T value{};
    double abs_err_estimate = 0.0;
    long n_evals = 0;
    bool converged = false;
};

struct QuadPolicy {
    double rel_tol = 1e-9;
    double abs_tol = 1e-13;
    long max_evals = 500000;
    // Initial symmetric excision half-width for principal values, as a
    // fraction of the singularity location s.
    double pv_excision = 0.25;
    enum class TailPolicy { bound_driven, fixed_cutoff };
    TailPolicy tail_policy = TailPolicy::bound_driven;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae/weights).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

inline double abs_of(double v) { return std::fabs(v); }
inline double abs_of(const std::complex<double>& v) { return std::abs(v); }

inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// One Gauss-Kronrod 15 panel.  Returns the Kronrod value; err is the
// QUADPACK-scaled difference against the embedded Gauss rule.
template <class F, class T>
void gk15(F& f, double a, double b, T& value, double& err, double& resabs) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fv[15];
    double xv[15];
    for (int i = 0; i < 7; ++i) {
        xv[i] = c - h * gk15_x[i];
        xv[14 - i] = c + h * gk15_x[i];
        fv[i] = f(xv[i]);
        fv[14 - i] = f(xv[14 - i]);
    }
    xv[7] = c;
    fv[7] = f(c);
    for (int i = 0; i < 15; ++i) {
        if (!finite(fv[i])) {
            std::ostringstream os;
            os << "integrand not finite at x = " << xv[i];
            throw nan_error(os.str());
        }
    }
    T resk{};
    T resg{};
    resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += gk15_wk[i] * (fv[i] + fv[14 - i]);
        resabs += gk15_wk[i] * (abs_of(fv[i]) + abs_of(fv[14 - i]));
    }
    resk += gk15_wk[7] * fv[7];
    resabs += gk15_wk[7] * abs_of(fv[7]);
    // Gauss nodes sit at the odd Kronrod indices 1,3,5 plus the midpoint.
    for (int i = 0; i < 3; ++i) {
        resg += gk15_wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    }
    resg += gk15_wg[3] * fv[7];

    const T reskh = resk * 0.5;
    double resasc = gk15_wk[7] * abs_of(fv[7] - reskh);
    for (int i = 0; i < 7; ++i) {
        resasc += gk15_wk[i] * (abs_of(fv[i] - reskh) + abs_of(fv[14 - i] - reskh));
    }
    resasc *= h;
    resabs *= h;
    value = resk * h;
    err = abs_of(resk - resg) * h;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    err = std::max(err, eps_floor);
}

template <class T>
struct Segment {
    double a, b;
    T value;
    double err;
};

} // namespace detail

// Adaptive Gauss-Kronrod integration over the union of the panels defined by
// the sorted breakpoints pts[0] < pts[1] < ... .  The worst panel (largest
// error estimate) is bisected until the summed estimate meets the policy
// tolerance.  Throws convergence_error if the evaluation budget runs out
// while the estimate is still above tolerance.
template <class F>
auto integrate_adaptive_panels(F&& f, const std::vector<double>& pts,
                               const QuadPolicy& pol = {}) {
    using T = std::decay_t<decltype(f(pts.front()))>;
    if (pts.size() < 2) throw domain_error("integrate: need at least two breakpoints");
    std::vector<detail::Segment<T>> segs;
    segs.reserve(pts.size() + 64);
    long n_evals = 0;
    T total{};
    double total_err = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i] < pts[i + 1])) throw domain_error("integrate: breakpoints not increasing");
        detail::Segment<T> s{pts[i], pts[i + 1], T{}, 0.0};
        double resabs;
        detail::gk15(f, s.a, s.b, s.value, s.err, resabs);
        n_evals += 15;
        total += s.value;
        total_err += s.err;
        segs.push_back(s);
    }
    auto cmp = [](const detail::Segment<T>& l, const detail::Segment<T>& r) {
        return l.err < r.err;
    };
    std::make_heap(segs.begin(), segs.end(), cmp);
    const double min_width = 4.0 * std::numeric_limits<double>::epsilon();
    double stalled_err = 0.0;  // width-exhausted segments, excluded from the loop test
    while (total_err > std::max(pol.abs_tol, pol.rel_tol * detail::abs_of(total))) {
        if (n_evals + 30 > pol.max_evals) {
            std::ostringstream os;
            os << "integrate: budget of " << pol.max_evals
               << " evaluations exhausted, error estimate " << total_err + stalled_err;
            throw convergence_error(os.str());
        }
        std::pop_heap(segs.begin(), segs.end(), cmp);
        detail::Segment<T> worst = segs.back();
        segs.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a < min_width * (std::fabs(worst.a) + std::fabs(worst.b) + 1.0)) {
            // Cannot be resolved further in double precision.
            total_err -= worst.err;
            stalled_err += worst.err;
            worst.err = 0.0;
            segs.push_back(worst);
            std::push_heap(segs.begin(), segs.end(), cmp);
            continue;
        }
        total -= worst.value;
        total_err -= worst.err;
        for (int half = 0; half < 2; ++half) {
            detail::Segment<T> s{half ? mid : worst.a, half ? worst.b : mid, T{}, 0.0};
            double resabs;
            detail::gk15(f, s.a, s.b, s.value, s.err, resabs);
            n_evals += 15;
            total += s.value;
            total_err += s.err;
            segs.push_back(s);
            std::push_heap(segs.begin(), segs.end(), cmp);
        }
    }
    // Recompute the sums in a deterministic order to shed heap-order roundoff.
    std::sort(segs.begin(), segs.end(),
              [](const detail::Segment<T>& l, const detail::Segment<T>& r) { return l.a < r.a; });
    total = T{};
    for (const auto& s : segs) total += s.value;
    return QuadResult<T>{total, total_err + stalled_err, n_evals, true};
}

template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadPolicy& pol = {}) {
    if (!(a < b)) throw domain_error("integrate_adaptive: need a < b");
    return integrate_adaptive_panels(f, std::vector<double>{a, b}, pol);
}

// Integral over [a, inf) for non-oscillatory integrands with at least
// algebraic decay r^{-1-delta}, delta >= 0.05.  Near field [a, a+1] is done
// directly; the far field uses the substitution r = (a+1) e^w, under which a
// power tail r^{-1-delta} becomes a plain exponential e^{-delta w} on a
// finite w interval.  (A rational map u/(1-u) cannot represent r beyond
// ~9e15, which leaves ~1e-8 of mass behind for r^{-3/2} tails; the
// exponential map reaches r ~ 1e300.)
template <class F>
auto integrate_to_inf(F&& f, double a, const QuadPolicy& pol = {}) {
    using T = std::decay_t<decltype(f(a + 1.0))>;
    QuadPolicy half_pol = pol;
    half_pol.abs_tol = 0.5 * pol.abs_tol;
    auto near = integrate_adaptive(f, a, a + 1.0, half_pol);

    const double base = a + 1.0;
    auto g = [&f, base](double w) -> T {
        const double r = base * std::exp(w);
        return f(r) * r;
    };
    // Keep base * e^w finite; 680 covers r up to ~5e295 when base ~ 1.
    const double w_max = 680.0 - std::log(std::max(base, 1.0));
    std::vector<double> pts{0.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0,
                            55.0, 89.0, 144.0, 233.0, 377.0, 610.0};
    while (!pts.empty() && pts.back() >= w_max) pts.pop_back();
    pts.push_back(w_max);
    auto far = integrate_adaptive_panels(g, pts, half_pol);
    // Truncation allowance: the far endpoint value times a generous decay
    // scale (covers delta >= 0.1 with slack).
    const double trunc = 10.0 * detail::abs_of(g(w_max));

    return QuadResult<T>{near.value + far.value,
                         near.abs_err_estimate + far.abs_err_estimate + trunc,
                         near.n_evals + far.n_evals + 1,
                         near.converged && far.converged};
}

// Tanh-sinh (double-exponential) rule on [a, b].  Converges at near-machine
// rates for integrands with integrable endpoint singularities; node
// positions are computed in offset-from-endpoint form, so clustering is
// resolvable down to denormal offsets when a = 0.
template <class F>
auto integrate_tanh_sinh(F&& f, double a, double b, const QuadPolicy& pol = {}) {
    using T = std::decay_t<decltype(f(0.5 * (a + b)))>;
    if (!(a < b)) throw domain_error("integrate_tanh_sinh: need a < b");
    const double half = 0.5 * (b - a);
    const double u_max = 6.1;  // beyond this the logistic weight underflows
    long n_evals = 0;

    auto node_sum = [&](double h, bool odd_only) {
        T acc{};
        for (int j = odd_only ? 1 : 0;; j += odd_only ? 2 : 1) {
            const double u = j * h;
            if (u > u_max) break;
            const double v = std::numbers::pi * std::sinh(u);  // = 2 * (pi/2) sinh u
            if (v > 700.0) break;
            // 1 - tanh(v/2) = 2 e^{-v} / (1 + e^{-v}); sigma is the offset of
            // the node from the endpoint as a fraction of (b-a).
            const double ev = std::exp(-v);
            const double sigma = ev / (1.0 + ev);
            // w(u) = (pi/2) cosh(u) / cosh^2((pi/2) sinh u), in underflow-safe form
            const double w = std::numbers::pi / 2.0 * std::cosh(u) * 4.0 * sigma / (1.0 + ev);
            if (j == 0) {
                T fm = f(a + half);
                if (!detail::finite(fm)) throw nan_error("integrand not finite (tanh-sinh midpoint)");
                acc += w * fm;
                n_evals += 1;
                continue;
            }
            const double x_lo = a + (b - a) * sigma;
            const double x_hi = b - (b - a) * sigma;
            T contrib{};
            if (x_lo > a) {
                T fl = f(x_lo);
                if (!detail::finite(fl)) throw nan_error("integrand not finite (tanh-sinh node)");
                contrib += w * fl;
                n_evals += 1;
            }
            if (x_hi < b) {
                T fh = f(x_hi);
                if (!detail::finite(fh)) throw nan_error("integrand not finite (tanh-sinh node)");
                contrib += w * fh;
                n_evals += 1;
            }
            acc += contrib;
            if (u > 3.0 && detail::abs_of(contrib) < 1e-300) break;
        }
        return acc;
    };

    double h = 1.0;
    T sum = node_sum(h, false);
    T prev = sum * (half * h);
    T result = prev;
    double err = detail::abs_of(prev);
    for (int level = 1; level <= 11; ++level) {
        h *= 0.5;
        sum += node_sum(h, true);
        result = sum * (half * h);
        err = detail::abs_of(result - prev);
        prev = result;
        if (level >= 3 && err <= std::max(pol.abs_tol, pol.rel_tol * detail::abs_of(result)))
            return QuadResult<T>{result, err, n_evals, true};
        if (n_evals > pol.max_evals) break;
    }
    if (err > std::max(pol.abs_tol, 10.0 * pol.rel_tol * detail::abs_of(result))) {
        std::ostringstream os;
        os << "integrate_tanh_sinh: level ladder exhausted, error estimate " << err;
        throw convergence_error(os.str());
    }
    return QuadResult<T>{result, err, n_evals, true};
}

// Two-sided integral over the whole line, split at 0.
template <class F>
auto integrate_real_line(F&& f, const QuadPolicy& pol = {}) {
    auto right = integrate_to_inf(f, 0.0, pol);
    auto left = integrate_to_inf([&f](double r) { return f(-r); }, 0.0, pol);
    using T = decltype(right.value);
    return QuadResult<T>{right.value + left.value,
                         right.abs_err_estimate + left.abs_err_estimate,
                         right.n_evals + left.n_evals,
                         right.converged && left.converged};
}

namespace detail {

// Smallest S with t S^alpha - g S >= A, i.e. the point beyond which
// e^{-t s^alpha + g s} stays below e^{-A}.  Requires alpha > 1, t > 0.
inline double damped_cutoff(double t, double alpha, double g, double A) {
    const double s_pk = g > 0.0 ? std::pow(g / (alpha * t), 1.0 / (alpha - 1.0)) : 0.0;
    double lo = s_pk;
    double hi = std::max(1.0, 2.0 * s_pk);
    auto m = [&](double S) { return t * std::pow(S, alpha) - g * S - A; };
    int guard = 0;
    while (m(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 2000) throw convergence_error("damped_cutoff: no finite truncation point");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (m(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

} // namespace detail

// Integral of e^{-s^alpha t} f(s) over [0, inf), where |f(s)| <= C e^{growth_rate s}.
// The truncation point S* is chosen from the bound so that the discarded tail
// is below abs_tol/10; refuses regimes in which evaluating f near S* (or the
// product at its interior peak) would overflow double precision.
template <class F>
QuadResult<double> integrate_semiinf_damped(F&& f, double t, double alpha,
                                            double growth_rate, const QuadPolicy& pol = {}) {
    if (!(t > 0.0)) throw domain_error("integrate_semiinf_damped: need t > 0");
    if (!(alpha > 1.0)) throw domain_error("integrate_semiinf_damped: need alpha > 1");
    const double g = growth_rate > 0.0 ? growth_rate : 0.0;
    const double A = std::log(10.0 / std::min(pol.abs_tol, 1e-6));
    const double S = detail::damped_cutoff(t, alpha, g, A);
    if (g * S > 690.0) {
        std::ostringstream os;
        os << "integrate_semiinf_damped: truncation point " << S
           << " with growth rate " << g << " exceeds the overflow-safe range";
        throw convergence_error(os.str());
    }
    auto integrand = [&](double s) { return std::exp(-std::pow(s, alpha) * t) * f(s); };

    // First stretch by the double-exponential rule: integrands of interest
    // may carry an integrable s^{alpha-2} singularity at 0, which plain
    // bisection cannot resolve to tolerance in double precision.  The
    // oscillatory bulk up to the truncation point goes to the adaptive rule
    // on linear panels.
    const double bulk = S / 64.0;
    QuadPolicy head_pol = pol;
    head_pol.max_evals = std::min<long>(pol.max_evals, 40000);
    auto head = integrate_tanh_sinh(integrand, 0.0, bulk, head_pol);
    std::vector<double> pts;
    for (int i = 1; i <= 64; ++i) pts.push_back(bulk * i);
    auto body = integrate_adaptive_panels(integrand, pts, pol);
    return QuadResult<double>{head.value + body.value,
                              head.abs_err_estimate + body.abs_err_estimate + pol.abs_tol / 10.0,
                              head.n_evals + body.n_evals,
                              head.converged && body.converged};
}

namespace detail {

// p.v. integral of 1/(r^alpha - s^alpha) dr over (0, inf):
//   -(pi/alpha) cot(pi/alpha) s^{1-alpha}.
inline double pv_power_constant(double alpha, double s) {
    const double pa = std::numbers::pi / alpha;
    return -pa / std::tan(pa) * std::pow(s, 1.0 - alpha);
}

} // namespace detail

// Cauchy principal value of  integral_0^inf h(r) / (r^alpha - s^alpha) dr.
//
// Decomposition: h(r) = (h(r) - h(s)) + h(s).  The constant part has the
// closed form above; the remainder is continuous across r = s (with a Taylor
// guard against catastrophic cancellation in a narrow relative window) and is
// integrated with symmetric excision [s-eps, s+eps], eps halved four times
// and Richardson-extrapolated in eps (the excised-window expansion has only
// odd powers of eps).
template <class F>
QuadResult<double> integrate_pv_power(F&& h, double s, double alpha,
                                      const QuadPolicy& pol = {}) {
    if (!(s > 0.0)) throw domain_error("integrate_pv_power: need s > 0");
    const double hs = h(s);
    // Fourth-order stencils for h'(s), h''(s), used inside the Taylor guard.
    const double d = 1e-3 * s;
    const double hm2 = h(s - 2 * d), hm1 = h(s - d), hp1 = h(s + d), hp2 = h(s + 2 * d);
    const double dh = (hm2 - 8.0 * hm1 + 8.0 * hp1 - hp2) / (12.0 * d);
    const double d2h = (-hm2 + 16.0 * hm1 - 30.0 * hs + 16.0 * hp1 - hp2) / (12.0 * d * d);
    const double sa1 = alpha * std::pow(s, alpha - 1.0);
    const double tau = 1e-4 * s;

    long n_evals = 7;
    auto reg = [&](double r) {
        const double u = r - s;
        if (std::fabs(u) < tau) {
            const double num = dh + 0.5 * d2h * u;
            const double den = sa1 * (1.0 + (alpha - 1.0) * u / (2.0 * s) +
                                      (alpha - 1.0) * (alpha - 2.0) * u * u / (6.0 * s * s));
            return num / den;
        }
        return (h(r) - hs) / (std::pow(r, alpha) - std::pow(s, alpha));
    };

    const double eps0 = pol.pv_excision * s;
    const double eps[4] = {eps0, eps0 / 2, eps0 / 4, eps0 / 8};

    // Base: everything outside the widest excision, up to R0, plus the tail.
    // R0 sits past the pole scale 4s AND past the unit scale: for s << 1 the
    // regularized integrand still rises like h' r^{1-alpha} until r reaches
    // the variation scale of h, and the octave loop below must start beyond
    // that turnover for its decrease heuristic to mean anything.
    const double R0 = 4.0 * s + 4.0;
    QuadPolicy inner = pol;
    inner.abs_tol = pol.abs_tol / 16.0;
    inner.rel_tol = pol.rel_tol / 4.0;
    auto left = integrate_adaptive_panels(reg, std::vector<double>{0.0, s / 2, s - eps0}, inner);
    auto mid = integrate_adaptive(reg, s + eps0, R0, inner);
    n_evals += left.n_evals + mid.n_evals;
    double quad_err = left.abs_err_estimate + mid.abs_err_estimate;

    // Tail in octave panels until one of two remainder bounds drops below
    // tolerance.  With probes of h at R, 2R, 5R:
    //  - "const" bound: |h(r) - h(s)| stays near its probed maximum, so the
    //    whole remaining regular part is bounded directly.  This is the exit
    //    for constant-like h (the remaining integrand is ~0).
    //  - "decay" bound: |h(r)| itself has decayed; the -h(s) part of the tail
    //    is then added in closed form from the expansion
    //      int_R^inf dr/(r^alpha - s^alpha)
    //        = R^{1-alpha}/(alpha-1) + s^alpha R^{1-2alpha}/(2alpha-1) + ...,
    //    and only the h(r) part is bounded.  This is the exit for decaying h
    //    (callers assert |h(r)| <= c min{1, 1/r}).
    // Both bounds use r^alpha - s^alpha >= 0.75 r^alpha on r >= 4s.
    double tail_val = 0.0;
    double R = R0;
    const double scale0 = std::fabs(hs) + std::fabs(left.value) + std::fabs(mid.value);
    double prev_oct = std::numeric_limits<double>::infinity();
    int non_decreasing = 0;
    bool tail_done = false;
    for (int k = 0; k < 60 && !tail_done; ++k) {
        auto oct = integrate_adaptive(reg, R, 2.0 * R, inner);
        n_evals += oct.n_evals;
        quad_err += oct.abs_err_estimate;
        tail_val += oct.value;
        const double mag = std::fabs(oct.value);
        if (mag >= 0.999 * prev_oct && mag > 16.0 * inner.abs_tol) {
            if (++non_decreasing >= 8) {
                throw convergence_error("integrate_pv_power: tail octaves are not decreasing; "
                                        "integral appears to diverge");
            }
        } else {
            non_decreasing = 0;
        }
        prev_oct = mag;
        R *= 2.0;
        double b_h = 0.0, b_diff = 0.0;
        for (double fac : {1.0, 2.0, 5.0}) {
            const double hp = h(fac * R);
            b_h = std::max(b_h, std::fabs(hp));
            b_diff = std::max(b_diff, std::fabs(hp - hs));
        }
        n_evals += 3;
        const double tail_geom = 1.5 * std::pow(R, 1.0 - alpha) / (alpha - 1.0);
        const double rem_const = b_diff * tail_geom;
        const double rem_hs =
            1.2 * std::fabs(hs) * std::pow(s, 3.0 * alpha) * std::pow(R, 1.0 - 4.0 * alpha) /
            (4.0 * alpha - 1.0);
        const double rem_decay = b_h * tail_geom + rem_hs;
        const double tol_stop =
            0.5 * std::max(pol.abs_tol, pol.rel_tol * (scale0 + std::fabs(tail_val)));
        if (rem_const <= tol_stop) {
            quad_err += rem_const;
            tail_done = true;
        } else if (rem_decay <= tol_stop) {
            tail_val -= hs * (std::pow(R, 1.0 - alpha) / (alpha - 1.0) +
                              std::pow(s, alpha) * std::pow(R, 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0) +
                              std::pow(s, 2.0 * alpha) * std::pow(R, 1.0 - 3.0 * alpha) / (3.0 * alpha - 1.0));
            quad_err += rem_decay;
            tail_done = true;
        }
    }
    if (!tail_done) {
        throw convergence_error("integrate_pv_power: tail truncation bound not reached");
    }

    double M[4];
    M[0] = left.value + mid.value + tail_val;
    for (int i = 0; i < 3; ++i) {
        auto ringL = integrate_adaptive(reg, s - eps[i], s - eps[i + 1], inner);
        auto ringR = integrate_adaptive(reg, s + eps[i + 1], s + eps[i], inner);
        n_evals += ringL.n_evals + ringR.n_evals;
        quad_err += ringL.abs_err_estimate + ringR.abs_err_estimate;
        M[i + 1] = M[i] + ringL.value + ringR.value;
    }
    // Richardson in eps: the excised window has expansion a.eps + b.eps^3 + c.eps^5.
    double T1[3], T2[2];
    for (int i = 0; i < 3; ++i) T1[i] = 2.0 * M[i + 1] - M[i];
    for (int i = 0; i < 2; ++i) T2[i] = (8.0 * T1[i + 1] - T1[i]) / 7.0;
    const double T3 = (32.0 * T2[1] - T2[0]) / 31.0;
    const double extrap_err = std::fabs(T3 - T2[1]);

    const double value = hs * detail::pv_power_constant(alpha, s) + T3;
    return QuadResult<double>{value, quad_err + extrap_err, n_evals, true};
}

} // namespace stablehit
