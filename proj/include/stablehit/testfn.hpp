#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace stablehit {

// Test functions for the bilinear functionals: one-sided atoms
//
//     explog(side=+, s): x >= 0 -> exp(-s x log(x + e)),  0 for x < 0
//     explog(side=-, s): the mirror image, supported on x <= 0
//
// and finite sums of atoms.  Each atom continues analytically to the open
// half-plane sector on its side; the decay is superexponential, so the
// two-sided Laplace transform  L f(z) = int f(x) e^{-z x} dx  is entire.

struct ExplogAtom {
    int side;        // +1: supported on x >= 0, -1: on x <= 0
    double s_decay;  // > 0
};

namespace detail {

inline constexpr double euler_e = std::numbers::e;

// Atom value on the closed support half-line, mapped to u = |x| >= 0.
inline double explog_profile(double s, double u) {
    return std::exp(-s * u * std::log(u + euler_e));
}

// Analytic continuation of the right-side profile to |arg w| < pi/2.
inline ComplexValue explog_profile(double s, ComplexValue w) {
    return std::exp(-s * w * std::log(w + euler_e));
}

// L of the right-side atom:  int_0^infty e^{-s u log(u+e)} e^{-z u} du.
// The real-axis integrand is absolutely integrable for every z, but for
// Re(z) < 0 it peaks at height exp(s e^{|Re z|/s - 1}) before the
// superexponential factor wins, which exceeds double range (and the digits
// cancel down to an O(1/|z|) result) already for moderate |Re z|.  Integrate
// instead along a rotated ray u -> e^{i omega} u.  The profile factor
// decays superexponentially for |omega| < pi/2 in the tail, but first grows
// through a hump while cos(omega) log u < sin(omega) |arg(w + e)|; the hump
// height is exp(s cos(omega) e^{omega tan(omega) - 1}), so |omega| is capped
// at 1.2 to keep it below e^{2.9 s}.  With omega = -arg z (capped) the
// factor e^{-z w} decays, or at worst oscillates, for every |arg z| up to
// 1.2 + pi/2, which covers all spectral-ray arguments with |theta| <= 1.2.
// Deeper arguments (real z < 0, or models within ~0.37 of the spectral
// boundary for alpha < 1.13) pick the best of three candidate angles by an
// explicit peak probe and are refused when the smallest attainable peak
// would drown the O(min(1, 1/|z|)) result in roundoff.
inline ComplexValue laplace_explog_right(double s, ComplexValue z,
                                         const QuadPolicy& pol) {
    const double omega_cap = 1.2;
    const double arg_z = std::arg(z);
    const double sgn = arg_z >= 0.0 ? 1.0 : -1.0;

    auto exponent = [&](double omega, double u) -> ComplexValue {
        const ComplexValue w = std::polar(u, omega);
        return -s * w * std::log(w + euler_e) - z * w;
    };
    auto peak_of = [&](double omega) {
        double p = 0.0;
        for (double u = 0.25; u < 2e18; u *= 2.0) {
            p = std::max(p, exponent(omega, u).real());
        }
        return p;
    };

    double omega = -sgn * std::min(std::fabs(arg_z), omega_cap);
    if (std::abs(z) <= 0.5 * s && std::abs(z) <= 1.0) {
        // log(u+e) >= 1, so the real-axis exponent is bounded by
        // u (|z| - s) <= 0: no hump, little oscillation, and the rotated
        // ray's log-frequency wiggle makes the quadrature an order of
        // magnitude more expensive than integrating straight.
        omega = 0.0;
    } else if (std::fabs(arg_z) > omega_cap + pi / 2.0 || 2.9 * s > 340.0) {
        const double cands[3] = {omega, 0.5 * omega, 0.0};
        double best_peak = std::numeric_limits<double>::infinity();
        for (double w : cands) {
            const double p = peak_of(w);
            if (p < best_peak) {
                best_peak = p;
                omega = w;
            }
        }
        if (best_peak > 350.0) {
            throw convergence_error(
                "laplace: argument too deep in the left half-plane, the "
                "integrand peak would drown the result in roundoff");
        }
    }

    const ComplexValue dir = std::polar(1.0, omega);
    auto f = [&](double u) -> ComplexValue {
        const ComplexValue ex = exponent(omega, u);
        if (!(ex.real() > -746.0)) return ComplexValue{0.0, 0.0};
        return std::exp(ex);
    };
    auto r = integrate_to_inf(f, 0.0, pol);
    return dir * r.value;
}

inline ComplexValue laplace_atom(const ExplogAtom& a, ComplexValue z,
                                 const QuadPolicy& pol) {
    // Left atom: substitute x = -u, giving the right-atom transform at -z.
    return laplace_explog_right(a.s_decay, a.side > 0 ? z : -z, pol);
}

// Continuation of the real-axis formula: the atom's own sector carries the
// profile, the opposite sector carries the continuation of the zero
// half-line.
inline ComplexValue eval_atom(const ExplogAtom& a, ComplexValue z) {
    const ComplexValue w = a.side > 0 ? z : -z;
    if (w.imag() == 0.0) {
        const double u = w.real();
        return ComplexValue{u < 0.0 ? 0.0 : explog_profile(a.s_decay, u), 0.0};
    }
    if (w.real() < 0.0) return ComplexValue{0.0, 0.0};
    if (w.real() == 0.0) {
        throw domain_error("eval: imaginary axis is outside both sectors");
    }
    return explog_profile(a.s_decay, w);
}

} // namespace detail

class TestFunction {
public:
    static TestFunction explog(int side, double s) {
        if (side != 1 && side != -1) throw domain_error("explog: side must be +-1");
        if (!(s > 0.0)) throw domain_error("explog: decay rate must be positive");
        TestFunction tf;
        tf.atoms_.push_back(ExplogAtom{side, s});
        return tf;
    }

    // Grammar: explog(side=+|-,s=<real>) joined by top-level '+'.
    // Whitespace is ignored.
    static TestFunction parse(const std::string& text) {
        std::string t;
        t.reserve(text.size());
        for (char c : text) {
            if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
        }
        if (t.empty()) throw domain_error("test function: empty specification");
        TestFunction tf;
        size_t pos = 0;
        while (pos < t.size()) {
            size_t end = pos;
            int depth = 0;
            while (end < t.size() && !(depth == 0 && t[end] == '+')) {
                if (t[end] == '(') ++depth;
                if (t[end] == ')') --depth;
                ++end;
            }
            tf.atoms_.push_back(parse_atom(t.substr(pos, end - pos)));
            pos = end + (end < t.size() ? 1 : 0);
            if (pos == t.size() && end < t.size()) {
                throw domain_error("test function: trailing '+'");
            }
        }
        return tf;
    }

    TestFunction operator+(const TestFunction& other) const {
        TestFunction tf(*this);
        tf.atoms_.insert(tf.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
        return tf;
    }

    const std::vector<ExplogAtom>& atoms() const { return atoms_; }

    // Slowest decay rate among the atoms (truncation bound for x-space
    // integrals: |f(x)| <= exp(-s_decay |x| log(|x|+e)) on each half-line).
    double s_decay() const {
        double s = atoms_.front().s_decay;
        for (const auto& a : atoms_) s = std::min(s, a.s_decay);
        return s;
    }

    bool has_side(int side) const {
        for (const auto& a : atoms_) {
            if (a.side == side) return true;
        }
        return false;
    }

    double operator()(double x) const {
        double v = 0.0;
        for (const auto& a : atoms_) {
            if (a.side > 0 ? x >= 0.0 : x <= 0.0) {
                v += detail::explog_profile(a.s_decay, std::fabs(x));
            }
        }
        return v;
    }

    ComplexValue eval(ComplexValue z) const {
        if (z.imag() == 0.0) return ComplexValue{(*this)(z.real()), 0.0};
        ComplexValue v{0.0, 0.0};
        for (const auto& a : atoms_) v += detail::eval_atom(a, z);
        return v;
    }

    ComplexValue laplace(ComplexValue z, const QuadPolicy& pol = {}) const {
        ComplexValue v{0.0, 0.0};
        for (const auto& a : atoms_) v += detail::laplace_atom(a, z, pol);
        return v;
    }

    std::string text() const {
        std::string out;
        for (size_t i = 0; i < atoms_.size(); ++i) {
            if (i) out += '+';
            out += "explog(side=";
            out += atoms_[i].side > 0 ? '+' : '-';
            out += ",s=";
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof(buf), atoms_[i].s_decay);
            out.append(buf, res.ptr);
            out += ')';
        }
        return out;
    }

private:
    TestFunction() = default;

    static ExplogAtom parse_atom(const std::string& t) {
        const std::string head = "explog(side=";
        if (t.size() < head.size() + 5 || t.compare(0, head.size(), head) != 0 ||
            t.back() != ')') {
            throw domain_error("test function: expected explog(side=+|-,s=<real>), got '" +
                               t + "'");
        }
        size_t p = head.size();
        int side;
        if (t[p] == '+') side = 1;
        else if (t[p] == '-') side = -1;
        else throw domain_error("test function: side must be '+' or '-' in '" + t + "'");
        ++p;
        const std::string mid = ",s=";
        if (t.compare(p, mid.size(), mid) != 0) {
            throw domain_error("test function: expected ',s=' in '" + t + "'");
        }
        p += mid.size();
        const std::string num = t.substr(p, t.size() - 1 - p);
        double s;
        auto res = std::from_chars(num.data(), num.data() + num.size(), s);
        if (res.ec != std::errc{} || res.ptr != num.data() + num.size()) {
            throw domain_error("test function: bad decay rate '" + num + "'");
        }
        if (!(s > 0.0)) throw domain_error("test function: decay rate must be positive");
        return ExplogAtom{side, s};
    }

    std::vector<ExplogAtom> atoms_;
};

// The ray-restricted transforms entering the spectral integrals:
//
//     h0    = cos(theta)
//     h1(r) = Re(e^{i theta} L f(-i r e^{i theta}))
//     h2(r) = Re(e^{i theta} L g(+i r e^{i theta}))
//     h3(r) = Re(e^{i theta} L f(-i r e^{i theta}) L g(+i r e^{i theta}))
//
// The two Laplace values per abscissa are memoized exactly at the requested
// r (quadrature nodes repeat across the four h_j and across spectral
// parameters; interpolating on a fixed grid was tried first and its ~1e-4
// relative error is too coarse for the downstream tolerances).
class RayTransformPair {
public:
    RayTransformPair(StableModel model, TestFunction f, TestFunction g,
                     QuadPolicy pol = {})
        : model_(model), f_(std::move(f)), g_(std::move(g)), pol_(pol),
          ray_f_(std::polar(1.0, model.theta - pi / 2.0)),
          ray_g_(std::polar(1.0, model.theta + pi / 2.0)),
          phase_(std::polar(1.0, model.theta)),
          memo_(std::make_shared<Memo>()) {}

    const StableModel& model() const { return model_; }
    const TestFunction& f() const { return f_; }
    const TestFunction& g() const { return g_; }

    double h0() const { return std::cos(model_.theta); }

    double h(int j, double r) const {
        if (j == 0) return h0();
        if (!(r > 0.0)) throw domain_error("h_j: need r > 0");
        const auto lv = ray_values(r);
        switch (j) {
            case 1: return (phase_ * lv[0]).real();
            case 2: return (phase_ * lv[1]).real();
            case 3: return (phase_ * lv[0] * lv[1]).real();
            default: throw domain_error("h_j: j must be 0..3");
        }
    }

    // L f and L g on their respective rays, memoized (write-once per r).
    std::array<ComplexValue, 2> ray_values(double r) const {
        {
            std::lock_guard<std::mutex> lk(memo_->mu);
            auto it = memo_->table.find(r);
            if (it != memo_->table.end()) return it->second;
        }
        std::array<ComplexValue, 2> v{f_.laplace(r * ray_f_, pol_),
                                      g_.laplace(r * ray_g_, pol_)};
        std::lock_guard<std::mutex> lk(memo_->mu);
        return memo_->table.emplace(r, v).first->second;
    }

private:
    struct Memo {
        std::mutex mu;
        std::map<double, std::array<ComplexValue, 2>> table;
    };

    StableModel model_;
    TestFunction f_, g_;
    QuadPolicy pol_;
    ComplexValue ray_f_, ray_g_, phase_;
    std::shared_ptr<Memo> memo_;
};

inline RayTransformPair make_hj(const TestFunction& f, const TestFunction& g,
                                const StableModel& model,
                                const QuadPolicy& pol = {}) {
    return RayTransformPair(model, f, g, pol);
}

} // namespace stablehit
