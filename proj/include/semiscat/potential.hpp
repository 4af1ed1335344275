#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "semiscat/errors.hpp"

namespace semiscat {

/// The conormal model barrier: V(x) = x^alpha on [0, x0], smoothly tapered to
/// zero on [x0, x1], identically zero outside [0, x1].
///
/// The taper is V(x) = x^alpha * chi((x-x0)/(x1-x0)) with chi the flat-ended
/// smooth step, so every derivative matches the pure power at x0 and zero at
/// x1; the only non-smooth point of V is the conormal kink at x = 0.
struct ConormalPotential1D {
    double alpha = 0.5;
    double x0 = 0.5;
    double x1 = 1.0;

    ConormalPotential1D() = default;
    ConormalPotential1D(double a, double x0_, double x1_) : alpha(a), x0(x0_), x1(x1_) {
        if (!(alpha > 0.0)) throw DomainError("ConormalPotential1D: alpha must be positive");
        if (!(x0 > 0.0 && x0 < 1.0)) throw DomainError("ConormalPotential1D: x0 must lie in (0,1)");
        if (!(x1 > x0)) throw DomainError("ConormalPotential1D: need x1 > x0");
    }
};

namespace detail {

// Smooth step: 1 at t <= 0, 0 at t >= 1, C-infinity, strictly decreasing inside.
inline double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double s0 = std::exp(-1.0 / (1.0 - t));
    const double s1 = std::exp(-1.0 / t);
    return s0 / (s0 + s1);
}

inline double smooth_step_down_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    const double s0 = std::exp(-1.0 / u);
    const double s1 = std::exp(-1.0 / t);
    const double d0 = s0 * (-1.0 / (u * u));  // d/dt e^{-1/(1-t)}
    const double d1 = s1 * (1.0 / (t * t));   // d/dt e^{-1/t}
    const double denom = s0 + s1;
    return (d0 * denom - s0 * (d0 + d1)) / (denom * denom);
}

}  // namespace detail

/// V(x) per the piecewise definition; total and continuous in x.
inline double eval_potential(const ConormalPotential1D& pot, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= pot.x1) return 0.0;
    const double power = std::pow(x, pot.alpha);
    if (x <= pot.x0) return power;
    return power * detail::smooth_step_down((x - pot.x0) / (pot.x1 - pot.x0));
}

/// V'(x). Throws SingularDerivative at x = 0 when alpha <= 1 (one-sided
/// derivative unbounded for alpha < 1, undefined two-sided for alpha = 1).
inline double eval_potential_derivative(const ConormalPotential1D& pot, double x) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (pot.alpha <= 1.0)
            throw SingularDerivative("eval_potential_derivative: V' singular at x = 0 for alpha <= 1");
        return 0.0;
    }
    if (x >= pot.x1) return 0.0;
    const double dpower = pot.alpha * std::pow(x, pot.alpha - 1.0);
    if (x <= pot.x0) return dpower;
    const double w = pot.x1 - pot.x0;
    const double t = (x - pot.x0) / w;
    return dpower * detail::smooth_step_down(t) +
           std::pow(x, pot.alpha) * detail::smooth_step_down_deriv(t) / w;
}

/// min(1, alpha): the Hoelder exponent of V at the kink, used by step control.
inline double holder_exponent(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("holder_exponent: alpha must be positive");
    return std::min(1.0, alpha);
}

/// Numerically certified sup of V: the pure-power peak x0^alpha plus a scan
/// of the taper (where V may slightly exceed x0^alpha before decaying),
/// refined by ternary search around the scan maximum.
inline double potential_sup(const ConormalPotential1D& pot) {
    double s = std::pow(pot.x0, pot.alpha);
    const int n = 2000;
    const double w = pot.x1 - pot.x0;
    int best = 0;
    double best_v = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double v = eval_potential(pot, pot.x0 + w * static_cast<double>(i) / n);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    double lo = pot.x0 + w * std::max(best - 1, 0) / static_cast<double>(n);
    double hi = pot.x0 + w * std::min(best + 1, n) / static_cast<double>(n);
    while (hi - lo > 1e-12) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (eval_potential(pot, m1) < eval_potential(pot, m2))
            lo = m1;
        else
            hi = m2;
    }
    return std::max(s, eval_potential(pot, 0.5 * (lo + hi)));
}

/// Generic 1D potential as seen by the scattering solvers: a value callable,
/// the mesh points integration must pass through exactly, a sup bound, and a
/// label for provenance. Discontinuous potentials are supported because the
/// solvers never evaluate across a kink (kink evaluations are nudged to the
/// interior of the active subinterval).
struct Potential1D {
    std::function<double(double)> value;
    std::vector<double> kinks;  // sorted; subinterval boundaries for the mesh
    double sup = 0.0;
    double singular_alpha = 0.0;  // Hoelder order at x = 0; 0 = no kink there
    std::string label;

    double operator()(double x) const { return value(x); }
};

inline Potential1D make_potential(const ConormalPotential1D& pot) {
    Potential1D p;
    p.value = [pot](double x) { return eval_potential(pot, x); };
    p.kinks = {0.0, pot.x0, pot.x1};
    p.sup = potential_sup(pot);
    p.singular_alpha = pot.alpha;
    p.label = "conormal(alpha=" + std::to_string(pot.alpha) + ",x0=" + std::to_string(pot.x0) +
              ",x1=" + std::to_string(pot.x1) + ")";
    return p;
}

inline Potential1D zero_potential() {
    Potential1D p;
    p.value = [](double) { return 0.0; };
    p.kinks = {};
    p.sup = 0.0;
    p.singular_alpha = 0.0;
    p.label = "free";
    return p;
}

inline Potential1D square_barrier_potential(double v0, double width) {
    Potential1D p;
    p.value = [v0, width](double x) { return (x >= 0.0 && x <= width) ? v0 : 0.0; };
    p.kinks = {0.0, width};
    p.sup = std::max(v0, 0.0);
    p.singular_alpha = 0.0;
    p.label = "square(v0=" + std::to_string(v0) + ",width=" + std::to_string(width) + ")";
    return p;
}

}  // namespace semiscat
