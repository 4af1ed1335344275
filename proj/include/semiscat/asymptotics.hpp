#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "semiscat/errors.hpp"

namespace semiscat {

/// Gamma function for positive real arguments, Lanczos g = 7, 9 coefficients.
/// Relative accuracy ~1e-13 on (0, 30].
inline double gamma_fn(double z) {
    if (!(z > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    static constexpr double g = 7.0;
    static constexpr double coeff[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,    12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};
    if (z < 0.5) {
        // Reflection keeps accuracy uniform down to 0+.
        return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
    }
    const double zz = z - 1.0;
    double a = coeff[0];
    for (int i = 1; i < 9; ++i) a += coeff[i] / (zz + static_cast<double>(i));
    const double t = zz + g + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, zz + 0.5) * std::exp(-t) * a;
}

/// Leading-order reflection constants: modulus 2^(-a-2) Gamma(a+1), phase a*pi/2.
struct LeadingOrderR {
    double alpha;
    double modulus_constant;  // 2^(-alpha-2) * Gamma(alpha+1)
    double phase_constant;    // alpha * pi / 2

    explicit LeadingOrderR(double a)
        : alpha(a),
          modulus_constant(std::pow(2.0, -a - 2.0) * gamma_fn(a + 1.0)),
          phase_constant(a * std::numbers::pi / 2.0) {}
};

/// gamma_pm(alpha) = -2^(-alpha-2) e^{+-i alpha pi/2} Gamma(alpha+1).
inline std::complex<double> gamma_coefficient(double alpha, int sign) {
    const LeadingOrderR lo(alpha);
    const double phase = (sign >= 0 ? 1.0 : -1.0) * lo.phase_constant;
    return -lo.modulus_constant * std::complex<double>(std::cos(phase), std::sin(phase));
}

/// h-independent rescaled prediction: predicted_R(alpha, h) / h^alpha.
inline std::complex<double> predicted_R_rescaled(double alpha) {
    return -gamma_coefficient(alpha, +1);
}

/// Leading-order reflection coefficient 2^(-a-2) e^{i a pi/2} Gamma(a+1) h^a.
/// Proven for alpha in (0,1); conjectural (numerically supported) beyond.
inline std::complex<double> predicted_R(double alpha, double h) {
    return predicted_R_rescaled(alpha) * std::pow(h, alpha);
}

/// True when the leading-order law is in the proven range.
inline bool predicted_R_proven(double alpha) { return alpha > 0.0 && alpha < 1.0; }

}  // namespace semiscat
