#pragma once

#include <cmath>
#include <stdexcept>

namespace qpf {

// Regularized inverse 1/s used as the QSVT target for matrix inversion:
//
//   F(s) = (1 - exp(-(5*s*kappa)^2)) / s,   F(0) = 0,
//
// odd, finite on [-1,1], and a relative 1e-12 approximation of 1/s for
// 1/kappa <= |s| <= 1. The normalized target eta*F(s)/kappa is what the
// phase solver fits.
struct TargetSpec {
    double kappa_qsvt = 10.0;
    double eta_qsvt = 0.125;

    void validate() const {
        if (!(kappa_qsvt >= 1.0)) throw std::invalid_argument("TargetSpec: kappa_qsvt must be >= 1");
        if (!(eta_qsvt > 0.0 && eta_qsvt < 1.0)) throw std::invalid_argument("TargetSpec: eta_qsvt must be in (0,1)");
    }
};

// F(s) as above. The numerator depends on s only through s^2, so the result
// is exactly odd in IEEE arithmetic. Below |s| = 1e-3/kappa the direct form
// loses digits to cancellation and a Taylor expansion in u = (5*s*kappa)^2
// takes over:  F(s) = 25*kappa^2*s * (1 - u/2 + u^2/6).
inline double eval_inverse_approx(double s, double kappa) {
    if (!(kappa >= 1.0)) throw std::invalid_argument("eval_inverse_approx: kappa must be >= 1");
    if (s == 0.0) return 0.0;
    const double u = (5.0 * kappa * s) * (5.0 * kappa * s);
    if (std::abs(s) < 1e-3 / kappa) {
        return 25.0 * kappa * kappa * s * (1.0 - u * 0.5 + u * u / 6.0);
    }
    return (1.0 - std::exp(-u)) / s;
}

// eta * F(s) / kappa; odd, bounded by eta in magnitude.
inline double eval_normalized_target(double s, const TargetSpec &spec) {
    spec.validate();
    return spec.eta_qsvt * eval_inverse_approx(s, spec.kappa_qsvt) / spec.kappa_qsvt;
}

// Smallest admissible kappa_qsvt for a block-encoded matrix: rho_A / ||A||,
// the reciprocal of the minimal singular value.
inline double min_valid_kappa(double matrix_norm, double rho_a) {
    if (!(matrix_norm > 0.0 && matrix_norm <= 1.0))
        throw std::invalid_argument("min_valid_kappa: matrix norm must be in (0,1]");
    if (!(rho_a >= 1.0)) throw std::invalid_argument("min_valid_kappa: rho_A must be >= 1");
    return rho_a / matrix_norm;
}

}  // namespace qpf
