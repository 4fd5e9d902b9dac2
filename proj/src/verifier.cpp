#include "qpf/verifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpf/target_fn.hpp"

namespace qpf {

namespace {

bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// kappa admissibility for applying P[alpha] to singular values down to s_min.
// Strict validity is kappa >= 1/s_min; the Gaussian regularization keeps
// F(s) within 2e-9 of 1/s already for (5 s kappa)^2 >= 20, so slightly
// smaller kappa is accepted (inverting a norm-0.99 system with angles built
// for kappa0 = rho_A sits in this cushion).
void check_kappa_covers(double kappa, double s_min) {
    const double arg = 5.0 * s_min * kappa;
    if (!(arg * arg >= 20.0))
        throw std::invalid_argument("apply_inverse_via_svd: kappa_qsvt too small for the system's minimal singular value");
}

}  // namespace

int DiagonalSystem::n_x() const {
    int bits = 0;
    for (Eigen::Index n = diagonal.size(); n > 1; n >>= 1) ++bits;
    return bits;
}

void DiagonalSystem::validate() const {
    if (!is_pow2(diagonal.size())) throw std::invalid_argument("DiagonalSystem: size must be a power of two");
    const Eigen::VectorXd mags = diagonal.cwiseAbs();
    if (!(mags.minCoeff() > 0.0)) throw std::invalid_argument("DiagonalSystem: singular matrix (zero diagonal entry)");
    if (!(mags.maxCoeff() <= 1.0 + 1e-12)) throw std::invalid_argument("DiagonalSystem: spectral norm exceeds 1");
}

void SvdSystem::validate() const {
    const Eigen::Index n = singular_values.size();
    if (n < 1 || u_left.rows() != n || u_left.cols() != n || u_right.rows() != n || u_right.cols() != n)
        throw std::invalid_argument("SvdSystem: inconsistent factor shapes");
    if (!(singular_values.minCoeff() > 0.0)) throw std::invalid_argument("SvdSystem: singular values must be positive");
    if (!(singular_values.maxCoeff() <= 1.0 + 1e-12)) throw std::invalid_argument("SvdSystem: spectral norm exceeds 1");
}

ErrorSweep sweep_error(const AngleSet &angles, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("sweep_error: need at least 2 grid points");
    const double kappa = angles.kappa_qsvt;
    const TargetSpec spec{kappa, angles.eta};

    ErrorSweep sweep;
    sweep.kappa0 = kappa;
    sweep.s_values.resize(grid_points);
    const double lo = 1.0 / kappa, hi = 1.0;
    for (int i = 0; i < grid_points; ++i)
        sweep.s_values[i] = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);

    sweep.p_values = eval_poly_batch(angles, sweep.s_values);
    sweep.target_values.resize(grid_points);
    for (int i = 0; i < grid_points; ++i) sweep.target_values[i] = eval_normalized_target(sweep.s_values[i], spec);
    sweep.errors = sweep.p_values - sweep.target_values;

    sweep.max_err = -1.0;
    for (int i = 0; i < grid_points; ++i) {
        const double e = std::abs(sweep.errors[i]);
        if (e > sweep.max_err) {
            sweep.max_err = e;
            sweep.argmax_s = sweep.s_values[i];
        }
    }
    return sweep;
}

DiagonalSystem build_test_matrix_F(double kappa, double eta_a, int n_x) {
    if (!(kappa >= 1.0)) throw std::invalid_argument("build_test_matrix_F: kappa must be >= 1");
    if (!(eta_a > 0.0 && eta_a <= 1.0)) throw std::invalid_argument("build_test_matrix_F: eta_A must be in (0,1]");
    if (n_x < 1) throw std::invalid_argument("build_test_matrix_F: n_x must be >= 1");

    const Eigen::Index nx = Eigen::Index{1} << n_x;
    const Eigen::Index half = nx / 2;
    DiagonalSystem sys;
    sys.diagonal.resize(nx);
    sys.eta_a = eta_a;

    // Positive half-grid uniform on [1/kappa, 1]; the negative half mirrors
    // it so entries are odd-symmetric across the grid midpoint.
    for (Eigen::Index i = 0; i < half; ++i) {
        const double x = half == 1 ? 1.0
                                   : 1.0 / kappa + (1.0 - 1.0 / kappa) * static_cast<double>(i) /
                                                       static_cast<double>(half - 1);
        const double d = eta_a / kappa * eval_inverse_approx(x, kappa);
        sys.diagonal[half + i] = d;
        sys.diagonal[half - 1 - i] = -d;
    }

    const Eigen::VectorXd mags = sys.diagonal.cwiseAbs();
    sys.norm = mags.maxCoeff();
    sys.rho_a = sys.norm / mags.minCoeff();
    sys.validate();
    return sys;
}

DiagonalSystem build_test_matrix_sin(int n_x, double xi_max) {
    if (n_x < 2) throw std::invalid_argument("build_test_matrix_sin: n_x must be >= 2");
    if (!(xi_max > 0.0 && xi_max <= std::numbers::pi / 2))
        throw std::invalid_argument("build_test_matrix_sin: xi_max must be in (0, pi/2]");

    const Eigen::Index nx = Eigen::Index{1} << n_x;
    DiagonalSystem sys;
    sys.diagonal.resize(nx);
    sys.xi_max = xi_max;
    for (Eigen::Index k = 0; k < nx; ++k) {
        const double xi = -xi_max + 2.0 * xi_max * static_cast<double>(k) / static_cast<double>(nx - 1);
        sys.diagonal[k] = std::sin(xi);
    }
    const Eigen::VectorXd mags = sys.diagonal.cwiseAbs();
    sys.norm = mags.maxCoeff();
    sys.rho_a = sys.norm / mags.minCoeff();
    sys.validate();
    return sys;
}

Eigen::VectorXd apply_inverse_via_svd(const DiagonalSystem &system, const AngleSet &angles,
                                      const Eigen::VectorXd &init) {
    system.validate();
    if (init.size() != system.diagonal.size())
        throw std::invalid_argument("apply_inverse_via_svd: init length mismatch");
    check_kappa_covers(angles.kappa_qsvt, system.norm / system.rho_a);

    // Diagonal SVD: U_l = diag(sign d_k), S = diag|d_k|, U_r = I. Odd P gives
    // out_k = sign(d_k) P(|d_k|) init_k.
    const Eigen::VectorXd p = eval_poly_batch(angles, system.diagonal.cwiseAbs());
    Eigen::VectorXd out(init.size());
    for (Eigen::Index k = 0; k < init.size(); ++k)
        out[k] = (system.diagonal[k] < 0.0 ? -p[k] : p[k]) * init[k];
    return out;
}

Eigen::VectorXd apply_inverse_via_svd(const DiagonalSystem &system, const AngleSet &angles) {
    const Eigen::Index nx = system.diagonal.size();
    const double amp = 1.0 / std::sqrt(static_cast<double>(nx));
    return apply_inverse_via_svd(system, angles, Eigen::VectorXd::Constant(nx, amp));
}

Eigen::VectorXd apply_inverse_via_svd(const SvdSystem &system, const AngleSet &angles,
                                      const Eigen::VectorXd &init) {
    system.validate();
    if (init.size() != system.singular_values.size())
        throw std::invalid_argument("apply_inverse_via_svd: init length mismatch");
    check_kappa_covers(angles.kappa_qsvt, system.singular_values.minCoeff());

    const Eigen::VectorXd p = eval_poly_batch(angles, system.singular_values);
    return system.u_left * p.asDiagonal() * (system.u_right.adjoint() * init);
}

InversionError inversion_error(const DiagonalSystem &system, const AngleSet &angles) {
    const Eigen::Index nx = system.diagonal.size();
    const double renorm = std::sqrt(static_cast<double>(nx));  // 2^{n_x/2}
    const Eigen::VectorXd init = Eigen::VectorXd::Constant(nx, 1.0 / renorm);

    const Eigen::VectorXd qsvt = apply_inverse_via_svd(system, angles, init);
    InversionError err;
    err.per_point.resize(nx);
    err.qsvt_scaled.resize(nx);
    err.exact_scaled.resize(nx);
    err.max_abs_err = -1.0;
    for (Eigen::Index k = 0; k < nx; ++k) {
        err.qsvt_scaled[k] = qsvt[k] * renorm / angles.eta;
        err.exact_scaled[k] = (init[k] / system.diagonal[k]) * renorm / angles.kappa_qsvt;
        err.per_point[k] = err.qsvt_scaled[k] - err.exact_scaled[k];
        if (std::abs(err.per_point[k]) > err.max_abs_err) {
            err.max_abs_err = std::abs(err.per_point[k]);
            err.argmax_index = k;
        }
    }
    return err;
}

}  // namespace qpf
