#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qpf/qsp_eval.hpp"

namespace qpf {

// Dense error profile of P[alpha] against the normalized target eta*F/kappa
// on [1/kappa0, 1].
struct ErrorSweep {
    double kappa0 = 0.0;
    Eigen::VectorXd s_values;
    Eigen::VectorXd p_values;
    Eigen::VectorXd target_values;
    Eigen::VectorXd errors;  // p - target
    double max_err = 0.0;    // max |errors|
    double argmax_s = 0.0;
};

// Diagonal test matrix with signed entries; singular values are |d_k|.
// Size must be a power of two (N_x = 2^{n_x}).
struct DiagonalSystem {
    Eigen::VectorXd diagonal;
    std::optional<double> eta_a;    // construction parameter of the F matrix
    std::optional<double> xi_max;   // construction parameter of the sin matrix
    double rho_a = 0.0;             // max|d| / min|d|
    double norm = 0.0;              // max|d|

    int n_x() const;
    void validate() const;
};

// Externally supplied SVD factors A = U_l diag(s) U_r^dagger; the verifier
// applies the polynomial to the singular values (P(A) = U_l P(S) U_r^dagger).
struct SvdSystem {
    Eigen::MatrixXd u_left;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd u_right;

    double norm() const { return singular_values.maxCoeff(); }
    double rho_a() const { return singular_values.maxCoeff() / singular_values.minCoeff(); }
    void validate() const;
};

ErrorSweep sweep_error(const AngleSet &angles, int grid_points = 2001);

// Diagonal (eta_A / kappa) * F(x_k) on a symmetric uniform grid over
// [-1, -1/kappa] U [1/kappa, 1]; condition number equals kappa(1 - e^-25)
// and the spectral norm equals eta_A(1 - e^-25).
DiagonalSystem build_test_matrix_F(double kappa, double eta_a, int n_x);

// Diagonal sin(xi_k) on xi_k = -xi_max + 2 xi_max k/(N_x - 1); spectral norm
// sin(xi_max).
DiagonalSystem build_test_matrix_sin(int n_x, double xi_max);

// Odd-polynomial action on the SVD of the diagonal matrix:
// out_k = sign(d_k) P(|d_k|) init_k, which approximates (eta/kappa) A^-1 init.
// The kappa-validity precondition is enforced up to the
// Gaussian-regularization cushion; see notes in the implementation.
Eigen::VectorXd apply_inverse_via_svd(const DiagonalSystem &system, const AngleSet &angles,
                                      const Eigen::VectorXd &init);
Eigen::VectorXd apply_inverse_via_svd(const DiagonalSystem &system, const AngleSet &angles);  // uniform init

// Same action for general SVD factors.
Eigen::VectorXd apply_inverse_via_svd(const SvdSystem &system, const AngleSet &angles,
                                      const Eigen::VectorXd &init);

// Pointwise error profile on the renormalized scale: the QSVT output is
// scaled by 2^{n_x/2}/eta and the exact inverse action by 2^{n_x/2}/kappa,
// so both encode the same O(1) profile.
struct InversionError {
    double max_abs_err = 0.0;
    Eigen::VectorXd per_point;
    Eigen::VectorXd qsvt_scaled;
    Eigen::VectorXd exact_scaled;
    Eigen::Index argmax_index = 0;
};
InversionError inversion_error(const DiagonalSystem &system, const AngleSet &angles);

}  // namespace qpf
