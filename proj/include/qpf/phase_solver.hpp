#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qpf/cheb.hpp"
#include "qpf/qsp_eval.hpp"

namespace qpf {

struct SolveConfig {
    double kappa_qsvt = 10.0;
    double eta = 0.125;
    double eps_target = 1e-7;
    std::optional<int> na_override;  // even when present
    int quadrature_nq = 0;           // 0: use 2 * N_a
    int max_iterations = 50000;
    double grad_tolerance = 1e-10;
    int history_size = 10;
    int na_cap = 1 << 20;
    int verbose = 0;  // > 0: progress to stderr every `verbose` iterations

    void validate() const;
};

struct SolveResult {
    AngleSet angles;  // phi convention, exactly symmetric by construction
    double final_loss = 0.0;
    int iterations = 0;
    double max_residual = 0.0;  // dense-grid |P - eta*F/kappa| over [1/kappa, 1]
    bool converged = false;
};

// Positive roots of T_{N_a}: x_k = cos((2k+1) pi / (2 N_a)), k = 0..N_a/2-1,
// strictly decreasing in (0,1). These are the loss nodes.
Eigen::VectorXd cheb_sample_nodes(int na);

// High-precision angles by minimizing
//   L(alpha) = sum_k |P[alpha](x_k) - Fbar(x_k)|^2
// over the N_a/2 free symmetric parameters (limited-memory quasi-Newton with
// backtracking line search, ansatz alpha_0 = pi/4). Fbar is the truncated
// Chebyshev series of the normalized target. Deterministic: fixed evaluation
// order, no randomized initialization.
SolveResult solve_angles(const SolveConfig &config);

// Max of |P[alpha](s) - eta*F(s)/kappa| over a uniform grid on [1/kappa, 1]
// and the location of the maximum.
struct ResidualReport {
    double max_err = 0.0;
    double argmax_s = 0.0;
};
ResidualReport residual_report(const AngleSet &angles, int grid_points = 2001);

}  // namespace qpf
