#pragma once

#include <Eigen/Dense>

#include "qpf/meta_fit.hpp"
#include "qpf/qsp_eval.hpp"

namespace qpf {

struct EstimateRequest {
    double kappa0 = 0.0;
    MetaParams meta;
    long long na_cap = 100000000;  // 1e8
    // Pin the reconstructed sum of theta to -asin(eta F(1)/kappa0), the value
    // P[phi](1) must see. Off reproduces the raw Table-1 reconstruction,
    // whose s = 1 error plateaus at the envelope pair's sum-rule defect.
    bool endpoint_calibration = true;
};

// N_a for the target kappa0: floor(na_ref * kappa0 / kappa_ref), bumped to
// the next even integer. Monotone in kappa0; throws beyond na_cap.
long long estimate_na(double kappa0, const MetaParams &meta, long long na_cap = 100000000);

// Envelope series sum_l c_sh[l] cos(2l arccos r_j) on r_j = j/(n_points-1).
Eigen::VectorXd build_envelope_values(Eigen::Index n_points, const Eigen::VectorXd &c_sh);

// Table 1, phase II: rebuilds the full symmetric theta sequence from the
// envelopes at the kappa0-sized grids, rescales to Theta_max(kappa0) from the
// amplitude model, and returns the phi-convention set (origin = estimated).
// Deterministic in (kappa0, meta).
AngleSet estimate_angles(const EstimateRequest &request);

}  // namespace qpf
