#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qpf/qsp_eval.hpp"

namespace qpf {

// Bank of high-precision reference angle sets, sorted by strictly increasing
// kappa; all entries solved at the same eta.
struct ReferenceBank {
    struct Entry {
        double kappa_ref;
        AngleSet angles;
    };
    std::vector<Entry> entries;

    void validate() const;
    Eigen::Index count() const { return static_cast<Eigen::Index>(entries.size()); }
};

// The compressed angle model: amplitude-series coefficients for
// Theta_max(kappa) = sum_l c_ampl[l] / kappa^l, plus the kappa-independent
// positive/negative envelope coefficients in the cos(2l arccos r) basis,
// anchored at a single reference set (kappa_ref, na_ref).
struct MetaParams {
    double kappa_ref = 0.0;
    int na_ref = 0;
    double eta = 0.125;
    Eigen::VectorXd c_ampl;
    Eigen::VectorXd c_sh_pos;
    Eigen::VectorXd c_sh_neg;
    struct Residuals {
        double ampl = 0.0;
        double env_pos = 0.0;
        double env_neg = 0.0;
    } fit_residuals;
    std::vector<double> bank_kappas;
};

// max_j |theta_j| (converted to theta internally).
double extract_theta_max(const AngleSet &angles);

// Least-squares fit of theta_max(kappa) in the basis {kappa^-l}, l < n_ampl,
// solved by orthogonal factorization of the design matrix. Returns the
// coefficients; `residual` (if given) receives ||model - data||_2.
Eigen::VectorXd fit_amplitude(const ReferenceBank &bank, int n_ampl = 5, double *residual = nullptr);

// Normalized first-half split of a symmetric theta sequence into its positive
// and negative subsequences (increasing index order). Index j of the first
// half is positive iff (N_a/2 - 1 - j) is odd; counts are N_pos = floor(N_a/4)
// and N_neg = N_a/2 - N_pos. Throws if the alternating sign pattern is
// violated away from zero-magnitude edges.
struct EnvelopeSplit {
    Eigen::VectorXd pos;
    Eigen::VectorXd neg;
};
EnvelopeSplit split_envelope(const AngleSet &angles);

// Interleaves positive/negative envelope values back into a first half by the
// same parity rule and mirrors it to the full symmetric sequence; exact
// inverse of split_envelope up to the theta_max scale.
Eigen::VectorXd merge_envelope(const Eigen::VectorXd &pos, const Eigen::VectorXd &neg);

// Least-squares fit of envelope samples G(r_j) on r_j = j/(M-1) in the even
// cosine basis cos(2l arccos r), l < n_sh.
Eigen::VectorXd fit_envelope(const Eigen::VectorXd &normalized_values, int n_sh = 20, double *residual = nullptr);

// Table 1, phase I: amplitude fit over the whole bank, envelope fit on the
// single reference set at envelope_ref_kappa (best: the largest bank kappa).
MetaParams build_meta(const ReferenceBank &bank, double envelope_ref_kappa, int n_ampl = 5, int n_sh = 20);

// Theta_max model evaluated at kappa.
double eval_amplitude_model(const Eigen::VectorXd &c_ampl, double kappa);

}  // namespace qpf
