#include "qpf/meta_fit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qpf {

namespace {

// r_j = j / (M - 1); rejects M < 2 (the envelope grid is undefined for a
// single point, which first occurs for N_a <= 7).
Eigen::VectorXd envelope_grid(Eigen::Index m) {
    if (m < 2) throw std::invalid_argument("envelope grid needs at least 2 points");
    Eigen::VectorXd r(m);
    for (Eigen::Index j = 0; j < m; ++j) r[j] = static_cast<double>(j) / static_cast<double>(m - 1);
    return r;
}

Eigen::MatrixXd envelope_design(const Eigen::VectorXd &r, int n_sh) {
    Eigen::MatrixXd design(r.size(), n_sh);
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double t = std::acos(r[j]);
        for (int l = 0; l < n_sh; ++l) design(j, l) = std::cos(2.0 * l * t);
    }
    return design;
}

bool first_half_index_is_positive(Eigen::Index j, Eigen::Index half) { return (half - 1 - j) % 2 == 1; }

}  // namespace

void ReferenceBank::validate() const {
    if (entries.empty()) throw std::invalid_argument("ReferenceBank: empty");
    const double eta = entries.front().angles.eta;
    double prev_kappa = 0.0;
    for (const auto &e : entries) {
        e.angles.validate();
        if (e.angles.eta != eta) throw std::invalid_argument("ReferenceBank: inconsistent eta across entries");
        if (!(e.kappa_ref > prev_kappa)) throw std::invalid_argument("ReferenceBank: kappas must be strictly increasing");
        prev_kappa = e.kappa_ref;
    }
}

double extract_theta_max(const AngleSet &angles) {
    if (angles.size() == 0) throw std::invalid_argument("extract_theta_max: empty angle set");
    const AngleSet theta = convert(angles, Convention::theta);
    return theta.values.cwiseAbs().maxCoeff();
}

double eval_amplitude_model(const Eigen::VectorXd &c_ampl, double kappa) {
    double acc = 0.0, pow_inv = 1.0;
    for (Eigen::Index l = 0; l < c_ampl.size(); ++l) {
        acc += c_ampl[l] * pow_inv;
        pow_inv /= kappa;
    }
    return acc;
}

Eigen::VectorXd fit_amplitude(const ReferenceBank &bank, int n_ampl, double *residual) {
    bank.validate();
    if (n_ampl < 1) throw std::invalid_argument("fit_amplitude: n_ampl must be >= 1");
    const Eigen::Index n = bank.count();
    if (n < n_ampl) throw std::invalid_argument("fit_amplitude: need at least n_ampl reference sets");

    Eigen::MatrixXd design(n, n_ampl);
    Eigen::VectorXd data(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double kappa = bank.entries[static_cast<size_t>(j)].kappa_ref;
        double pow_inv = 1.0;
        for (int l = 0; l < n_ampl; ++l) {
            design(j, l) = pow_inv;
            pow_inv /= kappa;
        }
        data[j] = extract_theta_max(bank.entries[static_cast<size_t>(j)].angles);
    }

    const auto qr = design.colPivHouseholderQr();
    if (qr.rank() < n_ampl) throw std::invalid_argument("fit_amplitude: rank-deficient design matrix");
    const Eigen::VectorXd c = qr.solve(data);
    if (residual) *residual = (design * c - data).norm();
    return c;
}

EnvelopeSplit split_envelope(const AngleSet &angles) {
    angles.validate();
    const AngleSet theta_set = convert(angles, Convention::theta);
    const Eigen::VectorXd &theta = theta_set.values;
    const Eigen::Index na = theta.size();
    const Eigen::Index half = na / 2;

    const double theta_max = theta.cwiseAbs().maxCoeff();
    if (!(theta_max > 0.0)) throw std::invalid_argument("split_envelope: theta is identically zero");
    const Eigen::VectorXd norm_half = theta.head(half) / theta_max;

    // Sign-pattern validation: the classification itself is by parity of the
    // distance from the center, which is robust where the edge magnitudes
    // decay to zero; sign inspection is a consistency check.
    std::ostringstream bad;
    for (Eigen::Index j = 0; j < half; ++j) {
        const double v = norm_half[j];
        if (std::abs(v) <= 1e-12) continue;
        const bool want_pos = first_half_index_is_positive(j, half);
        if ((v > 0.0) != want_pos) bad << ' ' << j;
    }
    const std::string bad_str = bad.str();
    if (!bad_str.empty())
        throw std::invalid_argument("split_envelope: sign pattern violated at first-half indices" + bad_str);

    const Eigen::Index n_pos = na / 4;  // floor
    const Eigen::Index n_neg = half - n_pos;
    EnvelopeSplit split;
    split.pos.resize(n_pos);
    split.neg.resize(n_neg);
    Eigen::Index ip = 0, in = 0;
    for (Eigen::Index j = 0; j < half; ++j) {
        if (first_half_index_is_positive(j, half))
            split.pos[ip++] = norm_half[j];
        else
            split.neg[in++] = norm_half[j];
    }
    return split;
}

Eigen::VectorXd merge_envelope(const Eigen::VectorXd &pos, const Eigen::VectorXd &neg) {
    const Eigen::Index half = pos.size() + neg.size();
    const Eigen::Index na = 2 * half;
    if (pos.size() != na / 4) throw std::invalid_argument("merge_envelope: positive count must be floor(N_a/4)");
    Eigen::VectorXd full(na);
    Eigen::Index ip = 0, in = 0;
    for (Eigen::Index j = 0; j < half; ++j) {
        full[j] = first_half_index_is_positive(j, half) ? pos[ip++] : neg[in++];
        full[na - 1 - j] = full[j];
    }
    return full;
}

Eigen::VectorXd fit_envelope(const Eigen::VectorXd &normalized_values, int n_sh, double *residual) {
    if (n_sh < 1) throw std::invalid_argument("fit_envelope: n_sh must be >= 1");
    const Eigen::Index m = normalized_values.size();
    const Eigen::VectorXd r = envelope_grid(m);
    // Orthogonal factorization; arccos clustering near r = 1 makes the
    // normal equations ill-conditioned.
    const Eigen::MatrixXd design = envelope_design(r, n_sh);
    const Eigen::VectorXd c = design.colPivHouseholderQr().solve(normalized_values);
    if (residual) *residual = (design * c - normalized_values).norm();
    return c;
}

MetaParams build_meta(const ReferenceBank &bank, double envelope_ref_kappa, int n_ampl, int n_sh) {
    bank.validate();
    const ReferenceBank::Entry *ref = nullptr;
    for (const auto &e : bank.entries) {
        if (e.kappa_ref == envelope_ref_kappa) ref = &e;
    }
    if (!ref) throw std::invalid_argument("build_meta: envelope reference kappa not present in bank");

    MetaParams meta;
    meta.kappa_ref = envelope_ref_kappa;
    meta.na_ref = static_cast<int>(ref->angles.size());
    meta.eta = ref->angles.eta;
    meta.c_ampl = fit_amplitude(bank, n_ampl, &meta.fit_residuals.ampl);

    const EnvelopeSplit split = split_envelope(ref->angles);
    meta.c_sh_pos = fit_envelope(split.pos, n_sh, &meta.fit_residuals.env_pos);
    meta.c_sh_neg = fit_envelope(split.neg, n_sh, &meta.fit_residuals.env_neg);

    meta.bank_kappas.reserve(static_cast<size_t>(bank.count()));
    for (const auto &e : bank.entries) meta.bank_kappas.push_back(e.kappa_ref);
    return meta;
}

}  // namespace qpf
