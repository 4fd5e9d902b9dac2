#include "qpf/angle_estimator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpf/parallel.hpp"
#include "qpf/target_fn.hpp"

namespace qpf {

long long estimate_na(double kappa0, const MetaParams &meta, long long na_cap) {
    if (!(kappa0 > 0.0)) throw std::invalid_argument("estimate_na: kappa0 must be positive");
    if (meta.na_ref < 2 || !(meta.kappa_ref > 0.0)) throw std::invalid_argument("estimate_na: invalid MetaParams");
    const double raw = static_cast<double>(meta.na_ref) * kappa0 / meta.kappa_ref;
    if (raw > static_cast<double>(na_cap)) throw std::runtime_error("estimate_na: N_a cap exceeded");
    long long na0 = static_cast<long long>(std::floor(raw));
    long long na = na0 + na0 % 2;
    if (na > na_cap) throw std::runtime_error("estimate_na: N_a cap exceeded");
    if (na < 2) throw std::invalid_argument("estimate_na: kappa0 too small for the reference scaling");
    return na;
}

Eigen::VectorXd build_envelope_values(Eigen::Index n_points, const Eigen::VectorXd &c_sh) {
    if (n_points < 2) throw std::invalid_argument("build_envelope_values: need at least 2 points");
    Eigen::VectorXd out(n_points);
    parallel::for_each_index(n_points, [&](std::ptrdiff_t j) {
        const double r = static_cast<double>(j) / static_cast<double>(n_points - 1);
        const double t = std::acos(r);
        double acc = 0.0;
        for (Eigen::Index l = 0; l < c_sh.size(); ++l) acc += c_sh[l] * std::cos(2.0 * l * t);
        out[j] = acc;
    });
    return out;
}

AngleSet estimate_angles(const EstimateRequest &request) {
    const MetaParams &meta = request.meta;
    const long long na = estimate_na(request.kappa0, meta, request.na_cap);
    if (na < 8) throw std::invalid_argument("estimate_angles: N_a < 8 is out of estimation range");
    const Eigen::Index half = static_cast<Eigen::Index>(na / 2);
    const Eigen::Index n_pos = static_cast<Eigen::Index>(na / 4);
    const Eigen::Index n_neg = half - n_pos;

    const double theta_max = eval_amplitude_model(meta.c_ampl, request.kappa0);
    if (!(theta_max > 0.0))
        throw std::invalid_argument("estimate_angles: amplitude model gives non-positive Theta_max (kappa0 outside the model's range)");

    Eigen::VectorXd pos = build_envelope_values(n_pos, meta.c_sh_pos);
    Eigen::VectorXd neg = build_envelope_values(n_neg, meta.c_sh_neg);

    // Endpoint calibration. P[phi](1) = -sin(sum_j theta_j), so the total of
    // the reconstructed angles must be -asin(eta F(1)/kappa0). The fitted
    // envelope pair misses the underlying sum rule by O(1/N_a,ref), and the
    // defect is amplified by the N_a of the target, leaving a plateau of
    // s = 1 error for kappa0 far from kappa_ref. A bump w(r) = r(1 - r),
    // vanishing at both ends, absorbs the defect without touching the
    // envelope maximum (r = 1) or the edge signs (r = 0).
    if (request.endpoint_calibration) {
        const double target_sum = -std::asin(meta.eta * eval_inverse_approx(1.0, request.kappa0) / request.kappa0);
        const double env_max = std::max(pos.cwiseAbs().maxCoeff(), neg.cwiseAbs().maxCoeff());
        if (!(env_max > 0.0)) throw std::invalid_argument("estimate_angles: degenerate envelope");
        double raw_sum = 2.0 * (pos.sum() + neg.sum());
        double bump_total = 0.0;
        auto bump_sum = [](Eigen::Index m) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                const double r = static_cast<double>(j) / static_cast<double>(m - 1);
                acc += r * (1.0 - r);
            }
            return acc;
        };
        bump_total = 2.0 * (bump_sum(n_pos) + bump_sum(n_neg));
        if (bump_total > 0.0) {  // N_a = 8 has no interior points to carry the bump
            const double mu = (target_sum * env_max / theta_max - raw_sum) / bump_total;
            for (Eigen::Index j = 0; j < n_pos; ++j) {
                const double r = static_cast<double>(j) / static_cast<double>(n_pos - 1);
                pos[j] += mu * r * (1.0 - r);
            }
            for (Eigen::Index j = 0; j < n_neg; ++j) {
                const double r = static_cast<double>(j) / static_cast<double>(n_neg - 1);
                neg[j] += mu * r * (1.0 - r);
            }
        }
    }

    Eigen::VectorXd theta = merge_envelope(pos, neg);

    // Rescale so max|theta| is exactly the amplitude-model value; the fitted
    // envelopes peak at 1 only up to their fit residual.
    const double env_max = theta.cwiseAbs().maxCoeff();
    if (!(env_max > 0.0)) throw std::invalid_argument("estimate_angles: degenerate envelope");
    theta *= theta_max / env_max;

    AngleSet set;
    set.convention = Convention::phi;
    set.values = std::move(theta);
    set.values.array() += std::numbers::pi / 2;
    set.kappa_qsvt = request.kappa0;
    set.eta = meta.eta;
    set.origin = AngleOrigin::estimated;
    return set;
}

}  // namespace qpf
