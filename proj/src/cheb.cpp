#include "qpf/cheb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpf/parallel.hpp"
#include "qpf/target_fn.hpp"

namespace qpf {

namespace {

constexpr double kParityZeroTol = 1e-10;

// Zeroes the coefficients the parity forbids; throws if asked to zero
// something that is not already negligible.
void enforce_parity(Eigen::VectorXd &c, Parity parity) {
    if (parity == Parity::none) return;
    const int drop_mod = parity == Parity::odd ? 0 : 1;
    for (int k = 0; k < c.size(); ++k) {
        if (k % 2 == drop_mod) c[k] = 0.0;
    }
}

Parity detect_parity(const Eigen::VectorXd &c) {
    double max_even = 0.0, max_odd = 0.0;
    for (int k = 0; k < c.size(); ++k) {
        double a = std::abs(c[k]);
        (k % 2 == 0 ? max_even : max_odd) = std::max(k % 2 == 0 ? max_even : max_odd, a);
    }
    if (max_even <= kParityZeroTol && max_odd > kParityZeroTol) return Parity::odd;
    if (max_odd <= kParityZeroTol && max_even > kParityZeroTol) return Parity::even;
    return Parity::none;
}

}  // namespace

ChebSeries compute_coeffs(const std::function<double(double)> &f, int degree_nc, int quadrature_nq,
                          Parity parity_hint) {
    if (degree_nc < 0) throw std::invalid_argument("compute_coeffs: negative degree");
    if (quadrature_nq < degree_nc) throw std::invalid_argument("compute_coeffs: N_q must be >= N_c");
    if (quadrature_nq < 1) throw std::invalid_argument("compute_coeffs: N_q must be >= 1");

    const int nq = quadrature_nq;
    const int two_nq = 2 * nq;

    // Samples f_j = f(-cos(j pi / N_q)). The summand is symmetric under
    // j -> 2 N_q - j, so only j = 0..N_q enter, with interior terms doubled.
    Eigen::VectorXd samples(nq + 1);
    for (int j = 0; j <= nq; ++j) {
        double x = -std::cos(j * std::numbers::pi / nq);
        double v = f(x);
        if (!std::isfinite(v)) throw std::invalid_argument("compute_coeffs: non-finite sample of f");
        samples[j] = v;
    }

    // cos(m pi / N_q) for m = 0..2 N_q - 1; cos(k j pi / N_q) is a lookup at
    // (k*j) mod 2 N_q, tracked incrementally to avoid overflow.
    Eigen::VectorXd cos_table(two_nq);
    for (int m = 0; m < two_nq; ++m) cos_table[m] = std::cos(m * std::numbers::pi / nq);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(degree_nc + 1);
    parallel::for_each_index(degree_nc + 1, [&](std::ptrdiff_t kk) {
        const int k = static_cast<int>(kk);
        if (parity_hint == Parity::odd && k % 2 == 0) return;
        if (parity_hint == Parity::even && k % 2 == 1) return;
        double acc = samples[0];  // j = 0 term, cos(0) = 1
        int idx = 0;
        for (int j = 1; j < nq; ++j) {
            idx += k;
            if (idx >= two_nq) idx -= two_nq;
            acc += 2.0 * samples[j] * cos_table[idx];
        }
        idx += k;
        if (idx >= two_nq) idx -= two_nq;
        acc += samples[nq] * cos_table[idx];  // j = N_q term
        const double scale = (k == 0 ? 1.0 : 2.0) / two_nq;
        c[k] = scale * (k % 2 == 0 ? acc : -acc);
    });

    ChebSeries series;
    series.degree_nc = degree_nc;
    series.parity = parity_hint == Parity::none ? detect_parity(c) : parity_hint;
    enforce_parity(c, series.parity);
    series.coeffs = std::move(c);
    return series;
}

double eval_series(const ChebSeries &series, double s) {
    const auto &c = series.coeffs;
    const int n = series.degree_nc;
    double b1 = 0.0, b2 = 0.0;
    for (int k = n; k >= 1; --k) {
        double b0 = c[k] + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + s * b1 - b2;
}

Eigen::VectorXd eval_series_grid(const ChebSeries &series, const Eigen::VectorXd &s_grid) {
    Eigen::VectorXd out(s_grid.size());
    parallel::for_each_index(s_grid.size(), [&](std::ptrdiff_t i) { out[i] = eval_series(series, s_grid[i]); });
    return out;
}

int choose_degree(double kappa, double eps_target, double eta, int na_cap) {
    if (!(kappa >= 1.0)) throw std::invalid_argument("choose_degree: kappa must be >= 1");
    if (!(eps_target > 0.0 && eps_target < 1.0)) throw std::invalid_argument("choose_degree: eps_target in (0,1)");

    TargetSpec spec{kappa, eta};
    auto target = [&](double s) { return eval_normalized_target(s, spec); };

    // Reference expansion long enough that the candidate tail sits well inside
    // it; grown geometrically until the scan succeeds with 4x headroom. The
    // start size anticipates the Gaussian-width estimate N_a ~ 10 kappa
    // sqrt(ln(eta/eps)) to skip most of the ramp.
    const double na_guess = 10.0 * kappa * std::sqrt(std::max(1.0, std::log(eta / eps_target)));
    int start = 256;
    while (start < 4.4 * na_guess && start < (1 << 28)) start *= 2;
    for (int n_big = start;; n_big *= 2) {
        ChebSeries ref = compute_coeffs(target, n_big - 1, 2 * n_big, Parity::odd);
        // Suffix sums of |c_k|: tail(n) = sum_{k >= n} |c_k|.
        Eigen::VectorXd tail(n_big + 1);
        tail[n_big] = 0.0;
        for (int k = n_big - 1; k >= 0; --k) tail[k] = tail[k + 1] + std::abs(ref.coeffs[k]);
        for (int na = 2; na <= n_big / 4; na += 2) {
            if (tail[na] <= eps_target) {
                if (na > na_cap) throw std::runtime_error("choose_degree: N_a cap exceeded");
                return na;
            }
        }
        if (n_big / 4 >= na_cap) throw std::runtime_error("choose_degree: N_a cap exceeded");
    }
}

}  // namespace qpf
