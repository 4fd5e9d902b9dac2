#pragma once

#include <Eigen/Dense>
#include <functional>

namespace qpf {

enum class Parity { none, odd, even };

// Truncated Chebyshev expansion sum_{k=0}^{N_c} c_k T_k(s) with parity
// metadata. For parity == odd the even-index coefficients are exactly zero
// (enforced on construction); the angle count N_a = N_c + 1 is then even.
struct ChebSeries {
    int degree_nc = 0;
    Eigen::VectorXd coeffs;  // c_0 .. c_{N_c}
    Parity parity = Parity::none;

    int num_angles() const { return degree_nc + 1; }
};

// Chebyshev coefficients of f on [-1,1] through the discrete Fourier sum
//
//   c_k = (2 - delta_k0)/(2 N_q) * (-1)^k
//         * sum_{j=0}^{2 N_q - 1} f(-cos(j pi / N_q)) cos(k j pi / N_q),
//
// evaluated as a direct real-cosine sum in a fixed order (bit-reproducible,
// parallelized over k). Requires N_q >= N_c and finite samples of f.
// `parity_hint` skips coefficients known to vanish; with Parity::none the
// parity is detected from the computed coefficients (threshold 1e-10) and
// the vanishing ones are zeroed.
ChebSeries compute_coeffs(const std::function<double(double)> &f, int degree_nc, int quadrature_nq,
                          Parity parity_hint = Parity::none);

// Clenshaw backward-recurrence evaluation of the series at s in [-1,1].
double eval_series(const ChebSeries &series, double s);

// Element-wise eval_series over a grid (parallel over points).
Eigen::VectorXd eval_series_grid(const ChebSeries &series, const Eigen::VectorXd &s_grid);

// Smallest even N_a such that the Chebyshev tail of the normalized target
// eta*F/kappa beyond degree N_a - 1 has absolute sum <= eps_target. The tail
// is scanned on a reference expansion at least 4x longer than the returned
// degree. Fails if N_a would exceed na_cap.
int choose_degree(double kappa, double eps_target, double eta = 0.125, int na_cap = 1 << 20);

}  // namespace qpf
