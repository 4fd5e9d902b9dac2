#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace qpf {

// Angle conventions of the same QSVT sequence:
//   theta_j = phi_j - pi/2                              (all j)
//   alpha_j = phi_j - pi/4   at j = 0 and j = N_a - 1,
//   alpha_j = phi_j - pi/2   elsewhere.
enum class Convention { phi, theta, alpha };
enum class AngleOrigin { solved, estimated, loaded };

std::string to_string(Convention c);
std::string to_string(AngleOrigin o);
Convention convention_from_string(const std::string &s);
AngleOrigin origin_from_string(const std::string &s);

// A QSVT phase sequence: even length, inversion-symmetric
// (values[j] == values[N_a-1-j]), tagged with the kappa/eta it was built for.
struct AngleSet {
    Convention convention = Convention::phi;
    Eigen::VectorXd values;
    double kappa_qsvt = 1.0;
    double eta = 0.125;
    AngleOrigin origin = AngleOrigin::solved;
    std::optional<double> eps_reported;

    Eigen::Index size() const { return values.size(); }
    void validate(double symmetry_tol = 1e-12) const;
};

// Convention change; exact involution up to one rounding per entry.
AngleSet convert(const AngleSet &angles, Convention to);

// P[alpha](s) = Re U_00 of U[alpha](s) = e^{i a0 Z} prod_l W(s) e^{i a_l Z},
// W(s) = [[s, i sqrt(1-s^2)], [i sqrt(1-s^2), s]]. Accepts any convention
// (converted internally). |s| <= 1 required; |result| <= 1 by unitarity.
double eval_poly(const AngleSet &angles, double s);

// Value and d(Re U_00)/d(alpha_l) for every l, via one suffix pass storing
// the partial products and one prefix pass combining them (O(N_a)).
double eval_poly_grad(const AngleSet &angles, double s, Eigen::VectorXd &grad);

// Element-wise eval_poly over a grid; parallel over points, output identical
// to a sequential loop.
Eigen::VectorXd eval_poly_batch(const AngleSet &angles, const Eigen::VectorXd &s_grid);

namespace detail {

// Unitaries of the product stay in SU(2): U = [[a, b], [-conj(b), conj(a)]],
// tracked as (re a, im a, re b, im b).
struct Su2 {
    double ar = 1.0, ai = 0.0, br = 0.0, bi = 0.0;
};

// cos/sin of each alpha, computed once and shared across evaluation points.
struct PhaseTable {
    Eigen::VectorXd ec, es;
    explicit PhaseTable(const Eigen::VectorXd &alpha)
        : ec(alpha.size()), es(alpha.size()) {
        for (Eigen::Index l = 0; l < alpha.size(); ++l) {
            ec[l] = std::cos(alpha[l]);
            es[l] = std::sin(alpha[l]);
        }
    }
};

// W(s) e^{i alpha Z} in SU(2) form: a_g = s e^{i alpha}, b_g = i c e^{-i alpha}
// with c = sqrt(1 - s^2), i.e. (gar, gai, gbr, gbi) = (s ec, s es, c es, c ec).

// m <- m * g
inline void mul_right(Su2 &m, double gar, double gai, double gbr, double gbi) {
    const double ar = m.ar * gar - m.ai * gai - m.br * gbr - m.bi * gbi;
    const double ai = m.ar * gai + m.ai * gar + m.br * gbi - m.bi * gbr;
    const double br = m.ar * gbr - m.ai * gbi + m.br * gar + m.bi * gai;
    const double bi = m.ar * gbi + m.ai * gbr + m.bi * gar - m.br * gai;
    m.ar = ar;
    m.ai = ai;
    m.br = br;
    m.bi = bi;
}

// m <- g * m
inline void mul_left(Su2 &m, double gar, double gai, double gbr, double gbi) {
    const double ar = gar * m.ar - gai * m.ai - gbr * m.br - gbi * m.bi;
    const double ai = gar * m.ai + gai * m.ar + gbr * m.bi - gbi * m.br;
    const double br = gar * m.br - gai * m.bi + gbr * m.ar + gbi * m.ai;
    const double bi = gar * m.bi + gai * m.br + gbi * m.ar - gbr * m.ai;
    m.ar = ar;
    m.ai = ai;
    m.br = br;
    m.bi = bi;
}

// Core evaluation over raw alpha values; the solver's hot loop enters here
// with a shared PhaseTable.
double eval_product(const PhaseTable &phases, double s);
double eval_product_grad(const PhaseTable &phases, double s, Eigen::VectorXd &grad);

}  // namespace detail

}  // namespace qpf
