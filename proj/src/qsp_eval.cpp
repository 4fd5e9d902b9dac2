#include "qpf/qsp_eval.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qpf/parallel.hpp"

namespace qpf {

namespace {
constexpr double kPi = std::numbers::pi;

// Shift applied to phi to reach the given convention at index j.
double shift_from_phi(Convention c, Eigen::Index j, Eigen::Index n) {
    switch (c) {
        case Convention::phi: return 0.0;
        case Convention::theta: return kPi / 2;
        case Convention::alpha: return (j == 0 || j == n - 1) ? kPi / 4 : kPi / 2;
    }
    throw std::invalid_argument("unknown angle convention");
}
}  // namespace

std::string to_string(Convention c) {
    switch (c) {
        case Convention::phi: return "phi";
        case Convention::theta: return "theta";
        case Convention::alpha: return "alpha";
    }
    throw std::invalid_argument("unknown angle convention");
}

std::string to_string(AngleOrigin o) {
    switch (o) {
        case AngleOrigin::solved: return "solved";
        case AngleOrigin::estimated: return "estimated";
        case AngleOrigin::loaded: return "loaded";
    }
    throw std::invalid_argument("unknown angle origin");
}

Convention convention_from_string(const std::string &s) {
    if (s == "phi") return Convention::phi;
    if (s == "theta") return Convention::theta;
    if (s == "alpha") return Convention::alpha;
    throw std::invalid_argument("unknown angle convention: " + s);
}

AngleOrigin origin_from_string(const std::string &s) {
    if (s == "solved") return AngleOrigin::solved;
    if (s == "estimated") return AngleOrigin::estimated;
    if (s == "loaded") return AngleOrigin::loaded;
    throw std::invalid_argument("unknown angle origin: " + s);
}

void AngleSet::validate(double symmetry_tol) const {
    const Eigen::Index n = values.size();
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("AngleSet: length must be even and >= 2");
    if (!(kappa_qsvt >= 1.0)) throw std::invalid_argument("AngleSet: kappa_qsvt must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("AngleSet: eta must be in (0,1)");
    for (Eigen::Index j = 0; j < n / 2; ++j) {
        if (std::abs(values[j] - values[n - 1 - j]) > symmetry_tol)
            throw std::invalid_argument("AngleSet: inversion symmetry violated");
    }
}

AngleSet convert(const AngleSet &angles, Convention to) {
    if (angles.convention == to) return angles;
    AngleSet out = angles;
    out.convention = to;
    const Eigen::Index n = angles.values.size();
    for (Eigen::Index j = 0; j < n; ++j) {
        double phi = angles.values[j] + shift_from_phi(angles.convention, j, n);
        out.values[j] = phi - shift_from_phi(to, j, n);
    }
    return out;
}

namespace detail {

double eval_product(const PhaseTable &phases, double s) {
    const Eigen::Index n = phases.ec.size();
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    Su2 m{phases.ec[0], phases.es[0], 0.0, 0.0};
    for (Eigen::Index l = 1; l < n; ++l)
        mul_right(m, s * phases.ec[l], s * phases.es[l], c * phases.es[l], c * phases.ec[l]);
    return m.ar;
}

double eval_product_grad(const PhaseTable &phases, double s, Eigen::VectorXd &grad) {
    const Eigen::Index n = phases.ec.size();
    grad.resize(n);
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));

    // Suffix pass: suffix[l] = prod_{m=l+1}^{n-1} W e^{i alpha_m Z}.
    static thread_local std::vector<Su2> suffix;
    suffix.assign(static_cast<size_t>(n), Su2{});
    Su2 sfx{};  // identity
    for (Eigen::Index l = n - 2; l >= 0; --l) {
        mul_left(sfx, s * phases.ec[l + 1], s * phases.es[l + 1], c * phases.es[l + 1], c * phases.ec[l + 1]);
        suffix[static_cast<size_t>(l)] = sfx;
    }

    // Prefix pass: with P = e^{i a0 Z} ... W e^{i a_l Z} and S = suffix[l],
    // d(Re U_00)/d a_l = Re[(P (iZ) S)_00] = -Im(a_P a_S + b_P conj(b_S)).
    Su2 p{phases.ec[0], phases.es[0], 0.0, 0.0};
    for (Eigen::Index l = 0; l < n; ++l) {
        if (l > 0) mul_right(p, s * phases.ec[l], s * phases.es[l], c * phases.es[l], c * phases.ec[l]);
        const Su2 &sx = suffix[static_cast<size_t>(l)];
        grad[l] = -(p.ar * sx.ai + p.ai * sx.ar + p.bi * sx.br - p.br * sx.bi);
    }
    // p now holds the full product.
    return p.ar;
}

}  // namespace detail

namespace {
Eigen::VectorXd to_alpha_values(const AngleSet &angles) {
    if (angles.convention == Convention::alpha) return angles.values;
    return convert(angles, Convention::alpha).values;
}

void check_s(double s) {
    if (!(std::abs(s) <= 1.0)) throw std::invalid_argument("eval_poly: |s| must be <= 1");
}
}  // namespace

double eval_poly(const AngleSet &angles, double s) {
    if (angles.size() < 2) throw std::invalid_argument("eval_poly: need N_a >= 2");
    check_s(s);
    return detail::eval_product(detail::PhaseTable(to_alpha_values(angles)), s);
}

double eval_poly_grad(const AngleSet &angles, double s, Eigen::VectorXd &grad) {
    if (angles.size() < 2) throw std::invalid_argument("eval_poly_grad: need N_a >= 2");
    check_s(s);
    return detail::eval_product_grad(detail::PhaseTable(to_alpha_values(angles)), s, grad);
}

Eigen::VectorXd eval_poly_batch(const AngleSet &angles, const Eigen::VectorXd &s_grid) {
    if (angles.size() < 2) throw std::invalid_argument("eval_poly_batch: need N_a >= 2");
    for (Eigen::Index i = 0; i < s_grid.size(); ++i) check_s(s_grid[i]);
    const detail::PhaseTable phases(to_alpha_values(angles));
    Eigen::VectorXd out(s_grid.size());
    parallel::for_each_index(s_grid.size(),
                             [&](std::ptrdiff_t i) { out[i] = detail::eval_product(phases, s_grid[i]); });
    return out;
}

}  // namespace qpf
