#include "qpf/phase_solver.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "qpf/parallel.hpp"
#include "qpf/target_fn.hpp"

namespace qpf {

namespace {

constexpr double kPi = std::numbers::pi;

// Least-squares objective over the free (first-half) alpha parameters.
// Partial sums are accumulated per fixed-size node chunk and combined in
// chunk order, so results do not depend on the thread count.
class SymmetricLoss {
  public:
    SymmetricLoss(Eigen::VectorXd nodes, Eigen::VectorXd targets)
        : nodes_(std::move(nodes)), targets_(std::move(targets)), h_(nodes_.size()) {
        nchunks_ = (h_ + kChunk - 1) / kChunk;
        partial_loss_.resize(nchunks_);
        partial_grad_.resize(h_, nchunks_);
    }

    Eigen::Index dim() const { return h_; }

    double loss(const Eigen::VectorXd &y) {
        const detail::PhaseTable phases(mirror(y));
        return parallel::sum_over(h_, [&](std::ptrdiff_t k) {
            const double r = detail::eval_product(phases, nodes_[k]) - targets_[k];
            return r * r;
        });
    }

    double loss_grad(const Eigen::VectorXd &y, Eigen::VectorXd &grad) {
        const Eigen::VectorXd alpha = mirror(y);
        const detail::PhaseTable phases(alpha);
        parallel::for_each_index(
            nchunks_,
            [&](std::ptrdiff_t c) {
                const Eigen::Index begin = c * kChunk, end = std::min<Eigen::Index>(begin + kChunk, h_);
                double lacc = 0.0;
                Eigen::VectorXd gacc = Eigen::VectorXd::Zero(h_);
                Eigen::VectorXd gfull;
                for (Eigen::Index k = begin; k < end; ++k) {
                    const double r = detail::eval_product_grad(phases, nodes_[k], gfull) - targets_[k];
                    lacc += r * r;
                    gacc += r * (gfull.head(h_) + gfull.tail(h_).reverse());
                }
                partial_loss_[c] = lacc;
                partial_grad_.col(c) = gacc;
            },
            0, 1);
        double total = 0.0;
        grad = Eigen::VectorXd::Zero(h_);
        for (Eigen::Index c = 0; c < nchunks_; ++c) {
            total += partial_loss_[c];
            grad += partial_grad_.col(c);
        }
        grad *= 2.0;
        return total;
    }

    // Full symmetric alpha from the first half.
    static Eigen::VectorXd mirror(const Eigen::VectorXd &y) {
        const Eigen::Index h = y.size();
        Eigen::VectorXd alpha(2 * h);
        alpha.head(h) = y;
        alpha.tail(h) = y.reverse();
        return alpha;
    }

  private:
    static constexpr Eigen::Index kChunk = 64;
    Eigen::VectorXd nodes_, targets_;
    Eigen::Index h_ = 0, nchunks_ = 0;
    Eigen::VectorXd partial_loss_;
    Eigen::MatrixXd partial_grad_;
};

struct MinimizeOutcome {
    Eigen::VectorXd y;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Limited-memory quasi-Newton (two-loop recursion) with Armijo backtracking.
MinimizeOutcome minimize(SymmetricLoss &obj, Eigen::VectorXd y0, int max_iterations, double grad_tol,
                         int history, int verbose) {
    constexpr double kArmijoC1 = 1e-4;
    constexpr double kShrink = 0.5;
    constexpr double kMinStep = 1e-20;
    // Loss at which the fit is machine-exact per node. The rounding floor of
    // the gradient grows with the node count and can sit above grad_tol for
    // large N_a, so the loss floor is a convergence test in its own right.
    const double loss_floor = 1e-26 * static_cast<double>(obj.dim());

    MinimizeOutcome out;
    Eigen::VectorXd y = std::move(y0);
    Eigen::VectorXd g;
    double f = obj.loss_grad(y, g);

    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> mem;  // (step diff, grad diff)

    int stagnant = 0;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        const double gnorm = g.norm();
        if (verbose > 0 && iter % verbose == 0)
            std::fprintf(stderr, "[solver] iter=%d loss=%.6e |grad|=%.3e\n", iter, f, gnorm);
        if (gnorm <= grad_tol || f <= loss_floor) {
            out.converged = true;
            break;
        }
        if (stagnant >= 8) {  // accepted steps no longer move the loss
            out.converged = f <= 1e-24 * static_cast<double>(obj.dim());
            break;
        }

        // Two-loop recursion for d = -H g.
        Eigen::VectorXd d = -g;
        std::vector<double> alpha_coef(mem.size());
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(mem.size()) - 1; i >= 0; --i) {
            const auto &[sd, yd] = mem[static_cast<size_t>(i)];
            const double rho = 1.0 / yd.dot(sd);
            alpha_coef[static_cast<size_t>(i)] = rho * sd.dot(d);
            d -= alpha_coef[static_cast<size_t>(i)] * yd;
        }
        if (!mem.empty()) {
            const auto &[sd, yd] = mem.back();
            d *= sd.dot(yd) / yd.squaredNorm();
        }
        for (size_t i = 0; i < mem.size(); ++i) {
            const auto &[sd, yd] = mem[i];
            const double rho = 1.0 / yd.dot(sd);
            d += (alpha_coef[i] - rho * yd.dot(d)) * sd;
        }

        double slope = g.dot(d);
        if (!(slope < 0.0)) {  // not a descent direction; fall back to steepest descent
            d = -g;
            slope = -gnorm * gnorm;
        }

        double t = mem.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
        double f_new = 0.0;
        Eigen::VectorXd y_new;
        bool accepted = false;
        while (t >= kMinStep) {
            y_new = y + t * d;
            f_new = obj.loss(y_new);
            if (f_new <= f + kArmijoC1 * t * slope) {
                accepted = true;
                break;
            }
            t *= kShrink;
        }
        if (!accepted) {
            // Line-search stall: no representable step decreases the loss, so
            // treat a machine-precision loss as converged.
            out.converged = f <= 1e-24 * static_cast<double>(obj.dim());
            break;
        }

        Eigen::VectorXd g_new;
        obj.loss_grad(y_new, g_new);
        Eigen::VectorXd sd = y_new - y;
        Eigen::VectorXd yd = g_new - g;
        const double sy = sd.dot(yd);
        if (sy > 1e-12 * sd.norm() * yd.norm()) {
            mem.emplace_back(std::move(sd), std::move(yd));
            if (static_cast<int>(mem.size()) > history) mem.pop_front();
        }
        stagnant = f - f_new <= 1e-12 * f ? stagnant + 1 : 0;
        y = std::move(y_new);
        g = std::move(g_new);
        f = f_new;
    }

    out.y = std::move(y);
    out.loss = f;
    out.iterations = iter;
    return out;
}

}  // namespace

void SolveConfig::validate() const {
    if (!(kappa_qsvt >= 1.0)) throw std::invalid_argument("SolveConfig: kappa_qsvt must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("SolveConfig: eta must be in (0,1)");
    if (!(eps_target > 0.0 && eps_target < eta)) throw std::invalid_argument("SolveConfig: need 0 < eps_target < eta");
    if (na_override && (*na_override < 2 || *na_override % 2 != 0))
        throw std::invalid_argument("SolveConfig: na_override must be even and >= 2");
    if (max_iterations < 1) throw std::invalid_argument("SolveConfig: max_iterations must be >= 1");
    if (!(grad_tolerance > 0.0)) throw std::invalid_argument("SolveConfig: grad_tolerance must be > 0");
    if (history_size < 1) throw std::invalid_argument("SolveConfig: history_size must be >= 1");
}

Eigen::VectorXd cheb_sample_nodes(int na) {
    if (na < 2 || na % 2 != 0) throw std::invalid_argument("cheb_sample_nodes: N_a must be even and >= 2");
    Eigen::VectorXd nodes(na / 2);
    for (int k = 0; k < na / 2; ++k) nodes[k] = std::cos((2 * k + 1) * kPi / (2.0 * na));
    return nodes;
}

SolveResult solve_angles(const SolveConfig &config) {
    config.validate();

    const int na = config.na_override ? *config.na_override
                                      : choose_degree(config.kappa_qsvt, config.eps_target, config.eta, config.na_cap);
    if (na > config.na_cap) throw std::runtime_error("solve_angles: N_a cap exceeded");
    const int nq = config.quadrature_nq > 0 ? config.quadrature_nq : 2 * na;

    const TargetSpec spec{config.kappa_qsvt, config.eta};
    const ChebSeries series = compute_coeffs([&](double s) { return eval_normalized_target(s, spec); },
                                             na - 1, nq, Parity::odd);

    const Eigen::VectorXd nodes = cheb_sample_nodes(na);
    const Eigen::VectorXd targets = eval_series_grid(series, nodes);

    
    SymmetricLoss obj(nodes, targets);
    
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(na / 2);
    y0[0] = kPi / 4;

    MinimizeOutcome opt =
        minimize(obj, std::move(y0), config.max_iterations, config.grad_tolerance, config.history_size, config.verbose);

    SolveResult result;
    AngleSet alpha;
    alpha.convention = Convention::alpha;
    alpha.values = SymmetricLoss::mirror(opt.y);
    alpha.kappa_qsvt = config.kappa_qsvt;
    alpha.eta = config.eta;
    alpha.origin = AngleOrigin::solved;
    result.angles = convert(alpha, Convention::phi);
    result.final_loss = opt.loss;
    result.iterations = opt.iterations;
    result.converged = opt.converged;

    const ResidualReport report = residual_report(result.angles);
    result.max_residual = report.max_err;
    result.angles.eps_reported = report.max_err;
    return result;
}

ResidualReport residual_report(const AngleSet &angles, int grid_points) {
    if (grid_points < 2) throw std::invalid_argument("residual_report: need at least 2 grid points");
    const double kappa = angles.kappa_qsvt;
    const TargetSpec spec{kappa, angles.eta};

    Eigen::VectorXd grid(grid_points);
    const double lo = 1.0 / kappa, hi = 1.0;
    for (int i = 0; i < grid_points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);

    const Eigen::VectorXd p = eval_poly_batch(angles, grid);
    ResidualReport report;
    report.max_err = -1.0;
    for (int i = 0; i < grid_points; ++i) {
        const double err = std::abs(p[i] - eval_normalized_target(grid[i], spec));
        if (err > report.max_err) {
            report.max_err = err;
            report.argmax_s = grid[i];
        }
    }
    return report;
}

}  // namespace qpf
