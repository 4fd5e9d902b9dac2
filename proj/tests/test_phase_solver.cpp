#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpf/cheb.hpp"
#include "qpf/phase_solver.hpp"
#include "qpf/meta_fit.hpp"
#include "qpf/target_fn.hpp"

using qpf::cheb_sample_nodes;
using qpf::residual_report;
using qpf::solve_angles;
using qpf::SolveConfig;

namespace {
constexpr double kPi = std::numbers::pi;

qpf::SolveResult solve_kappa(double kappa, double eps = 1e-7) {
    SolveConfig config;
    config.kappa_qsvt = kappa;
    config.eps_target = eps;
    return solve_angles(config);
}
}  // namespace

TEST_CASE("Chebyshev sample nodes") {
    auto n2 = cheb_sample_nodes(2);
    REQUIRE(n2.size() == 1);
    CHECK(n2[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));

    auto n4 = cheb_sample_nodes(4);
    REQUIRE(n4.size() == 2);
    CHECK(n4[0] == doctest::Approx(0.9238795325112867).epsilon(1e-15));
    CHECK(n4[1] == doctest::Approx(0.38268343236508984).epsilon(1e-15));

    CHECK_THROWS(cheb_sample_nodes(5));
    CHECK_THROWS(cheb_sample_nodes(0));

    // every node is a root of T_{N_a}
    for (int na : {2, 4, 16, 64}) {
        auto nodes = cheb_sample_nodes(na);
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(na + 1);
        coeffs[na] = 1.0;
        qpf::ChebSeries tna{na, coeffs, qpf::Parity::none};
        for (Eigen::Index k = 0; k < nodes.size(); ++k) {
            CHECK(std::abs(qpf::eval_series(tna, nodes[k])) <= 1e-12);
            CHECK(nodes[k] > 0.0);
            CHECK(nodes[k] < 1.0);
            if (k > 0) CHECK(nodes[k] < nodes[k - 1]);
        }
    }
}

TEST_CASE("config validation") {
    SolveConfig config;
    config.kappa_qsvt = 0.5;
    CHECK_THROWS(solve_angles(config));
    config = SolveConfig{};
    config.eps_target = 0.5;  // >= eta
    CHECK_THROWS(solve_angles(config));
    config = SolveConfig{};
    config.na_override = 11;
    CHECK_THROWS(solve_angles(config));
}

TEST_CASE("solve at kappa=10 reaches the truncation-scale residual") {
    auto result = solve_kappa(10.0);
    CHECK(result.converged);
    CHECK(result.angles.size() == 354);
    CHECK(result.max_residual <= 1e-6);
    CHECK(result.final_loss <= 177.0 * 1e-14);  // far below (N_a/2) * eps^2

    // structural checks on theta = phi - pi/2
    const auto theta = qpf::convert(result.angles, qpf::Convention::theta);
    const Eigen::Index na = theta.size();
    const Eigen::Index half = na / 2;
    // exact mirror symmetry (structural, bitwise)
    for (Eigen::Index j = 0; j < half; ++j) CHECK(theta.values[j] == theta.values[na - 1 - j]);
    // alternating signs on the first half, central pair negative
    CHECK(theta.values[half - 1] < 0.0);
    CHECK(theta.values[half] < 0.0);
    for (Eigen::Index j = 1; j < half; ++j) CHECK(theta.values[j] * theta.values[j - 1] < 0.0);
}

TEST_CASE("solver determinism") {
    auto a = solve_kappa(15.0, 1e-6);
    auto b = solve_kappa(15.0, 1e-6);
    REQUIRE(a.angles.size() == b.angles.size());
    CHECK((a.angles.values - b.angles.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("theta_max decreases roughly as 1/kappa") {
    const double t10 = qpf::extract_theta_max(solve_kappa(10.0).angles);
    const double t20 = qpf::extract_theta_max(solve_kappa(20.0).angles);
    const double t30 = qpf::extract_theta_max(solve_kappa(30.0).angles);
    CHECK(t20 < t10);
    CHECK(t30 < t20);
    CHECK(t10 / t20 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(t10 / t30 == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("residual_report") {
    auto result = solve_kappa(10.0);
    auto report = residual_report(result.angles, 2001);
    CHECK(report.max_err <= 1e-6);
    CHECK(report.argmax_s >= 0.1);
    CHECK(report.argmax_s <= 1.0);

    // theta == 0 (pure T_{N_a-1}) cannot approximate the inverse target
    qpf::AngleSet chebyshev;
    chebyshev.convention = qpf::Convention::theta;
    chebyshev.values = Eigen::VectorXd::Zero(354);
    chebyshev.kappa_qsvt = 10.0;
    chebyshev.eta = 0.125;
    auto bad = residual_report(chebyshev, 501);
    CHECK(bad.max_err > 1e-2);
}
