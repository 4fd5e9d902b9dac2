#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qpf/cheb.hpp"
#include "qpf/target_fn.hpp"

using qpf::ChebSeries;
using qpf::choose_degree;
using qpf::compute_coeffs;
using qpf::eval_series;
using qpf::Parity;

namespace {
std::function<double(double)> normalized_target(double kappa, double eta = 0.125) {
    qpf::TargetSpec spec{kappa, eta};
    return [spec](double s) { return qpf::eval_normalized_target(s, spec); };
}
}  // namespace

TEST_CASE("monomial identities") {
    auto t1 = compute_coeffs([](double s) { return s; }, 5, 64);
    CHECK(t1.coeffs[1] == doctest::Approx(1.0).epsilon(1e-14));
    for (int k : {0, 2, 3, 4, 5}) CHECK(std::abs(t1.coeffs[k]) <= 1e-14);
    CHECK(t1.parity == Parity::odd);

    auto t3 = compute_coeffs([](double s) { return 4 * s * s * s - 3 * s; }, 5, 64);
    CHECK(t3.coeffs[3] == doctest::Approx(1.0).epsilon(1e-14));
    for (int k : {0, 1, 2, 4, 5}) CHECK(std::abs(t3.coeffs[k]) <= 1e-14);
}

TEST_CASE("rejections") {
    CHECK_THROWS(compute_coeffs([](double s) { return s; }, 10, 5));
    CHECK_THROWS(compute_coeffs([](double s) { return std::sqrt(s); }, 5, 64));  // NaN for s < 0
    CHECK_THROWS(compute_coeffs([](double) { return std::nan(""); }, 5, 64));
}

TEST_CASE("odd-target parity: even coefficients vanish before zeroing") {
    // computed without a hint, detection must classify odd, i.e. every even
    // coefficient was already <= 1e-10 in magnitude
    auto series = compute_coeffs(normalized_target(10.0), 399, 512);
    CHECK(series.parity == Parity::odd);
    for (int k = 0; k <= series.degree_nc; k += 2) CHECK(series.coeffs[k] == 0.0);

    // the hinted computation produces identical coefficients
    auto hinted = compute_coeffs(normalized_target(10.0), 399, 512, Parity::odd);
    CHECK((hinted.coeffs - series.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Clenshaw evaluation vs naive summation") {
    ChebSeries constant{0, Eigen::VectorXd::Ones(1), Parity::none};
    CHECK(eval_series(constant, 0.77) == 1.0);

    Eigen::VectorXd c3 = Eigen::VectorXd::Zero(4);
    c3[3] = 1.0;
    ChebSeries t3{3, c3, Parity::odd};
    CHECK(eval_series(t3, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));

    auto rng = oracles::seeded_rng();
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd coeffs(50);
    for (auto &v : coeffs) v = dist(rng);
    ChebSeries series{49, coeffs, Parity::none};
    for (int i = 0; i < 100; ++i) {
        const double s = dist(rng);
        CHECK(eval_series(series, s) == doctest::Approx(oracles::naive_cheb_sum(coeffs, s)).epsilon(1e-12));
    }
}

TEST_CASE("reconstruction of the kappa=10 normalized target") {
    // Gaussian width of the target demands degree ~52*kappa for 1e-12;
    // N_c=511 at N_q=512 suffices while N_c=199 is three-digit-only.
    auto f = normalized_target(10.0);
    auto good = compute_coeffs(f, 511, 512);
    auto coarse = compute_coeffs(f, 199, 512);
    double err_good = 0.0, err_coarse = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double s = -1.0 + 2.0 * i / 2000.0;
        err_good = std::max(err_good, std::abs(eval_series(good, s) - f(s)));
        err_coarse = std::max(err_coarse, std::abs(eval_series(coarse, s) - f(s)));
    }
    CHECK(err_good <= 1e-12);
    CHECK(err_coarse >= 1e-4);
    CHECK(err_coarse <= 1e-2);
}

TEST_CASE("idempotent reconstruction of a series") {
    auto rng = oracles::seeded_rng(7u);
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    Eigen::VectorXd coeffs(24);
    for (auto &v : coeffs) v = dist(rng);
    ChebSeries series{23, coeffs, Parity::none};
    auto redone = compute_coeffs([&](double s) { return eval_series(series, s); }, 23, 64);
    CHECK((redone.coeffs - coeffs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("choose_degree at kappa=10") {
    CHECK(choose_degree(10.0, 1e-7) == 354);
    // tail criterion: the degree-354 truncation reproduces the target to the
    // eps scale on the valid interval
    auto f = normalized_target(10.0);
    auto series = compute_coeffs(f, 353, 1024);
    double err = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double s = -1.0 + 2.0 * i / 2000.0;
        err = std::max(err, std::abs(eval_series(series, s) - f(s)));
    }
    CHECK(err <= 1e-7);
}

TEST_CASE("choose_degree monotonicity and validation") {
    const int na10 = choose_degree(10.0, 1e-7);
    CHECK(choose_degree(20.0, 1e-7) >= na10);
    CHECK(choose_degree(10.0, 1e-9) >= na10);
    CHECK(choose_degree(10.0, 1e-7) % 2 == 0);
    CHECK_THROWS(choose_degree(0.5, 1e-7));
    CHECK_THROWS(choose_degree(10.0, 2.0));
    CHECK_THROWS(choose_degree(650.0, 1e-7, 0.125, 512));  // cap
}

TEST_CASE("near-linear growth of N_a with kappa" * doctest::timeout(300)) {
    const int na65 = choose_degree(65.0, 1e-7);
    const int na650 = choose_degree(650.0, 1e-7);
    const double ratio = static_cast<double>(na650) / na65;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 12.0);
}
