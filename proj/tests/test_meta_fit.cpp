#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpf/meta_fit.hpp"
#include "qpf/phase_solver.hpp"

using qpf::AngleSet;
using qpf::build_meta;
using qpf::Convention;
using qpf::extract_theta_max;
using qpf::fit_amplitude;
using qpf::fit_envelope;
using qpf::merge_envelope;
using qpf::ReferenceBank;
using qpf::split_envelope;

namespace {
constexpr double kPi = std::numbers::pi;

// Synthetic symmetric theta set with the solved sign structure: magnitudes
// from a smooth envelope, alternating signs, central pair negative.
AngleSet synthetic_set(Eigen::Index na, double theta_max, double kappa) {
    const Eigen::Index half = na / 2;
    Eigen::VectorXd theta(na);
    for (Eigen::Index j = 0; j < half; ++j) {
        const double dist = static_cast<double>(half - 1 - j);
        const bool positive = static_cast<long long>(dist) % 2 == 1;
        const double mag = theta_max * (0.05 + 0.95 * std::exp(-dist / (0.3 * half)));
        theta[j] = positive ? mag : -mag;
        theta[na - 1 - j] = theta[j];
    }
    AngleSet set;
    set.convention = Convention::theta;
    set.values = theta;
    set.kappa_qsvt = kappa;
    return set;
}

ReferenceBank synthetic_bank(const std::vector<double> &kappas, auto theta_max_of) {
    ReferenceBank bank;
    for (double kappa : kappas)
        bank.entries.push_back({kappa, synthetic_set(40, theta_max_of(kappa), kappa)});
    return bank;
}
}  // namespace

TEST_CASE("extract_theta_max") {
    AngleSet set;
    set.convention = Convention::theta;
    set.values = Eigen::VectorXd(4);
    set.values << 0.1, -0.2, -0.2, 0.1;
    set.kappa_qsvt = 10.0;
    CHECK(extract_theta_max(set) == 0.2);

    AngleSet phi;
    phi.convention = Convention::phi;
    phi.values = Eigen::VectorXd::Constant(6, kPi / 2);
    phi.kappa_qsvt = 10.0;
    CHECK(extract_theta_max(phi) == 0.0);

    AngleSet empty;
    CHECK_THROWS(extract_theta_max(empty));
}

TEST_CASE("fit_amplitude recovers exact models in its basis") {
    std::vector<double> kappas;
    for (int k = 10; k <= 100; k += 10) kappas.push_back(k);

    double residual = 0.0;
    auto bank1 = synthetic_bank(kappas, [](double kappa) { return 0.5 / kappa; });
    auto c1 = fit_amplitude(bank1, 5, &residual);
    CHECK(std::abs(c1[0]) <= 1e-10);
    CHECK(c1[1] == doctest::Approx(0.5).epsilon(1e-10));
    for (int l : {2, 3, 4}) CHECK(std::abs(c1[l]) <= 1e-7);
    CHECK(residual <= 1e-10);

    auto bank2 = synthetic_bank(kappas, [](double kappa) { return 0.01 + 2.0 / kappa; });
    auto c2 = fit_amplitude(bank2, 5, &residual);
    CHECK(c2[0] == doctest::Approx(0.01).epsilon(1e-8));
    CHECK(c2[1] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(residual <= 1e-10);

    CHECK_THROWS(fit_amplitude(bank1, 100));  // more coefficients than data
}

TEST_CASE("amplitude model evaluation") {
    Eigen::VectorXd c(3);
    c << 0.25, 1.0, -4.0;
    CHECK(qpf::eval_amplitude_model(c, 2.0) == doctest::Approx(0.25 + 0.5 - 1.0).epsilon(1e-15));
}

TEST_CASE("split_envelope counts and classification") {
    auto set8 = synthetic_set(8, 0.1, 10.0);
    auto split8 = split_envelope(set8);
    CHECK(split8.pos.size() == 2);
    CHECK(split8.neg.size() == 2);

    auto set10 = synthetic_set(10, 0.1, 10.0);
    auto split10 = split_envelope(set10);
    CHECK(split10.pos.size() == 2);
    CHECK(split10.neg.size() == 3);

    for (Eigen::Index i = 0; i < split10.pos.size(); ++i) CHECK(split10.pos[i] > 0.0);
    for (Eigen::Index i = 0; i < split10.neg.size(); ++i) CHECK(split10.neg[i] < 0.0);
    // normalization: the largest magnitude across both halves is exactly 1
    CHECK(std::max(split10.pos.cwiseAbs().maxCoeff(), split10.neg.cwiseAbs().maxCoeff()) == 1.0);
}

TEST_CASE("split rejects a broken sign pattern") {
    auto set = synthetic_set(12, 0.1, 10.0);
    auto theta = qpf::convert(set, Convention::theta);
    theta.values[2] = -theta.values[2];  // flip one sign off-center
    theta.values[12 - 1 - 2] = theta.values[2];
    CHECK_THROWS_WITH_AS(split_envelope(theta), doctest::Contains("sign pattern"), std::invalid_argument);
}

TEST_CASE("split then merge is the identity") {
    for (Eigen::Index na : {8, 10, 36, 100}) {
        auto set = synthetic_set(na, 0.07, 25.0);
        auto theta = qpf::convert(set, Convention::theta);
        const double tmax = extract_theta_max(theta);
        auto split = split_envelope(theta);
        const Eigen::VectorXd rebuilt = merge_envelope(split.pos, split.neg);
        const Eigen::VectorXd normalized = theta.values / tmax;
        CHECK((rebuilt - normalized).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS(merge_envelope(Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(2)));
}

TEST_CASE("fit_envelope recovers cosine-basis data exactly") {
    const Eigen::Index m = 40;
    Eigen::VectorXd quad(m), ones(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double r = static_cast<double>(j) / (m - 1);
        quad[j] = 2.0 * r * r - 1.0;  // cos(2 acos r)
        ones[j] = 1.0;
    }
    double residual = 0.0;
    auto c_quad = fit_envelope(quad, 6, &residual);
    CHECK(std::abs(c_quad[0]) <= 1e-10);
    CHECK(c_quad[1] == doctest::Approx(1.0).epsilon(1e-10));
    for (int l : {2, 3, 4, 5}) CHECK(std::abs(c_quad[l]) <= 1e-9);
    CHECK(residual <= 1e-10);

    auto c_ones = fit_envelope(ones, 6, &residual);
    CHECK(c_ones[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(residual <= 1e-10);

    CHECK_THROWS(fit_envelope(Eigen::VectorXd::Ones(1), 3));
    // evenness of the basis: fitted values agree at +-r by construction
    // cos(2l acos r) with acos(-r) = pi - acos(r) gives cos(2l pi - x) = cos x
    for (double r : {0.3, 0.8}) {
        double plus = 0.0, minus = 0.0;
        for (int l = 0; l < 6; ++l) {
            plus += c_quad[l] * std::cos(2.0 * l * std::acos(r));
            minus += c_quad[l] * std::cos(2.0 * l * std::acos(-r));
        }
        CHECK(plus == doctest::Approx(minus).epsilon(1e-12));
    }
}

TEST_CASE("build_meta on solved references") {
    ReferenceBank bank;
    for (double kappa : {10.0, 20.0, 30.0}) {
        qpf::SolveConfig config;
        config.kappa_qsvt = kappa;
        config.eps_target = 1e-7;
        bank.entries.push_back({kappa, qpf::solve_angles(config).angles});
    }
    auto meta = build_meta(bank, 30.0, 3, 12);
    CHECK(meta.kappa_ref == 30.0);
    CHECK(meta.na_ref == 1060);
    CHECK(meta.eta == 0.125);
    CHECK(meta.bank_kappas.size() == 3);
    CHECK(meta.fit_residuals.ampl <= 1e-6);
    CHECK(meta.fit_residuals.env_pos <= 1e-2);
    CHECK(meta.fit_residuals.env_neg <= 1e-2);

    // opposite signs of the envelope coefficient pairs, where resolvable
    for (int l = 0; l < 12; ++l) {
        if (std::abs(meta.c_sh_pos[l]) > 1e-4 && std::abs(meta.c_sh_neg[l]) > 1e-4)
            CHECK(meta.c_sh_pos[l] * meta.c_sh_neg[l] < 0.0);
    }

    CHECK_THROWS(build_meta(bank, 123.0, 3, 12));  // envelope kappa not in bank
}

TEST_CASE("bank validation") {
    ReferenceBank bank;
    bank.entries.push_back({10.0, synthetic_set(16, 0.1, 10.0)});
    bank.entries.push_back({10.0, synthetic_set(16, 0.1, 10.0)});
    CHECK_THROWS(bank.validate());

    ReferenceBank mixed;
    mixed.entries.push_back({10.0, synthetic_set(16, 0.1, 10.0)});
    mixed.entries.push_back({20.0, synthetic_set(16, 0.05, 20.0)});
    mixed.entries[1].angles.eta = 0.25;
    CHECK_THROWS(mixed.validate());
}
