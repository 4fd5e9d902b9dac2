// qpf: QSVT phase-angle toolkit for matrix inversion.
//
// Subcommands: solve, fit, estimate, sweep, invert, bench. Data files are
// versioned JSON written atomically; sweep/invert/bench emit CSV. Worker
// thread count comes from --jobs (or QPF_JOBS).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qpf/angle_estimator.hpp"
#include "qpf/io.hpp"
#include "qpf/meta_fit.hpp"
#include "qpf/parallel.hpp"
#include "qpf/phase_solver.hpp"
#include "qpf/verifier.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace {

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct SolveArgs {
    std::vector<double> kappas;
    double eps = 1e-7;
    double eta = 0.125;
    int na = 0;
    int nq = 0;
    int max_iterations = 50000;
    double grad_tol = 1e-10;
    int history = 10;
    int verbose = 0;
    std::string out;
    std::string out_dir;
};

int run_solves(const SolveArgs &args, int jobs) {
    if (args.kappas.size() > 1 && args.out_dir.empty()) {
        std::cerr << "solve: multiple --kappa values need --out-dir\n";
        return 1;
    }
    if (args.kappas.size() == 1 && args.out.empty() && args.out_dir.empty()) {
        std::cerr << "solve: need --out (or --out-dir)\n";
        return 1;
    }

    // Concurrent solves split the worker budget between them.
    const int concurrent = std::max(1, std::min<int>(jobs, static_cast<int>(args.kappas.size())));
    qpf::parallel::set_max_threads(std::max(1, jobs / concurrent));
    if (!args.out_dir.empty()) fs::create_directories(args.out_dir);

    std::vector<json> reports(args.kappas.size());
    std::vector<std::string> failures(args.kappas.size());
    std::atomic<size_t> cursor{0};
    std::atomic<bool> any_nonconverged{false};

    auto worker = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= args.kappas.size()) break;
            const double kappa = args.kappas[i];
            try {
                qpf::SolveConfig config;
                config.kappa_qsvt = kappa;
                config.eps_target = args.eps;
                config.eta = args.eta;
                if (args.na > 0) config.na_override = args.na;
                config.quadrature_nq = args.nq;
                config.max_iterations = args.max_iterations;
                config.grad_tolerance = args.grad_tol;
                config.history_size = args.history;
                config.verbose = args.verbose;

                const auto start = Clock::now();
                qpf::SolveResult result = qpf::solve_angles(config);
                const double wall = elapsed(start);

                fs::path out_path = args.out_dir.empty()
                                        ? fs::path(args.out)
                                        : fs::path(args.out_dir) / ("angles_k" + qpf::io::format_double(kappa) + ".json");
                qpf::io::save_angles(out_path, result.angles);
                if (!result.converged) any_nonconverged = true;

                json line;
                line["kappa"] = kappa;
                line["n_a"] = result.angles.size();
                line["final_loss"] = result.final_loss;
                line["iterations"] = result.iterations;
                line["max_residual"] = result.max_residual;
                line["converged"] = result.converged;
                line["wall_time_s"] = wall;
                line["out"] = out_path.string();
                reports[i] = std::move(line);
            } catch (const std::exception &e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < concurrent; ++t) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();

    bool failed = false;
    for (size_t i = 0; i < args.kappas.size(); ++i) {
        if (!failures[i].empty()) {
            std::cerr << "solve: kappa=" << args.kappas[i] << ": " << failures[i] << "\n";
            failed = true;
        } else {
            std::cout << reports[i].dump() << "\n";
        }
    }
    if (failed) return 1;
    return any_nonconverged ? 2 : 0;
}

Eigen::VectorXd parse_kappa_list(const std::string &csv) {
    Eigen::VectorXd out;
    std::vector<double> values;
    size_t pos = 0;
    while (pos < csv.size()) {
        size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        values.push_back(std::stod(csv.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    out.resize(static_cast<Eigen::Index>(values.size()));
    for (size_t i = 0; i < values.size(); ++i) out[static_cast<Eigen::Index>(i)] = values[i];
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"QSVT phase-angle toolkit: high-precision solves, metaparameter fits, fast angle estimation, and error verification for matrix inversion"};
    app.require_subcommand(1);

    int jobs = qpf::parallel::max_threads();
    app.add_option("--jobs", jobs, "Worker thread budget (default: QPF_JOBS or hardware)");

    // --- solve ---
    SolveArgs solve_args;
    auto *solve = app.add_subcommand("solve", "Compute high-precision angles by loss minimization");
    solve->add_option("--kappa", solve_args.kappas, "Condition-number parameter(s) kappa_qsvt")->required();
    solve->add_option("--eps", solve_args.eps, "Chebyshev truncation target (default 1e-7)");
    solve->add_option("--eta", solve_args.eta, "Normalization eta_qsvt (default 0.125)");
    solve->add_option("--na", solve_args.na, "Override N_a (even)");
    solve->add_option("--nq", solve_args.nq, "Quadrature points N_q (default 2*N_a)");
    solve->add_option("--max-iterations", solve_args.max_iterations, "Optimizer iteration cap");
    solve->add_option("--grad-tol", solve_args.grad_tol, "Gradient-norm stopping tolerance");
    solve->add_option("--history", solve_args.history, "Quasi-Newton memory");
    solve->add_option("--verbose", solve_args.verbose, "Print optimizer progress every N iterations");
    solve->add_option("--out", solve_args.out, "Output angle file (single kappa)");
    solve->add_option("--out-dir", solve_args.out_dir, "Output directory (one file per kappa)");

    // --- fit ---
    std::vector<std::string> fit_refs;
    double fit_env_kappa = 0.0;
    int fit_n_ampl = 5, fit_n_sh = 20;
    std::string fit_out;
    auto *fit = app.add_subcommand("fit", "Extract metaparameters from a reference angle bank");
    fit->add_option("--refs", fit_refs, "Reference angle files or directories")->required();
    fit->add_option("--env-kappa", fit_env_kappa, "Envelope reference kappa (default: largest in bank)");
    fit->add_option("--n-ampl", fit_n_ampl, "Amplitude-series length (default 5)");
    fit->add_option("--n-sh", fit_n_sh, "Envelope-series length (default 20)");
    fit->add_option("--out", fit_out, "Output metaparameter file")->required();

    // --- estimate ---
    std::string est_meta, est_out;
    double est_kappa0 = 0.0;
    double est_na_cap = 1e8;
    bool est_no_calibration = false;
    auto *estimate = app.add_subcommand("estimate", "Reconstruct angles for a target kappa0 from metaparameters");
    estimate->add_option("--meta", est_meta, "Metaparameter file")->required();
    estimate->add_option("--kappa0", est_kappa0, "Target condition-number parameter")->required();
    estimate->add_option("--na-cap", est_na_cap, "Refuse N_a beyond this cap (default 1e8)");
    estimate->add_flag("--no-endpoint-calibration", est_no_calibration,
                       "Skip the s=1 sum calibration (raw Table-1 reconstruction)");
    estimate->add_option("--out", est_out, "Output angle file")->required();

    // --- sweep ---
    std::string sweep_angles, sweep_out;
    int sweep_points = 2001;
    auto *sweep = app.add_subcommand("sweep", "Dense error sweep of P[phi] against the normalized target");
    sweep->add_option("--angles", sweep_angles, "Angle file")->required();
    sweep->add_option("--points", sweep_points, "Grid points on [1/kappa, 1] (default 2001)");
    sweep->add_option("--out", sweep_out, "Output CSV")->required();

    // --- invert ---
    std::string inv_system, inv_angles, inv_out;
    auto *invert = app.add_subcommand("invert", "Emulated QSVT inversion of a diagonal/SVD system");
    invert->add_option("--system", inv_system, "System JSON (diagonal or SVD factors)")->required();
    invert->add_option("--angles", inv_angles, "Angle file")->required();
    invert->add_option("--out", inv_out, "Output CSV")->required();

    // --- bench ---
    std::string bench_meta, bench_kappas = "1e4,2e4,4e4,8e4";
    int bench_repeat = 3;
    auto *bench = app.add_subcommand("bench", "Time angle estimation across kappa0 values (CSV to stdout)");
    bench->add_option("--meta", bench_meta, "Metaparameter file")->required();
    bench->add_option("--kappas", bench_kappas, "Comma-separated kappa0 list");
    bench->add_option("--repeat", bench_repeat, "Repetitions per kappa0; best time reported (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    qpf::parallel::set_max_threads(jobs);

    try {
        if (solve->parsed()) {
            if (solve_args.na > 0 && solve_args.na % 2 != 0) {
                std::cerr << "solve: --na must be even\n";
                return 1;
            }
            return run_solves(solve_args, jobs);
        }

        if (fit->parsed()) {
            std::vector<fs::path> files;
            for (const auto &ref : fit_refs) {
                if (fs::is_directory(ref)) {
                    auto listed = qpf::io::list_angle_files(ref);
                    files.insert(files.end(), listed.begin(), listed.end());
                } else {
                    files.emplace_back(ref);
                }
            }
            qpf::ReferenceBank bank = qpf::io::load_bank(files);
            const double env_kappa = fit_env_kappa > 0.0 ? fit_env_kappa : bank.entries.back().kappa_ref;
            qpf::MetaParams meta = qpf::build_meta(bank, env_kappa, fit_n_ampl, fit_n_sh);
            qpf::io::save_meta(fit_out, meta);
            json line;
            line["kappa_ref"] = meta.kappa_ref;
            line["na_ref"] = meta.na_ref;
            line["bank_size"] = meta.bank_kappas.size();
            line["residual_ampl"] = meta.fit_residuals.ampl;
            line["residual_env_pos"] = meta.fit_residuals.env_pos;
            line["residual_env_neg"] = meta.fit_residuals.env_neg;
            line["out"] = fit_out;
            std::cout << line.dump() << "\n";
            return 0;
        }

        if (estimate->parsed()) {
            qpf::EstimateRequest request;
            request.kappa0 = est_kappa0;
            request.meta = qpf::io::load_meta(est_meta);
            request.na_cap = static_cast<long long>(est_na_cap);
            request.endpoint_calibration = !est_no_calibration;
            if (est_kappa0 < request.meta.kappa_ref)
                std::cerr << "estimate: warning: kappa0 " << est_kappa0 << " is below the envelope reference "
                          << request.meta.kappa_ref << "; the estimation targets kappa0 above it\n";
            const auto start = Clock::now();
            qpf::AngleSet angles = qpf::estimate_angles(request);
            const double wall = elapsed(start);
            qpf::io::save_angles(est_out, angles);
            json line;
            line["kappa0"] = est_kappa0;
            line["n_a"] = angles.size();
            line["wall_time_s"] = wall;
            line["out"] = est_out;
            std::cout << line.dump() << "\n";
            return 0;
        }

        if (sweep->parsed()) {
            qpf::AngleSet angles = qpf::io::load_angles(sweep_angles);
            qpf::ErrorSweep result = qpf::sweep_error(angles, sweep_points);
            qpf::io::write_file_atomic(sweep_out, qpf::io::sweep_csv(result));
            json line;
            line["kappa0"] = result.kappa0;
            line["max_err"] = result.max_err;
            line["argmax_s"] = result.argmax_s;
            line["out"] = sweep_out;
            std::cout << line.dump() << "\n";
            return 0;
        }

        if (invert->parsed()) {
            qpf::AngleSet angles = qpf::io::load_angles(inv_angles);
            qpf::io::LoadedSystem system = qpf::io::load_system(inv_system);
            if (system.diagonal) {
                qpf::InversionError err = qpf::inversion_error(*system.diagonal, angles);
                qpf::io::write_file_atomic(inv_out, qpf::io::invert_csv(err.qsvt_scaled, err.exact_scaled));
                json line;
                line["max_abs_err"] = err.max_abs_err;
                line["argmax_index"] = err.argmax_index;
                line["out"] = inv_out;
                std::cout << line.dump() << "\n";
            } else {
                const qpf::SvdSystem &svd = *system.svd;
                const Eigen::Index n = svd.singular_values.size();
                const Eigen::VectorXd init = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
                const Eigen::VectorXd qsvt = qpf::apply_inverse_via_svd(svd, angles, init);
                const Eigen::VectorXd exact =
                    svd.u_right * svd.singular_values.cwiseInverse().asDiagonal() * (svd.u_left.adjoint() * init);
                const double renorm = std::sqrt(double(n));
                const Eigen::VectorXd qsvt_scaled = qsvt * renorm / angles.eta;
                const Eigen::VectorXd exact_scaled = exact * renorm / angles.kappa_qsvt;
                qpf::io::write_file_atomic(inv_out, qpf::io::invert_csv(qsvt_scaled, exact_scaled));
                json line;
                line["max_abs_err"] = (qsvt_scaled - exact_scaled).cwiseAbs().maxCoeff();
                line["out"] = inv_out;
                std::cout << line.dump() << "\n";
            }
            return 0;
        }

        if (bench->parsed()) {
            qpf::MetaParams meta = qpf::io::load_meta(bench_meta);
            const Eigen::VectorXd kappas = parse_kappa_list(bench_kappas);
            std::string csv = "kappa0,n_a,seconds\n";
            for (Eigen::Index i = 0; i < kappas.size(); ++i) {
                qpf::EstimateRequest request;
                request.kappa0 = kappas[i];
                request.meta = meta;
                double best = 0.0;
                long long na = 0;
                for (int rep = 0; rep < std::max(1, bench_repeat); ++rep) {
                    const auto start = Clock::now();
                    qpf::AngleSet angles = qpf::estimate_angles(request);
                    const double wall = elapsed(start);
                    na = angles.size();
                    if (rep == 0 || wall < best) best = wall;
                }
                csv += qpf::io::format_double(kappas[i]);
                csv += ',';
                csv += std::to_string(na);
                csv += ',';
                csv += qpf::io::format_double(best);
                csv += '\n';
            }
            std::cout << csv;
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
        return 1;
    }
    return 1;
}
