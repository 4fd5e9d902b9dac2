#include "qpf/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace qpf::io {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void check_version(const json &j, const std::filesystem::path &path) {
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported schema version in " + path.string());
}

json to_json(const Eigen::VectorXd &v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json &arr, const char *what) {
    if (!arr.is_array()) throw std::runtime_error(std::string(what) + ": expected an array");
    Eigen::VectorXd v(arr.size());
    Eigen::Index i = 0;
    for (const auto &x : arr) {
        if (!x.is_number()) throw std::runtime_error(std::string(what) + ": expected numbers");
        v[i++] = x.get<double>();
    }
    return v;
}

Eigen::MatrixXd matrix_from_json(const json &rows, const char *what) {
    if (!rows.is_array() || rows.empty()) throw std::runtime_error(std::string(what) + ": expected a 2-D array");
    const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index nc = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
        const auto &row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nc)
            throw std::runtime_error(std::string(what) + ": ragged rows");
        for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
    return m;
}

}  // namespace

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void save_angles(const std::filesystem::path &path, const AngleSet &angles) {
    const AngleSet phi = convert(angles, Convention::phi);
    phi.validate();
    json j;
    j["version"] = kSchemaVersion;
    j["convention"] = to_string(phi.convention);
    j["kappa_qsvt"] = phi.kappa_qsvt;
    j["eta"] = phi.eta;
    if (phi.eps_reported) j["eps_reported"] = *phi.eps_reported;
    j["n_a"] = phi.values.size();
    j["origin"] = to_string(phi.origin);
    j["values"] = to_json(phi.values);
    write_file_atomic(path, j.dump());
}

AngleSet load_angles(const std::filesystem::path &path) {
    const json j = read_json(path);
    check_version(j, path);
    AngleSet set;
    set.convention = convention_from_string(j.at("convention").get<std::string>());
    set.kappa_qsvt = j.at("kappa_qsvt").get<double>();
    set.eta = j.at("eta").get<double>();
    set.origin = origin_from_string(j.at("origin").get<std::string>());
    if (j.contains("eps_reported")) set.eps_reported = j["eps_reported"].get<double>();
    set.values = vector_from_json(j.at("values"), "values");
    if (j.at("n_a").get<Eigen::Index>() != set.values.size())
        throw std::runtime_error("angle file n_a does not match values length: " + path.string());
    AngleSet phi = convert(set, Convention::phi);
    phi.validate();
    return phi;
}

void save_meta(const std::filesystem::path &path, const MetaParams &meta) {
    json j;
    j["version"] = kSchemaVersion;
    j["kappa_ref"] = meta.kappa_ref;
    j["na_ref"] = meta.na_ref;
    j["eta"] = meta.eta;
    j["c_ampl"] = to_json(meta.c_ampl);
    j["c_sh_pos"] = to_json(meta.c_sh_pos);
    j["c_sh_neg"] = to_json(meta.c_sh_neg);
    j["fit_residuals"] = {{"ampl", meta.fit_residuals.ampl},
                          {"env_pos", meta.fit_residuals.env_pos},
                          {"env_neg", meta.fit_residuals.env_neg}};
    j["bank_kappas"] = meta.bank_kappas;
    write_file_atomic(path, j.dump());
}

MetaParams load_meta(const std::filesystem::path &path) {
    const json j = read_json(path);
    check_version(j, path);
    MetaParams meta;
    meta.kappa_ref = j.at("kappa_ref").get<double>();
    meta.na_ref = j.at("na_ref").get<int>();
    meta.eta = j.at("eta").get<double>();
    meta.c_ampl = vector_from_json(j.at("c_ampl"), "c_ampl");
    meta.c_sh_pos = vector_from_json(j.at("c_sh_pos"), "c_sh_pos");
    meta.c_sh_neg = vector_from_json(j.at("c_sh_neg"), "c_sh_neg");
    const auto &res = j.at("fit_residuals");
    meta.fit_residuals.ampl = res.at("ampl").get<double>();
    meta.fit_residuals.env_pos = res.at("env_pos").get<double>();
    meta.fit_residuals.env_neg = res.at("env_neg").get<double>();
    meta.bank_kappas = j.at("bank_kappas").get<std::vector<double>>();
    if (meta.c_sh_pos.size() != meta.c_sh_neg.size())
        throw std::runtime_error("meta file: c_sh_pos / c_sh_neg length mismatch: " + path.string());
    return meta;
}

void save_system(const std::filesystem::path &path, const DiagonalSystem &system) {
    system.validate();
    json j;
    j["version"] = kSchemaVersion;
    j["diagonal"] = to_json(system.diagonal);
    if (system.eta_a) j["eta_a"] = *system.eta_a;
    if (system.xi_max) j["xi_max"] = *system.xi_max;
    j["rho_a"] = system.rho_a;
    j["norm"] = system.norm;
    write_file_atomic(path, j.dump());
}

LoadedSystem load_system(const std::filesystem::path &path) {
    const json j = read_json(path);
    check_version(j, path);
    LoadedSystem loaded;
    if (j.contains("diagonal")) {
        DiagonalSystem sys;
        sys.diagonal = vector_from_json(j["diagonal"], "diagonal");
        if (j.contains("eta_a")) sys.eta_a = j["eta_a"].get<double>();
        if (j.contains("xi_max")) sys.xi_max = j["xi_max"].get<double>();
        const Eigen::VectorXd mags = sys.diagonal.cwiseAbs();
        sys.norm = mags.maxCoeff();
        sys.rho_a = sys.norm / mags.minCoeff();
        sys.validate();
        loaded.diagonal = std::move(sys);
    } else if (j.contains("u_left")) {
        SvdSystem sys;
        sys.u_left = matrix_from_json(j.at("u_left"), "u_left");
        sys.singular_values = vector_from_json(j.at("singular_values"), "singular_values");
        sys.u_right = matrix_from_json(j.at("u_right"), "u_right");
        sys.validate();
        loaded.svd = std::move(sys);
    } else {
        throw std::runtime_error("system file has neither 'diagonal' nor 'u_left': " + path.string());
    }
    return loaded;
}

ReferenceBank load_bank(const std::vector<std::filesystem::path> &angle_files) {
    if (angle_files.empty()) throw std::runtime_error("load_bank: no angle files");
    ReferenceBank bank;
    bank.entries.reserve(angle_files.size());
    for (const auto &path : angle_files) {
        AngleSet set = load_angles(path);
        bank.entries.push_back({set.kappa_qsvt, std::move(set)});
    }
    std::sort(bank.entries.begin(), bank.entries.end(),
              [](const auto &a, const auto &b) { return a.kappa_ref < b.kappa_ref; });
    bank.validate();
    return bank;
}

std::vector<std::filesystem::path> list_angle_files(const std::filesystem::path &directory) {
    if (!std::filesystem::is_directory(directory))
        throw std::runtime_error("not a directory: " + directory.string());
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string sweep_csv(const ErrorSweep &sweep) {
    std::string out = "s,p_value,target,error\n";
    for (Eigen::Index i = 0; i < sweep.s_values.size(); ++i) {
        out += format_double(sweep.s_values[i]);
        out += ',';
        out += format_double(sweep.p_values[i]);
        out += ',';
        out += format_double(sweep.target_values[i]);
        out += ',';
        out += format_double(sweep.errors[i]);
        out += '\n';
    }
    return out;
}

std::string invert_csv(const Eigen::VectorXd &qsvt_scaled, const Eigen::VectorXd &exact_scaled) {
    std::string out = "index,qsvt_value,exact_value,error\n";
    for (Eigen::Index i = 0; i < qsvt_scaled.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(qsvt_scaled[i]);
        out += ',';
        out += format_double(exact_scaled[i]);
        out += ',';
        out += format_double(qsvt_scaled[i] - exact_scaled[i]);
        out += '\n';
    }
    return out;
}

}  // namespace qpf::io
