#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qpf/meta_fit.hpp"
#include "qpf/qsp_eval.hpp"
#include "qpf/verifier.hpp"

namespace qpf::io {

// All on-disk formats are versioned JSON (schema_version checked on load;
// unknown versions rejected) and written atomically: the payload goes to a
// temporary file that is renamed into place, so partial files never parse.
inline constexpr int kSchemaVersion = 1;

void write_file_atomic(const std::filesystem::path &path, const std::string &content);

// Angle files store the phi convention canonically; other conventions are
// converted on save, and load returns phi.
void save_angles(const std::filesystem::path &path, const AngleSet &angles);
AngleSet load_angles(const std::filesystem::path &path);

void save_meta(const std::filesystem::path &path, const MetaParams &meta);
MetaParams load_meta(const std::filesystem::path &path);

void save_system(const std::filesystem::path &path, const DiagonalSystem &system);

// A system file holds either a "diagonal" array or SVD factors
// ("u_left", "singular_values", "u_right").
struct LoadedSystem {
    std::optional<DiagonalSystem> diagonal;
    std::optional<SvdSystem> svd;
};
LoadedSystem load_system(const std::filesystem::path &path);

// Reference banks are directories (or explicit file lists) of angle files;
// kappa is read from file metadata, not parsed from names.
ReferenceBank load_bank(const std::vector<std::filesystem::path> &angle_files);
std::vector<std::filesystem::path> list_angle_files(const std::filesystem::path &directory);

// CSV emitters. Headers and layouts:
//   sweep:  s,p_value,target,error
//   invert: index,qsvt_value,exact_value,error
std::string sweep_csv(const ErrorSweep &sweep);
std::string invert_csv(const Eigen::VectorXd &qsvt_scaled, const Eigen::VectorXd &exact_scaled);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace qpf::io
