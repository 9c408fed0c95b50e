#ifndef REGOBS_CLI_HPP
#define REGOBS_CLI_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/config.hpp"
#include "regobs/errors.hpp"

namespace regobs
{
    /// 0 success, 2 config error, 3 numerical nonconvergence, 4 precondition violation.
    int exit_code_for(ErrorCode code);

    /// Each command writes its files into out_dir and returns the summary that is also
    /// stored as summary.json there.
    Json cmd_rays(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
    Json cmd_critical_time(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
    Json cmd_reachable(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
    Json cmd_observe(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
    Json cmd_control(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

    /// Dispatches `regobs <command> <config> [--out DIR] [--threads N]` and returns the exit code.
    int run_cli(int argc, char ** argv);

    /// Raw little-endian float64 matrix in row-major order next to a JSON header.
    void write_matrix(const std::filesystem::path& base, const Eigen::MatrixXd& m, const Json& meta);
} // namespace regobs

#endif
