#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "miw/config.hpp"
#include "miw/dynamics.hpp"
#include "miw/numerov.hpp"

namespace miw {

enum ExitCode : int {
    kExitOk = 0,
    kExitNotConverged = 1,
    kExitConfigError = 2,
    kExitAborted = 3,
    kExitPartialSweep = 4,
};

/// Builds the initial ensemble (with the optional symmetry reduction) and relaxes it.
RunRecord execute_run(const RunConfig& config);

NumerovSolution execute_numerov(const RunConfig& config);

struct DensityDiscrepancy {
    double l1 = 0.0;
    double sup = 0.0;
};

/// Samples the ensemble's estimate on the solution grid, renormalizes it to
/// unit mass there, and compares it with the state's density.
DensityDiscrepancy compare_density(const WorldEnsemble& ens, const Kernel& kernel, const NumerovSolution& sol,
                                   std::size_t state);

std::vector<double> sampled_density(const WorldEnsemble& ens, const Kernel& kernel, const GridSpec& grid);

struct ComparisonRow {
    std::optional<double> parameter;
    double e_miw_eq3 = 0.0;
    double e_miw_eq1 = 0.0;
    double e_numerov = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    DensityDiscrepancy density;
    std::string termination;
    std::string abort_kind;
    std::string run_hash;
    std::string numerov_hash;
};

ComparisonRow compare(const RunConfig& config, const RunRecord& record, const NumerovSolution& sol);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

int exit_code_for(const RunRecord& record);

/// CLI commands. Each writes its artifacts under `out` and returns an exit code.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out,
            std::optional<std::uint64_t> seed);
int cmd_numerov(const std::filesystem::path& config_path, const std::filesystem::path& out);
int cmd_sweep(const std::filesystem::path& config_path, const std::filesystem::path& out, unsigned jobs,
              std::optional<std::uint64_t> seed);
int cmd_compare(const std::filesystem::path& run_record, const std::filesystem::path& numerov_solution,
                const std::filesystem::path& out);

}  // namespace miw
