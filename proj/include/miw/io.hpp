#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "miw/config.hpp"
#include "miw/dynamics.hpp"
#include "miw/numerov.hpp"

namespace miw {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

/// Columns: iteration, energy_eq3, energy_eq1, max_force, bandwidth_change, dt.
std::string trace_csv(const RunRecord& record);

Json to_json(const WorldEnsemble& ens);
WorldEnsemble ensemble_from_json(const Json& j);

/// Everything needed to reproduce and compare a run, without wall-clock data.
Json run_record_json(const RunConfig& config, const RunRecord& record);

Json to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);
Json numerov_json(const PotentialModel& model, const NumerovSolution& sol);
NumerovSolution numerov_from_json(const Json& j);

/// Whitespace-delimited "x [y] density" rows.
std::string density_grid_text(const GridSpec& grid, const std::vector<double>& density);

}  // namespace miw
