#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "miw/dynamics.hpp"
#include "miw/geometry.hpp"
#include "miw/kernel.hpp"
#include "miw/numerov.hpp"
#include "miw/potentials.hpp"
#include "miw/symmetry.hpp"

namespace miw {

using Json = nlohmann::ordered_json;

/// Reference grid for the Numerov baseline. An empty span reuses the run region.
struct NumerovSpec {
    std::vector<std::size_t> points{100};
    std::size_t states = 1;
    std::optional<Region> region;

    GridSpec grid(const Region& run_region) const;
};

struct RunConfig {
    std::string name = "run";
    PotentialModel potential = Harmonic{};
    Region region;
    LayoutSpec layout;
    BoundarySpec boundary;
    NodeSpec nodes;
    KernelFamily kernel = KernelFamily::Gaussian;
    RelaxationSchedule schedule;
    Symmetry symmetry = Symmetry::None;
    NumerovSpec numerov;
    std::size_t reference_state = 0;  ///< Numerov state the run is compared with

    Kernel make_kernel() const { return Kernel(kernel, region.dimension()); }
    /// Checks everything that can be checked before computing.
    void validate() const;
};

struct SweepConfig {
    RunConfig base;
    std::string parameter;
    std::vector<double> values;

    void validate() const;
};

Json to_json(const PotentialModel& m);
PotentialModel potential_from_json(const Json& j);
Json to_json(const Region& r);
Region region_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);
Json to_json(const SweepConfig& c);
SweepConfig sweep_config_from_json(const Json& j);

/// Reads and validates a config file; all problems raise ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
SweepConfig load_sweep_config(const std::filesystem::path& path);

}  // namespace miw
