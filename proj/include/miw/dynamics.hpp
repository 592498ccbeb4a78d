#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "miw/ensemble.hpp"
#include "miw/error.hpp"
#include "miw/geometry.hpp"
#include "miw/kernel.hpp"
#include "miw/potentials.hpp"
#include "miw/quantum.hpp"

namespace miw {

enum class Layout { UniformGrid, Radial, Explicit };

struct LayoutSpec {
    Layout layout = Layout::UniformGrid;
    /// Grid: worlds per axis. Radial: worlds per ring, innermost first.
    std::vector<std::size_t> counts;
    std::vector<Vec> positions;   ///< explicit layout
    double bandwidth_constant = 1.0;
    double jitter = 0.0;          ///< uniform jitter as a fraction of spacing
    std::uint64_t seed = 0;
};

/// Fixed infinite-bandwidth worlds standing in for the ensemble outside the
/// region: the two interval ends in 1D, the four corners in 2D.
struct BoundarySpec {
    bool enabled = false;
};

/// Preset nodal line x = line_x. Every grid world on it becomes a node (sign -1);
/// `infinite` lists positions along the line (0 = lowest y) held at h = inf.
struct NodeSpec {
    bool enabled = false;
    double line_x = 0.0;
    std::vector<std::size_t> infinite;
    double domain_radius_factor = 1.5;  ///< node domain radius in mean NN spacings
};

WorldEnsemble make_initial(const Region& region, const LayoutSpec& layout, const BoundarySpec& boundary,
                           const NodeSpec& nodes, const Kernel& kernel);

/// Mean nearest-neighbour distance over all worlds.
double mean_nearest_spacing(const WorldEnsemble& ens);

struct RelaxationSchedule {
    double dt = 0.05;
    std::size_t iterations = 1000;
    std::size_t substeps = 1;
    std::size_t recursion_every = 100;  ///< B
    std::size_t recursion_sweeps = 50;  ///< R, upper bound on sweeps per recursion step
    double recursion_tol = 1e-3;       ///< stop sweeping once the relative change falls below this
    bool mass_normalized = true;
    bool node_self_term = false;  ///< keep each node's own kernel in its node-sum recursion
    double recursion_exponent = 1.0;
    double force_tol = 1e-4;
    double energy_tol = 1e-4;
    std::size_t window = 100;
    bool backtracking = false;
    std::size_t snapshot_every = 0;  ///< 0 disables periodic snapshots
    unsigned threads = 1;

    void validate() const;
};

/// Node-line direction for projected node motion.
inline constexpr Vec kNodeLineDirection{0.0, 1.0};

/// Moves every non-fixed world by (dt^2/2) F from rest and zeroes velocities.
/// Node worlds keep only the component of F along the nodal line.
void apply_step(WorldEnsemble& ens, const ForceField& forces, double dt);

/// Raises CollisionDetected if two worlds are closer than eps, or, in 1D, if
/// the ordering of worlds changed relative to `before`.
void check_collisions(const WorldEnsemble& ens, double eps, const std::vector<Vec>* before = nullptr);

/// One iteration of the dynamics: forces from the current ensemble, then apply_step.
WorldEnsemble step(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model, double dt,
                   double collision_eps = 0.0);

/// One recursion sweep over all roles. Returns the largest relative change.
double recursion_sweep(WorldEnsemble& ens, const Kernel& kernel, const Region& region,
                       const RelaxationSchedule& schedule, const std::vector<std::size_t>& node_domain);

enum class Termination { Converged, MaxIterations, Aborted };

std::string_view to_string(Termination t);

struct IterationRecord {
    std::size_t iteration = 0;
    double energy_eq3 = 0.0;
    double energy_eq1 = 0.0;
    double max_force = 0.0;
    double bandwidth_change = 0.0;  ///< from the recursion step at this iteration, 0 if none
    double dt = 0.0;
};

struct Snapshot {
    std::size_t iteration = 0;
    std::vector<Vec> positions;
    std::vector<double> bandwidths;
};

struct RunRecord {
    std::vector<IterationRecord> trace;
    std::vector<Snapshot> snapshots;
    WorldEnsemble final_state;
    Termination termination = Termination::MaxIterations;
    std::optional<ErrorKind> abort_kind;
    std::string message;
    double wall_seconds = 0.0;  ///< metadata only; excluded from comparisons
};

struct SymmetryPlan;

struct RelaxOptions {
    const SymmetryPlan* symmetry = nullptr;
};

RunRecord relax(const WorldEnsemble& initial, const Kernel& kernel, const PotentialModel& model,
                const Region& region, const RelaxationSchedule& schedule, const RelaxOptions& options = {});

}  // namespace miw
