#pragma once

#include <cstddef>
#include <vector>

#include "miw/kde.hpp"
#include "miw/kernel.hpp"
#include "miw/vec.hpp"

namespace miw {

/// The evolving state: one entry per world, indices stable for a whole run.
struct WorldEnsemble {
    int dim = 1;
    std::vector<Vec> positions;
    std::vector<Vec> velocities;
    std::vector<double> bandwidths;
    std::vector<WorldRole> roles;
    std::vector<int> signs;

    std::size_t size() const { return positions.size(); }

    /// Estimator view over the current positions and bandwidths. The view
    /// borrows from this ensemble and must not outlive it.
    KernelSum density(const Kernel& kernel) const { return KernelSum(kernel, positions, bandwidths, signs); }

    std::vector<std::size_t> indices_of(WorldRole role) const;

    /// Worlds whose position is driven by the dynamics (free and node-domain).
    std::vector<std::size_t> active_indices() const;

    bool movable(std::size_t n) const { return roles[n] != WorldRole::FixedBoundary; }

    /// Checks array lengths, bandwidth positivity and the role rules
    /// (infinite bandwidth only on fixed or node worlds, negative sign only on nodes).
    void validate() const;
};

}  // namespace miw
