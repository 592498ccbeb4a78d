#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "miw/ensemble.hpp"
#include "miw/potentials.hpp"
#include "miw/quantum.hpp"

namespace miw {

enum class Symmetry { None, Quadrant, Radial, AxisMirror };

std::string_view to_string(Symmetry s);
Symmetry symmetry_from_string(std::string_view name);

/// Orthogonal 2x2 map.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Vec operator*(const Vec& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

/// Forces are computed only on `representatives`; world n then takes the
/// result of world source[n] mapped through transform[n].
struct SymmetryPlan {
    Symmetry kind = Symmetry::None;
    std::vector<std::size_t> representatives;
    std::vector<std::size_t> source;
    std::vector<Mat2> transform;
};

/// Builds the reduction for `symmetry`. The ensemble (positions, bandwidths,
/// roles, signs) and the potential must both be invariant under the group,
/// otherwise SymmetryViolation is raised.
SymmetryPlan exploit_symmetry(const WorldEnsemble& ens, const PotentialModel& model, Symmetry symmetry);

/// Fills image worlds of a partial evaluation and recomputes the reductions.
void replicate(const SymmetryPlan& plan, Evaluation& ev, const WorldEnsemble& ens);

/// Copies representative bandwidths onto their images.
void symmetrize_bandwidths(const SymmetryPlan& plan, WorldEnsemble& ens);

}  // namespace miw
