#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "miw/ensemble.hpp"
#include "miw/kde.hpp"
#include "miw/potentials.hpp"

namespace miw {

/// Densities at or below this are treated as underflow.
inline constexpr double kDensityFloor = 1e-12;

/// Q and its gradient in the query point at one location, with the density
/// jet they were built from.
struct QuantumPoint {
    double q = 0.0;
    Vec grad_q;
    DensityJet jet;
};

/// Q = -lap P / (4P) + |grad P|^2 / (8 P^2) and its exact gradient, ensemble frozen.
/// Throws DensityUnderflow when P <= kDensityFloor.
QuantumPoint quantum_at(const KernelSum& sum, const Vec& q);

/// Per-world forces and quantum potential on the active worlds; entries for
/// other worlds are zero.
struct ForceField {
    std::vector<Vec> classical;
    std::vector<Vec> quantum;
    std::vector<double> q;

    Vec total(std::size_t n) const { return classical[n] + quantum[n]; }
};

struct EnergyReport {
    std::vector<double> potential;  ///< V(x_n), all worlds
    std::vector<double> quantum;    ///< Q(x_n), active worlds
    double interworld = 0.0;        ///< U_N summed over active worlds
    double eq1_sum = 0.0;           ///< (sum V + U_N) / N_active
    double eq3_mean = 0.0;          ///< mean over active worlds of V + Q
};

struct Evaluation {
    ForceField forces;
    EnergyReport energy;
    std::vector<double> interworld_terms;  ///< |grad P|^2 / (8 P^2) per world
    double max_force = 0.0;                ///< max |grad(V + Q)| over active worlds
};

/// Evaluates forces and both energy estimators in one pass. `threads` splits
/// the per-world work; results do not depend on it.
///
/// Node worlds sit where the signed estimate vanishes, so their force uses the
/// estimate of the positive worlds alone. Only worlds in `subset` are computed
/// when it is nonempty; the caller must then fill the rest and call finalize().
Evaluation evaluate(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model,
                    unsigned threads = 1, std::span<const std::size_t> subset = {});

/// Recomputes the energy sums and max force from the per-world entries.
void finalize(Evaluation& ev, const WorldEnsemble& ens);

std::vector<double> quantum_potential(const WorldEnsemble& ens, const Kernel& kernel);
std::vector<Vec> quantum_force(const WorldEnsemble& ens, const Kernel& kernel);
double interworld_energy(const WorldEnsemble& ens, const Kernel& kernel);
EnergyReport total_energy(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model);

}  // namespace miw
