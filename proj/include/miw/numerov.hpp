#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "miw/geometry.hpp"
#include "miw/potentials.hpp"
#include "miw/vec.hpp"

namespace miw {

/// `points` interior unknowns on [lo, hi]; the Dirichlet ends lie one spacing
/// outside the first and last unknown.
struct GridAxis {
    Interval span;
    std::size_t points = 0;

    double spacing() const { return span.length() / static_cast<double>(points + 1); }
    double at(std::size_t i) const { return span.lo + static_cast<double>(i + 1) * spacing(); }
    friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

struct GridSpec {
    int dim = 1;
    std::array<GridAxis, 2> axes{};

    static GridSpec line(Interval span, std::size_t points);
    static GridSpec square(Interval x, Interval y, std::size_t nx, std::size_t ny);

    std::size_t size() const { return dim == 1 ? axes[0].points : axes[0].points * axes[1].points; }
    /// Point k; 2D grids are x-major (k = i * ny + j).
    Vec point(std::size_t k) const;
    /// Grid measure s^d of one cell.
    double cell_measure() const;
    void validate() const;
    Region region() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct NumerovSolution {
    GridSpec grid;
    std::vector<double> eigenvalues;                ///< ascending
    std::vector<std::vector<double>> eigenvectors;  ///< sum psi^2 s^d = 1
};

/// Up to this many unknowns the dense symmetric solver is used.
inline constexpr std::size_t kDenseLimit = 1500;

/// Matrix Numerov: (-1/2 A + B diag V) psi = E B psi with A the three-point
/// second difference over s^2 and B = (1, 10, 1)/12, Dirichlet ends.
NumerovSolution solve_1d(const PotentialModel& model, const GridSpec& grid, std::size_t n_states);

/// (-1/2 L5 + diag V) psi = E psi with the five-point Laplacian, Dirichlet edges.
NumerovSolution solve_2d(const PotentialModel& model, const GridSpec& grid, std::size_t n_states);

NumerovSolution solve(const PotentialModel& model, const GridSpec& grid, std::size_t n_states);

/// psi^2 normalized to unit mass with the grid measure.
std::vector<double> density_from_state(const NumerovSolution& solution, std::size_t state_index);

}  // namespace miw
