#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "miw/vec.hpp"

namespace miw {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double v) const { return v >= lo && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed axis-aligned box in one or two dimensions.
class Region {
public:
    Region() = default;
    explicit Region(Interval x);
    Region(Interval x, Interval y);

    int dimension() const { return dim_; }
    const Interval& axis(int k) const { return bounds_[static_cast<std::size_t>(k)]; }
    double volume() const;
    bool contains(const Vec& p) const;
    Vec center() const;

    friend bool operator==(const Region&, const Region&) = default;

private:
    int dim_ = 1;
    std::array<Interval, 2> bounds_{Interval{0.0, 1.0}, Interval{0.0, 0.0}};
};

struct CellPartition {
    std::vector<double> volumes;
    std::vector<std::vector<std::size_t>> neighbors;
};

/// Minimum separation below which two worlds count as coincident.
inline constexpr double kDuplicateTolerance = 1e-12;

/// Voronoi cells of `positions` clipped to `region`. 1D cells come from sorted
/// bisector midpoints; 2D cells from successive half-plane clipping of the
/// region rectangle, which stays exact for collinear inputs.
CellPartition voronoi_cells(std::span<const Vec> positions, const Region& region);

/// P~(x_n) = 1 / (N |Cell_n|).
std::vector<double> priori_density(const CellPartition& cells, std::size_t n_worlds);

/// Area of a simple polygon (shoelace), vertices in order.
double polygon_area(std::span<const Vec> polygon);

}  // namespace miw
