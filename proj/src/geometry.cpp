#include "miw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "miw/error.hpp"

namespace miw {

Region::Region(Interval x) : dim_(1), bounds_{x, Interval{0.0, 0.0}}
{
    if (!(x.lo < x.hi)) {
        fail(ErrorKind::ConfigError, "region interval must satisfy lo < hi");
    }
}

Region::Region(Interval x, Interval y) : dim_(2), bounds_{x, y}
{
    if (!(x.lo < x.hi) || !(y.lo < y.hi)) {
        fail(ErrorKind::ConfigError, "region intervals must satisfy lo < hi");
    }
}

double Region::volume() const
{
    return dim_ == 1 ? bounds_[0].length() : bounds_[0].length() * bounds_[1].length();
}

bool Region::contains(const Vec& p) const
{
    if (!bounds_[0].contains(p.x)) {
        return false;
    }
    return dim_ == 1 ? p.y == 0.0 : bounds_[1].contains(p.y);
}

Vec Region::center() const
{
    const double cx = 0.5 * (bounds_[0].lo + bounds_[0].hi);
    return dim_ == 1 ? Vec{cx, 0.0} : Vec{cx, 0.5 * (bounds_[1].lo + bounds_[1].hi)};
}

double polygon_area(std::span<const Vec> polygon)
{
    double twice = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        const Vec& p = polygon[i];
        const Vec& q = polygon[(i + 1) % polygon.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(twice);
}

namespace {

void check_inputs(std::span<const Vec> positions, const Region& region)
{
    for (std::size_t n = 0; n < positions.size(); ++n) {
        if (!region.contains(positions[n])) {
            fail(ErrorKind::OutOfRegion, "world " + std::to_string(n) + " lies outside the region");
        }
    }
}

CellPartition cells_1d(std::span<const Vec> positions, const Region& region)
{
    const std::size_t n = positions.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return positions[a].x < positions[b].x;
    });

    for (std::size_t k = 1; k < n; ++k) {
        if (positions[order[k]].x - positions[order[k - 1]].x <= kDuplicateTolerance) {
            fail(ErrorKind::DuplicatePoints, "worlds " + std::to_string(order[k - 1]) + " and " +
                                                 std::to_string(order[k]) + " coincide");
        }
    }

    CellPartition out;
    out.volumes.assign(n, 0.0);
    out.neighbors.assign(n, {});
    const Interval& ax = region.axis(0);
    for (std::size_t k = 0; k < n; ++k) {
        const double left = k == 0 ? ax.lo : 0.5 * (positions[order[k - 1]].x + positions[order[k]].x);
        const double right = k + 1 == n ? ax.hi : 0.5 * (positions[order[k]].x + positions[order[k + 1]].x);
        out.volumes[order[k]] = right - left;
        if (k > 0) {
            out.neighbors[order[k]].push_back(order[k - 1]);
        }
        if (k + 1 < n) {
            out.neighbors[order[k]].push_back(order[k + 1]);
        }
    }
    return out;
}

// Keeps the part of `poly` with dot(a, p) <= b.
std::vector<Vec> clip_half_plane(const std::vector<Vec>& poly, const Vec& a, double b)
{
    std::vector<Vec> out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec& p = poly[i];
        const Vec& q = poly[(i + 1) % poly.size()];
        const double fp = dot(a, p) - b;
        const double fq = dot(a, q) - b;
        if (fp <= 0.0) {
            out.push_back(p);
        }
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            const double t = fp / (fp - fq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

CellPartition cells_2d(std::span<const Vec> positions, const Region& region)
{
    const std::size_t n = positions.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm(positions[i] - positions[j]) <= kDuplicateTolerance) {
                fail(ErrorKind::DuplicatePoints,
                     "worlds " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
            }
        }
    }

    const Interval& ax = region.axis(0);
    const Interval& ay = region.axis(1);
    const double scale = std::max(ax.length(), ay.length());

    CellPartition out;
    out.volumes.assign(n, 0.0);
    out.neighbors.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Vec> poly{{ax.lo, ay.lo}, {ax.hi, ay.lo}, {ax.hi, ay.hi}, {ax.lo, ay.hi}};
        for (std::size_t j = 0; j < n && !poly.empty(); ++j) {
            if (j == i) {
                continue;
            }
            const Vec a = positions[j] - positions[i];
            const double b = 0.5 * (norm2(positions[j]) - norm2(positions[i]));
            poly = clip_half_plane(poly, a, b);
        }
        out.volumes[i] = poly.size() >= 3 ? polygon_area(poly) : 0.0;

        // A world is adjacent when its bisector carries an edge of the cell.
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const Vec a = positions[j] - positions[i];
            const double b = 0.5 * (norm2(positions[j]) - norm2(positions[i]));
            const double tol = 1e-10 * norm(a) * scale;
            const auto on_line = std::count_if(poly.begin(), poly.end(), [&](const Vec& p) {
                return std::abs(dot(a, p) - b) <= tol;
            });
            if (on_line >= 2) {
                out.neighbors[i].push_back(j);
            }
        }
    }
    return out;
}

}  // namespace

CellPartition voronoi_cells(std::span<const Vec> positions, const Region& region)
{
    if (positions.empty()) {
        fail(ErrorKind::EmptyEnsemble, "no worlds to partition");
    }
    check_inputs(positions, region);
    return region.dimension() == 1 ? cells_1d(positions, region) : cells_2d(positions, region);
}

std::vector<double> priori_density(const CellPartition& cells, std::size_t n_worlds)
{
    std::vector<double> out(cells.volumes.size());
    const double count = static_cast<double>(n_worlds);
    std::transform(cells.volumes.begin(), cells.volumes.end(), out.begin(),
                   [count](double v) { return 1.0 / (count * v); });
    return out;
}

}  // namespace miw
