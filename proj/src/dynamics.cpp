#include "miw/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "miw/kde.hpp"
#include "miw/symmetry.hpp"

namespace miw {

namespace {

// Offsets (i - (k-1)/2) * w are exact mirror images of each other, so a grid
// centred on the origin is bitwise symmetric.
std::vector<double> cell_centres(const Interval& axis, std::size_t k)
{
    const double w = axis.length() / static_cast<double>(k);
    const double c = 0.5 * (axis.lo + axis.hi);
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = c + (static_cast<double>(i) - 0.5 * static_cast<double>(k - 1)) * w;
    }
    return out;
}

std::vector<Vec> grid_layout(const Region& region, const std::vector<std::size_t>& counts)
{
    if (counts.size() != static_cast<std::size_t>(region.dimension())) {
        fail(ErrorKind::InvalidLayout, "grid counts must give one entry per region axis");
    }
    std::vector<Vec> out;
    const auto xs = cell_centres(region.axis(0), counts[0]);
    if (region.dimension() == 1) {
        for (double x : xs) {
            out.push_back({x, 0.0});
        }
        return out;
    }
    // Column-major: worlds in the same column are consecutive.
    const auto ys = cell_centres(region.axis(1), counts[1]);
    for (double x : xs) {
        for (double y : ys) {
            out.push_back({x, y});
        }
    }
    return out;
}

std::vector<Vec> radial_layout(const Region& region, const std::vector<std::size_t>& counts)
{
    if (region.dimension() != 2) {
        fail(ErrorKind::InvalidLayout, "radial layout needs a 2D region");
    }
    const Vec c = region.center();
    const double half = 0.5 * std::min(region.axis(0).length(), region.axis(1).length());
    const bool centre_world = counts.front() == 1;
    const double rings = static_cast<double>(counts.size()) + (centre_world ? 0.0 : 0.5);
    const double dr = half / rings;
    std::vector<Vec> out;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const double r = (static_cast<double>(j) + (centre_world ? 0.0 : 0.5)) * dr;
        if (r == 0.0) {
            out.push_back(c);
            continue;
        }
        for (std::size_t i = 0; i < counts[j]; ++i) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(counts[j]);
            out.push_back(c + Vec{r * std::cos(a), r * std::sin(a)});
        }
    }
    return out;
}

double relative_to_scale(double v, double scale) { return std::abs(v) <= 1e-12 * std::max(1.0, scale); }

}  // namespace

double mean_nearest_spacing(const WorldEnsemble& ens)
{
    const std::size_t n = ens.size();
    if (n < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) {
                best = std::min(best, norm(ens.positions[i] - ens.positions[k]));
            }
        }
        total += best;
    }
    return total / static_cast<double>(n);
}

WorldEnsemble make_initial(const Region& region, const LayoutSpec& layout, const BoundarySpec& boundary,
                           const NodeSpec& nodes, const Kernel& kernel)
{
    if (kernel.dimension() != region.dimension()) {
        fail(ErrorKind::InvalidLayout, "kernel and region dimensions differ");
    }
    WorldEnsemble ens;
    ens.dim = region.dimension();
    switch (layout.layout) {
    case Layout::UniformGrid:
        ens.positions = grid_layout(region, layout.counts);
        break;
    case Layout::Radial:
        if (layout.counts.empty()) {
            fail(ErrorKind::InvalidLayout, "radial layout needs ring counts");
        }
        ens.positions = radial_layout(region, layout.counts);
        break;
    case Layout::Explicit:
        ens.positions = layout.positions;
        break;
    }
    if (ens.positions.size() < 2) {
        fail(ErrorKind::InvalidLayout, "a run needs at least two worlds");
    }
    for (const Vec& p : ens.positions) {
        if (!region.contains(p)) {
            fail(ErrorKind::InvalidLayout, "layout places a world outside the region");
        }
    }

    const std::size_t n_core = ens.positions.size();
    ens.roles.assign(n_core, WorldRole::Free);
    ens.signs.assign(n_core, 1);

    if (layout.jitter > 0.0) {
        const double spacing = mean_nearest_spacing(ens);
        std::mt19937_64 rng(layout.seed);
        std::uniform_real_distribution<double> u(-layout.jitter * spacing, layout.jitter * spacing);
        for (Vec& p : ens.positions) {
            Vec q{p.x + u(rng), ens.dim == 2 ? p.y + u(rng) : 0.0};
            if (region.contains(q)) {
                p = q;
            }
        }
    }

    std::vector<std::size_t> node_ids;
    if (nodes.enabled) {
        if (ens.dim != 2) {
            fail(ErrorKind::InvalidLayout, "preset node lines need a 2D layout");
        }
        const double scale = std::max(region.axis(0).length(), region.axis(1).length());
        for (std::size_t i = 0; i < n_core; ++i) {
            if (relative_to_scale(ens.positions[i].x - nodes.line_x, scale)) {
                node_ids.push_back(i);
            }
        }
        if (node_ids.empty()) {
            fail(ErrorKind::InvalidLayout, "no world lies on the declared nodal line");
        }
        for (std::size_t i : node_ids) {
            ens.roles[i] = WorldRole::Node;
            ens.signs[i] = -1;
        }
    }

    if (boundary.enabled) {
        std::vector<Vec> extra;
        if (ens.dim == 1) {
            extra = {{region.axis(0).lo, 0.0}, {region.axis(0).hi, 0.0}};
        } else {
            const Interval& x = region.axis(0);
            const Interval& y = region.axis(1);
            extra = {{x.lo, y.lo}, {x.hi, y.lo}, {x.lo, y.hi}, {x.hi, y.hi}};
        }
        for (const Vec& p : extra) {
            ens.positions.push_back(p);
            ens.roles.push_back(WorldRole::FixedBoundary);
            ens.signs.push_back(1);
        }
    }
    ens.velocities.assign(ens.positions.size(), Vec{});

    // Bandwidths from the uniform target density on the region.
    const double uniform = 1.0 / region.volume();
    ens.bandwidths = initial_bandwidths(ens.positions, [uniform](const Vec&) { return uniform; }, kernel,
                                        layout.bandwidth_constant, ens.roles);
    if (nodes.enabled) {
        const double h0 = ens.bandwidths[std::find(ens.roles.begin(), ens.roles.end(), WorldRole::Free) -
                                         ens.roles.begin()];
        std::vector<std::size_t> along = node_ids;
        std::sort(along.begin(), along.end(),
                  [&](std::size_t a, std::size_t b) { return ens.positions[a].y < ens.positions[b].y; });
        for (std::size_t k = 0; k < along.size(); ++k) {
            const bool inf = std::find(nodes.infinite.begin(), nodes.infinite.end(), k) != nodes.infinite.end();
            ens.bandwidths[along[k]] = inf ? std::numeric_limits<double>::infinity() : h0;
        }
        for (std::size_t k : nodes.infinite) {
            if (k >= along.size()) {
                fail(ErrorKind::InvalidLayout, "infinite-bandwidth node index beyond the nodal line");
            }
        }
        const double radius = nodes.domain_radius_factor * mean_nearest_spacing(ens);
        for (std::size_t i = 0; i < ens.size(); ++i) {
            if (ens.roles[i] != WorldRole::Free) {
                continue;
            }
            for (std::size_t k : node_ids) {
                if (norm(ens.positions[i] - ens.positions[k]) <= radius) {
                    ens.roles[i] = WorldRole::NodeDomain;
                    break;
                }
            }
        }
    }
    ens.validate();
    return ens;
}

void RelaxationSchedule::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        fail(ErrorKind::ConfigError, "time interval dt must be positive");
    }
    if (iterations == 0 || substeps == 0 || recursion_every == 0 || recursion_sweeps == 0 || window == 0) {
        fail(ErrorKind::ConfigError, "iteration counts and recursion cadence must be at least 1");
    }
    if (!(recursion_exponent > 0.0) || !(force_tol >= 0.0) || !(energy_tol >= 0.0) || !(recursion_tol >= 0.0)) {
        fail(ErrorKind::ConfigError, "tolerances and recursion exponent must be nonnegative");
    }
}

void apply_step(WorldEnsemble& ens, const ForceField& forces, double dt)
{
    const double k = 0.5 * dt * dt;
    for (std::size_t n = 0; n < ens.size(); ++n) {
        switch (ens.roles[n]) {
        case WorldRole::FixedBoundary:
            break;
        case WorldRole::Node: {
            const Vec f = forces.total(n);
            ens.positions[n] += (k * dot(f, kNodeLineDirection)) * kNodeLineDirection;
            break;
        }
        default:
            ens.positions[n] += k * forces.total(n);
            break;
        }
        ens.velocities[n] = Vec{};
    }
}

void check_collisions(const WorldEnsemble& ens, double eps, const std::vector<Vec>* before)
{
    const std::size_t n = ens.size();
    if (ens.dim == 1 && before != nullptr) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return (*before)[a].x < (*before)[b].x; });
        for (std::size_t i = 1; i < n; ++i) {
            const double gap = ens.positions[order[i]].x - ens.positions[order[i - 1]].x;
            if (!(gap > eps)) {
                fail(ErrorKind::CollisionDetected, "worlds " + std::to_string(order[i - 1]) + " and " +
                                                       std::to_string(order[i]) + " crossed or met");
            }
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (!(norm(ens.positions[i] - ens.positions[k]) > eps)) {
                fail(ErrorKind::CollisionDetected,
                     "worlds " + std::to_string(i) + " and " + std::to_string(k) + " collided");
            }
        }
    }
}

WorldEnsemble step(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model, double dt,
                   double collision_eps)
{
    const Evaluation ev = evaluate(ens, kernel, model);
    WorldEnsemble out = ens;
    apply_step(out, ev.forces, dt);
    check_collisions(out, collision_eps, &ens.positions);
    return out;
}

double recursion_sweep(WorldEnsemble& ens, const Kernel& kernel, const Region& region,
                       const RelaxationSchedule& schedule, const std::vector<std::size_t>& node_domain)
{
    const CellPartition cells = voronoi_cells(ens.positions, region);
    std::vector<double> priori = priori_density(cells, ens.size());
    const KernelSum sum = ens.density(kernel);

    if (schedule.mass_normalized) {
        // Rescale the priori so it carries the same mass over the free cells as
        // the estimate; the recursion then corrects shape rather than the mass
        // the kernels lose across the region boundary.
        double est = 0.0;
        double pri = 0.0;
        for (std::size_t n = 0; n < ens.size(); ++n) {
            if (ens.roles[n] == WorldRole::Free || ens.roles[n] == WorldRole::NodeDomain) {
                est += sum.density(ens.positions[n]) * cells.volumes[n];
                pri += priori[n] * cells.volumes[n];
            }
        }
        if (est > 0.0 && pri > 0.0) {
            for (double& p : priori) {
                p *= est / pri;
            }
        }
    }

    std::vector<double> next = recurse_bandwidth(sum, priori, ens.roles, 1.0, schedule.recursion_exponent);
    const auto nodes = ens.indices_of(WorldRole::Node);
    if (!nodes.empty() && !node_domain.empty()) {
        const auto node_h = recurse_node_bandwidth(sum, nodes, node_domain, schedule.node_self_term);
        const auto domain_h = recurse_node_domain_bandwidth(sum, priori, ens.roles);
        for (std::size_t n : nodes) {
            next[n] = node_h[n];
        }
        for (std::size_t n : node_domain) {
            next[n] = domain_h[n];
        }
    }
    const double change = max_relative_change(ens.bandwidths, next);
    ens.bandwidths = std::move(next);
    return change;
}

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::Aborted: return "aborted";
    }
    return "aborted";
}

namespace {

Evaluation evaluate_with(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model,
                         const RelaxationSchedule& schedule, const SymmetryPlan* plan)
{
    if (plan == nullptr || plan->kind == Symmetry::None) {
        return evaluate(ens, kernel, model, schedule.threads);
    }
    Evaluation ev = evaluate(ens, kernel, model, schedule.threads, plan->representatives);
    replicate(*plan, ev, ens);
    return ev;
}

// Integrates one interval of length dt from rest in `substeps` velocity-Verlet
// sub-steps; velocities are discarded at the end.
void integrate(WorldEnsemble& ens, const Evaluation& first, const Kernel& kernel, const PotentialModel& model,
               const RelaxationSchedule& schedule, const SymmetryPlan* plan, double dt)
{
    if (schedule.substeps == 1) {
        apply_step(ens, first.forces, dt);
        return;
    }
    const double tau = dt / static_cast<double>(schedule.substeps);
    ForceField f = first.forces;
    std::vector<Vec> v(ens.size());
    for (std::size_t s = 0; s < schedule.substeps; ++s) {
        for (std::size_t n = 0; n < ens.size(); ++n) {
            if (!ens.movable(n)) {
                continue;
            }
            Vec move = tau * v[n] + (0.5 * tau * tau) * f.total(n);
            if (ens.roles[n] == WorldRole::Node) {
                move = dot(move, kNodeLineDirection) * kNodeLineDirection;
            }
            ens.positions[n] += move;
        }
        const ForceField g = evaluate_with(ens, kernel, model, schedule, plan).forces;
        for (std::size_t n = 0; n < ens.size(); ++n) {
            v[n] += (0.5 * tau) * (f.total(n) + g.total(n));
        }
        f = g;
    }
    for (Vec& vel : ens.velocities) {
        vel = Vec{};
    }
}

}  // namespace

RunRecord relax(const WorldEnsemble& initial, const Kernel& kernel, const PotentialModel& model,
                const Region& region, const RelaxationSchedule& schedule, const RelaxOptions& options)
{
    const auto started = std::chrono::steady_clock::now();
    schedule.validate();
    initial.validate();
    if (initial.dim != region.dimension() || kernel.dimension() != region.dimension()) {
        fail(ErrorKind::ConfigError, "ensemble, kernel and region dimensions differ");
    }

    RunRecord rec;
    WorldEnsemble ens = initial;
    const double eps = 1e-6 * mean_nearest_spacing(initial);
    const std::vector<std::size_t> node_domain = ens.indices_of(WorldRole::NodeDomain);
    const SymmetryPlan* plan = options.symmetry;
    double dt = schedule.dt;

    try {
        for (std::size_t it = 0; it < schedule.iterations; ++it) {
            IterationRecord row;
            row.iteration = it;
            if (it % schedule.recursion_every == 0) {
                // The recorded change spans the whole recursion step, not its last sweep.
                const std::vector<double> held = ens.bandwidths;
                for (std::size_t s = 0; s < schedule.recursion_sweeps; ++s) {
                    const double sweep = recursion_sweep(ens, kernel, region, schedule, node_domain);
                    if (plan != nullptr) {
                        symmetrize_bandwidths(*plan, ens);
                    }
                    if (sweep < schedule.recursion_tol) {
                        break;
                    }
                }
                row.bandwidth_change = max_relative_change(held, ens.bandwidths);
            }
            const Evaluation ev = evaluate_with(ens, kernel, model, schedule, plan);
            row.energy_eq3 = ev.energy.eq3_mean;
            row.energy_eq1 = ev.energy.eq1_sum;
            row.max_force = ev.max_force;

            if (schedule.backtracking && !rec.trace.empty()) {
                const double prev = rec.trace.back().energy_eq3;
                if (row.energy_eq3 - prev > 0.1 * std::abs(prev)) {
                    dt *= 0.5;
                }
            }
            row.dt = dt;
            rec.trace.push_back(row);

            if (schedule.snapshot_every != 0 && it % schedule.snapshot_every == 0) {
                rec.snapshots.push_back({it, ens.positions, ens.bandwidths});
            }

            // A configuration that is already stationary on the first evaluation
            // stops at once; otherwise stationarity must hold over a full window.
            if (ev.max_force < schedule.force_tol && (it == 0 || rec.trace.size() >= schedule.window)) {
                const std::size_t w = std::min(schedule.window, rec.trace.size());
                double lo = row.energy_eq3;
                double hi = row.energy_eq3;
                for (std::size_t k = rec.trace.size() - w; k < rec.trace.size(); ++k) {
                    lo = std::min(lo, rec.trace[k].energy_eq3);
                    hi = std::max(hi, rec.trace[k].energy_eq3);
                }
                if (hi - lo < schedule.energy_tol) {
                    rec.termination = Termination::Converged;
                    break;
                }
            }

            const std::vector<Vec> before = ens.positions;
            integrate(ens, ev, kernel, model, schedule, plan, dt);
            check_collisions(ens, eps, &before);
            for (std::size_t n = 0; n < ens.size(); ++n) {
                if (!region.contains(ens.positions[n])) {
                    fail(ErrorKind::OutOfRegion, "world " + std::to_string(n) + " left the region");
                }
            }
            if (!std::isfinite(row.energy_eq3)) {
                fail(ErrorKind::DensityUnderflow, "energy is not finite");
            }
        }
    } catch (const Error& e) {
        rec.termination = Termination::Aborted;
        rec.abort_kind = e.kind();
        rec.message = e.what();
    }
    if (schedule.snapshot_every != 0 && (rec.snapshots.empty() || rec.snapshots.back().iteration != rec.trace.size())) {
        rec.snapshots.push_back({rec.trace.size(), ens.positions, ens.bandwidths});
    }
    rec.final_state = std::move(ens);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

}  // namespace miw
