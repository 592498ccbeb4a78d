#include <doctest.h>

#include <cmath>
#include <numeric>

#include "miw/config.hpp"
#include "miw/dynamics.hpp"
#include "miw/harness.hpp"
#include "miw/symmetry.hpp"
#include "support.hpp"

using namespace miw;

namespace {

WorldEnsemble line_ensemble(std::vector<double> xs, double h)
{
    WorldEnsemble e;
    e.dim = 1;
    for (double x : xs) {
        e.positions.push_back({x, 0.0});
    }
    e.velocities.assign(xs.size(), Vec{});
    e.bandwidths.assign(xs.size(), h);
    e.roles.assign(xs.size(), WorldRole::Free);
    e.signs.assign(xs.size(), 1);
    return e;
}

RunConfig config(const char* name) { return load_run_config(std::filesystem::path(MIW_CONFIG_DIR) / name); }

bool same_records(const RunRecord& a, const RunRecord& b)
{
    if (a.trace.size() != b.trace.size() || a.termination != b.termination) {
        return false;
    }
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        const auto& x = a.trace[i];
        const auto& y = b.trace[i];
        if (x.energy_eq3 != y.energy_eq3 || x.energy_eq1 != y.energy_eq1 || x.max_force != y.max_force ||
            x.bandwidth_change != y.bandwidth_change) {
            return false;
        }
    }
    return a.final_state.positions == b.final_state.positions &&
           a.final_state.bandwidths == b.final_state.bandwidths;
}

}  // namespace

TEST_CASE("zero force leaves worlds in place")
{
    auto e = line_ensemble({-1.0, 0.5, 2.0}, 0.7);
    const auto before = e.positions;
    ForceField f;
    f.classical.assign(3, Vec{});
    f.quantum.assign(3, Vec{});
    f.q.assign(3, 0.0);
    apply_step(e, f, 0.3);
    CHECK(e.positions == before);
}

TEST_CASE("a lone world in the oscillator falls by dt^2/2")
{
    // The lone kernel's Q is extremal at its centre, so only -x acts.
    const Kernel k(KernelFamily::Gaussian, 1);
    const auto e = line_ensemble({1.0}, 0.8);
    for (double dt : {0.05, 0.1, 0.4}) {
        const WorldEnsemble next = step(e, k, Harmonic{}, dt);
        CHECK(next.positions[0].x == doctest::Approx(1.0 - 0.5 * dt * dt).epsilon(1e-15));
        CHECK(next.velocities[0] == Vec{});
    }
}

TEST_CASE("step keeps fixed worlds and projects node motion onto the line")
{
    WorldEnsemble e;
    e.dim = 2;
    e.positions = {{0.0, 0.0}, {1.0, 1.0}, {0.0, 0.5}};
    e.velocities.assign(3, Vec{});
    e.bandwidths = {0.5, std::numeric_limits<double>::infinity(), 0.5};
    e.roles = {WorldRole::Free, WorldRole::FixedBoundary, WorldRole::Node};
    e.signs = {1, 1, -1};
    ForceField f;
    f.classical = {{1.0, 2.0}, {3.0, 3.0}, {4.0, -2.0}};
    f.quantum.assign(3, Vec{});
    f.q.assign(3, 0.0);
    apply_step(e, f, 1.0);
    CHECK(e.positions[0] == Vec{0.5, 1.0});
    CHECK(e.positions[1] == Vec{1.0, 1.0});
    CHECK(e.positions[2] == Vec{0.0, -0.5});
}

TEST_CASE("collision guard")
{
    const auto close = line_ensemble({0.0, 1e-9, 1.0}, 0.5);
    CHECK_FAILS_WITH(check_collisions(close, 1e-6), ErrorKind::CollisionDetected);
    const auto swapped = line_ensemble({0.6, 0.4}, 0.5);
    const std::vector<Vec> before{{0.4, 0.0}, {0.6, 0.0}};
    CHECK_FAILS_WITH(check_collisions(swapped, 1e-6, &before), ErrorKind::CollisionDetected);
    check_collisions(line_ensemble({0.0, 1.0}, 0.5), 1e-6);
}

TEST_CASE("initial layouts")
{
    const Kernel k2(KernelFamily::Gaussian, 2);
    const Region square({-1.5, 1.5}, {-1.5, 1.5});
    SUBCASE("6x6 grid with fixed corners")
    {
        LayoutSpec l;
        l.counts = {6, 6};
        const auto e = make_initial(square, l, BoundarySpec{true}, NodeSpec{}, k2);
        CHECK(e.size() == 40);
        CHECK(e.indices_of(WorldRole::Free).size() == 36);
        const auto fixed = e.indices_of(WorldRole::FixedBoundary);
        REQUIRE(fixed.size() == 4);
        for (std::size_t i : fixed) {
            CHECK(std::isinf(e.bandwidths[i]));
            CHECK(std::abs(e.positions[i].x) == 1.5);
            CHECK(std::abs(e.positions[i].y) == 1.5);
        }
        CHECK(e.positions[0] == Vec{-1.25, -1.25});
        // h = h* / P with the uniform priori 1/9.
        CHECK(e.bandwidths[0] == doctest::Approx(9.0 * std::pow(40.0, -1.0 / 6.0)));
    }
    SUBCASE("preset node column")
    {
        LayoutSpec l;
        l.counts = {7, 6};
        NodeSpec n;
        n.enabled = true;
        n.infinite = {1, 4};
        const auto e = make_initial(square, l, BoundarySpec{}, n, k2);
        CHECK(e.size() == 42);
        const auto nodes = e.indices_of(WorldRole::Node);
        REQUIRE(nodes.size() == 6);
        std::size_t infinite = 0;
        for (std::size_t i : nodes) {
            CHECK(e.positions[i].x == doctest::Approx(0.0));
            CHECK(e.signs[i] == -1);
            infinite += std::isinf(e.bandwidths[i]) ? 1 : 0;
        }
        CHECK(infinite == 2);
        CHECK(std::isinf(e.bandwidths[nodes[1]]));
        CHECK(std::isinf(e.bandwidths[nodes[4]]));
        CHECK_FALSE(e.indices_of(WorldRole::NodeDomain).empty());
    }
    SUBCASE("degenerate layouts")
    {
        LayoutSpec l;
        l.layout = Layout::Explicit;
        l.positions = {{0.0, 0.0}};
        CHECK_FAILS_WITH(make_initial(square, l, BoundarySpec{}, NodeSpec{}, k2), ErrorKind::InvalidLayout);
        l.positions = {{0.0, 0.0}, {2.0, 0.0}};
        CHECK_FAILS_WITH(make_initial(square, l, BoundarySpec{}, NodeSpec{}, k2), ErrorKind::InvalidLayout);
        LayoutSpec g;
        g.counts = {6, 6};
        NodeSpec n;
        n.enabled = true;
        n.line_x = 0.3;
        CHECK_FAILS_WITH(make_initial(square, g, BoundarySpec{}, n, k2), ErrorKind::InvalidLayout);
    }
}

TEST_CASE("schedule validation")
{
    RelaxationSchedule s;
    s.dt = 0.0;
    CHECK_FAILS_WITH(s.validate(), ErrorKind::ConfigError);
    s.dt = 0.1;
    s.recursion_every = 0;
    CHECK_FAILS_WITH(s.validate(), ErrorKind::ConfigError);
}

TEST_CASE("a stationary start converges at once")
{
    // Two worlds at +-a in the oscillator: choose a so that -a balances the
    // quantum force, and the region so that the priori equals the estimate.
    const Kernel k(KernelFamily::Gaussian, 1);
    const double h = 0.6;
    auto net = [&](double a) {
        const auto e = line_ensemble({-a, a}, h);
        return -a - quantum_at(e.density(k), Vec{a, 0.0}).grad_q.x;
    };
    double lo = 0.05;
    double hi = 3.0;
    REQUIRE(net(lo) > 0.0);
    REQUIRE(net(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (net(mid) > 0.0 ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    const auto e = line_ensemble({-a, a}, h);
    const double r = 1.0 / (2.0 * e.density(k).density(Vec{a, 0.0}));
    REQUIRE(r > a);

    RelaxationSchedule s;
    s.dt = 0.05;
    s.iterations = 500;
    s.recursion_every = 1;
    s.recursion_sweeps = 1;
    s.mass_normalized = false;
    const RunRecord rec = relax(e, k, Harmonic{}, Region({-r, r}), s);
    CHECK(rec.termination == Termination::Converged);
    CHECK(rec.trace.size() == 1);
    CHECK(rec.final_state.positions == e.positions);
}

TEST_CASE("symmetry reduction")
{
    RunConfig c = config("coulomb_2d.json");
    const Kernel k = c.make_kernel();
    const auto e = make_initial(c.region, c.layout, c.boundary, c.nodes, k);
    const SymmetryPlan plan = exploit_symmetry(e, c.potential, Symmetry::Quadrant);
    CHECK(plan.representatives.size() == 10);  // 9 grid worlds and one corner
    const Evaluation full = evaluate(e, k, c.potential);
    Evaluation part = evaluate(e, k, c.potential, 1, plan.representatives);
    replicate(plan, part, e);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(norm(part.forces.total(i) - full.forces.total(i)) <= 1e-12 * std::max(1.0, norm(full.forces.total(i))));
    }
    CHECK(part.energy.eq3_mean == doctest::Approx(full.energy.eq3_mean).epsilon(1e-13));

    c.schedule.iterations = 200;
    const RunRecord plain = relax(e, k, c.potential, c.region, c.schedule);
    RelaxOptions opts;
    opts.symmetry = &plan;
    const RunRecord reduced = relax(e, k, c.potential, c.region, c.schedule, opts);
    REQUIRE(reduced.trace.size() == plain.trace.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        worst = std::max(worst, norm(reduced.final_state.positions[i] - plain.final_state.positions[i]));
    }
    // The image worlds sum their kernels in a different order, so rounding
    // differs by a few ulps per step; the plain run drifts off the symmetric
    // manifold at the same rate while the reduced one stays on it exactly.
    double drift = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const Vec img = plan.transform[i] * reduced.final_state.positions[plan.source[i]];
        CHECK(reduced.final_state.positions[i] == img);
        drift = std::max(drift, norm(plain.final_state.positions[i] -
                                     plan.transform[i] * plain.final_state.positions[plan.source[i]]));
    }
    MESSAGE("largest gap after 200 iterations: reduced vs plain " << worst << ", plain asymmetry " << drift);
    CHECK(worst < 1e-6);

    auto skew = e;
    skew.positions[0].x += 0.01;
    CHECK_FAILS_WITH(exploit_symmetry(skew, c.potential, Symmetry::Quadrant), ErrorKind::SymmetryViolation);
    // The well is even in x and flat in y, so only the rotations expose it.
    exploit_symmetry(e, FiniteWellErf{}, Symmetry::Quadrant);
    CHECK_FAILS_WITH(exploit_symmetry(e, FiniteWellErf{}, Symmetry::Radial), ErrorKind::SymmetryViolation);
}

TEST_CASE("oscillator run")
{
    const RunConfig c = config("harmonic_1d.json");
    const RunRecord rec = execute_run(c);
    REQUIRE(rec.termination == Termination::Converged);
    const double e = rec.trace.back().energy_eq3;
    CHECK(std::abs(e - 0.5) / 0.5 < 0.02);

    SUBCASE("stationary at termination")
    {
        CHECK(rec.trace.back().max_force < c.schedule.force_tol);
        const Evaluation ev = evaluate(rec.final_state, c.make_kernel(), c.potential);
        for (std::size_t i : rec.final_state.indices_of(WorldRole::Free)) {
            CHECK(norm(ev.forces.total(i)) < c.schedule.force_tol);
        }
    }
    SUBCASE("energy descends on average")
    {
        double first = 0.0;
        double last = 0.0;
        for (std::size_t i = 0; i < 100; ++i) {
            first += rec.trace[i].energy_eq3;
            last += rec.trace[rec.trace.size() - 1 - i].energy_eq3;
        }
        CHECK(last < first);
    }
    SUBCASE("mirror symmetry survives the whole run")
    {
        const auto& x = rec.final_state.positions;
        const auto free = rec.final_state.indices_of(WorldRole::Free);
        for (std::size_t i = 0; i < free.size(); ++i) {
            CHECK(std::abs(x[free[i]].x + x[free[free.size() - 1 - i]].x) < 1e-9);
        }
    }
    SUBCASE("both energy estimators")
    {
        const double gap = std::abs(rec.trace.back().energy_eq1 - e) / std::abs(e);
        MESSAGE("eq1/eq3 relative gap on the converged oscillator: " << gap);
        CHECK(std::isfinite(gap));
    }
}

TEST_SUITE("properties")
{
    TEST_CASE("step and relax are bitwise deterministic")
    {
        RunConfig c = config("coulomb_2d.json");
        c.schedule.iterations = 150;
        const RunRecord a = execute_run(c);
        const RunRecord b = execute_run(c);
        CHECK(same_records(a, b));
        c.schedule.threads = 4;
        CHECK(same_records(a, execute_run(c)));

        const Kernel k = c.make_kernel();
        const auto e = make_initial(c.region, c.layout, c.boundary, c.nodes, k);
        const auto s1 = step(e, k, c.potential, 0.075);
        const auto s2 = step(e, k, c.potential, 0.075);
        CHECK(s1.positions == s2.positions);
    }

    TEST_CASE("mirror-symmetric ensembles stay symmetric under steps")
    {
        const Kernel k(KernelFamily::Gaussian, 1);
        auto e = line_ensemble({-2.1, -1.2, -0.4, 0.4, 1.2, 2.1}, 0.7);
        for (int i = 0; i < 200; ++i) {
            e = step(e, k, FiniteWellErf{2.0, 1.0, 2.0}, 0.05);
        }
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs(e.positions[i].x + e.positions[5 - i].x) < 1e-9);
        }
    }

    TEST_CASE("no two worlds meet during a successful run")
    {
        RunConfig c = config("coulomb_2d.json");
        c.schedule.iterations = 400;
        c.schedule.snapshot_every = 50;
        const RunRecord rec = execute_run(c);
        REQUIRE(rec.termination != Termination::Aborted);
        const double eps = 1e-6 * mean_nearest_spacing(make_initial(c.region, c.layout, c.boundary, c.nodes,
                                                                   c.make_kernel()));
        for (const auto& snap : rec.snapshots) {
            for (std::size_t i = 0; i < snap.positions.size(); ++i) {
                for (std::size_t j = i + 1; j < snap.positions.size(); ++j) {
                    CHECK(norm(snap.positions[i] - snap.positions[j]) > eps);
                }
            }
        }
    }
}
