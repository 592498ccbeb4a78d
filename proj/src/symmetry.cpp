#include "miw/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "miw/error.hpp"

namespace miw {

namespace {

constexpr double kMatchTolerance = 1e-9;
constexpr double kPotentialTolerance = 1e-12;

struct GroupElement {
    Mat2 m;
    std::vector<std::size_t> perm;  // world n maps to world perm[n]
};

bool same_bandwidth(double a, double b)
{
    if (std::isinf(a) || std::isinf(b)) {
        return a == b;
    }
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

// Permutation induced by m, or empty if the ensemble is not invariant.
std::vector<std::size_t> induced_permutation(const WorldEnsemble& ens, const Mat2& m)
{
    const double scale = std::max(1.0, [&] {
        double r = 0.0;
        for (const Vec& p : ens.positions) {
            r = std::max(r, norm(p));
        }
        return r;
    }());
    std::vector<std::size_t> perm(ens.size());
    for (std::size_t n = 0; n < ens.size(); ++n) {
        const Vec image = m * ens.positions[n];
        bool found = false;
        for (std::size_t k = 0; k < ens.size(); ++k) {
            if (norm(image - ens.positions[k]) <= kMatchTolerance * scale && ens.roles[k] == ens.roles[n] &&
                ens.signs[k] == ens.signs[n] && same_bandwidth(ens.bandwidths[k], ens.bandwidths[n])) {
                perm[n] = k;
                found = true;
                break;
            }
        }
        if (!found) {
            return {};
        }
    }
    return perm;
}

Mat2 rotation(double angle) { return {std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)}; }

std::vector<Mat2> candidate_group(const WorldEnsemble& ens, Symmetry s)
{
    switch (s) {
    case Symmetry::None:
        return {Mat2{}};
    case Symmetry::AxisMirror:
        return {Mat2{}, Mat2{-1, 0, 0, 1}};
    case Symmetry::Quadrant:
        return {Mat2{}, Mat2{-1, 0, 0, 1}, Mat2{1, 0, 0, -1}, Mat2{-1, 0, 0, -1}};
    case Symmetry::Radial: {
        // Largest cyclic group that maps the layout onto itself.
        for (std::size_t k = ens.size(); k >= 2; --k) {
            const Mat2 r = rotation(2.0 * std::numbers::pi / static_cast<double>(k));
            if (!induced_permutation(ens, r).empty()) {
                std::vector<Mat2> group;
                for (std::size_t j = 0; j < k; ++j) {
                    group.push_back(rotation(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k)));
                }
                return group;
            }
        }
        fail(ErrorKind::SymmetryViolation, "layout has no rotational symmetry");
    }
    }
    return {Mat2{}};
}

void check_potential(const PotentialModel& model, const std::vector<GroupElement>& group,
                     const std::vector<Vec>& samples)
{
    for (const auto& g : group) {
        for (const Vec& p : samples) {
            const double v0 = value(model, p);
            const double v1 = value(model, g.m * p);
            if (std::abs(v0 - v1) > kPotentialTolerance * std::max(1.0, std::abs(v0))) {
                fail(ErrorKind::SymmetryViolation,
                     std::string(model_name(model)) + " potential is not invariant under the declared symmetry");
            }
        }
    }
}

}  // namespace

std::string_view to_string(Symmetry s)
{
    switch (s) {
    case Symmetry::None: return "none";
    case Symmetry::Quadrant: return "quadrant";
    case Symmetry::Radial: return "radial";
    case Symmetry::AxisMirror: return "axis_mirror";
    }
    return "none";
}

Symmetry symmetry_from_string(std::string_view name)
{
    for (Symmetry s : {Symmetry::None, Symmetry::Quadrant, Symmetry::Radial, Symmetry::AxisMirror}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    fail(ErrorKind::ConfigError, "unknown symmetry '" + std::string(name) + "'");
}

SymmetryPlan exploit_symmetry(const WorldEnsemble& ens, const PotentialModel& model, Symmetry symmetry)
{
    ens.validate();
    if (symmetry != Symmetry::None && symmetry != Symmetry::AxisMirror && ens.dim != 2) {
        fail(ErrorKind::SymmetryViolation, std::string(to_string(symmetry)) + " symmetry needs a 2D ensemble");
    }
    std::vector<GroupElement> group;
    for (const Mat2& m : candidate_group(ens, symmetry)) {
        auto perm = induced_permutation(ens, m);
        if (perm.empty()) {
            fail(ErrorKind::SymmetryViolation,
                 "ensemble is not invariant under the declared " + std::string(to_string(symmetry)) + " symmetry");
        }
        group.push_back({m, std::move(perm)});
    }
    std::vector<Vec> samples = ens.positions;
    for (int i = 0; i < 16; ++i) {
        const double t = 0.37 * i + 0.1;
        samples.push_back({std::cos(1.3 * i) * t, ens.dim == 2 ? std::sin(0.7 * i) * t : 0.0});
    }
    check_potential(model, group, samples);

    SymmetryPlan plan;
    plan.kind = symmetry;
    const std::size_t n = ens.size();
    plan.source.assign(n, n);
    plan.transform.assign(n, Mat2{});
    for (std::size_t w = 0; w < n; ++w) {
        if (plan.source[w] != n) {
            continue;
        }
        // w is the smallest index of its orbit.
        plan.representatives.push_back(w);
        for (const auto& g : group) {
            const std::size_t img = g.perm[w];
            if (plan.source[img] == n) {
                plan.source[img] = w;
                plan.transform[img] = g.m;
            }
        }
    }
    return plan;
}

void replicate(const SymmetryPlan& plan, Evaluation& ev, const WorldEnsemble& ens)
{
    for (std::size_t w = 0; w < plan.source.size(); ++w) {
        const std::size_t s = plan.source[w];
        if (s == w) {
            continue;
        }
        const Mat2& m = plan.transform[w];
        ev.forces.classical[w] = m * ev.forces.classical[s];
        ev.forces.quantum[w] = m * ev.forces.quantum[s];
        ev.forces.q[w] = ev.forces.q[s];
        ev.energy.quantum[w] = ev.energy.quantum[s];
        ev.energy.potential[w] = ev.energy.potential[s];
        ev.interworld_terms[w] = ev.interworld_terms[s];
    }
    finalize(ev, ens);
}

void symmetrize_bandwidths(const SymmetryPlan& plan, WorldEnsemble& ens)
{
    for (std::size_t w = 0; w < plan.source.size(); ++w) {
        ens.bandwidths[w] = ens.bandwidths[plan.source[w]];
    }
}

}  // namespace miw
