#include "miw/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "miw/error.hpp"

namespace miw {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

// Below this reduced radius the radial models switch to their Taylor series;
// the closed forms cancel catastrophically near the origin.
constexpr double kSeriesCutoff = 1e-2;

// Radial value V(r) and g(r) = V'(r)/r, so that grad V = g x stays finite at r = 0.
struct Radial {
    double v;
    double g;
};

Radial erf_part(double mu, double r)
{
    const double z = mu * r;
    if (z < kSeriesCutoff) {
        const double z2 = z * z;
        return {-kTwoOverSqrtPi * mu * (1.0 - z2 / 3.0 + z2 * z2 / 10.0 - z2 * z2 * z2 / 42.0),
                kTwoOverSqrtPi * mu * mu * mu * (2.0 / 3.0 - 2.0 * z2 / 5.0 + z2 * z2 / 7.0)};
    }
    const double e = std::erf(z);
    const double dv = e / (r * r) - kTwoOverSqrtPi * mu * std::exp(-z * z) / r;
    return {-e / r, dv / r};
}

Radial tanh_part(double mu, double r)
{
    const double z = mu * r;
    if (z < kSeriesCutoff) {
        const double z2 = z * z;
        return {-mu * (1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 15.0),
                mu * mu * mu * (2.0 / 3.0 - 8.0 * z2 / 15.0 + 34.0 * z2 * z2 / 105.0)};
    }
    const double t = std::tanh(z);
    const double sech = 1.0 / std::cosh(z);
    const double dv = t / (r * r) - mu * sech * sech / r;
    return {-t / r, dv / r};
}

struct ValueVisitor {
    Vec x;

    double operator()(const Harmonic&) const { return 0.5 * norm2(x); }
    double operator()(const CoulombExact&) const
    {
        const double r = norm(x);
        if (r == 0.0) {
            fail(ErrorKind::SingularEvaluation, "exact Coulomb potential at the origin");
        }
        return -1.0 / r;
    }
    double operator()(const CoulombCutoff& m) const { return -1.0 / (norm(x) + m.a); }
    double operator()(const CoulombErf& m) const
    {
        const double r = norm(x);
        return -m.c * std::exp(-m.alpha * m.alpha * r * r) + erf_part(m.mu, r).v;
    }
    double operator()(const CoulombTanh& m) const { return tanh_part(m.mu, norm(x)).v; }
    double operator()(const FiniteWellErf& m) const
    {
        return 0.5 * m.depth *
               (std::erf(m.nu * (x.x - m.half_width)) - std::erf(m.nu * (x.x + m.half_width)) + 2.0);
    }
    double operator()(const SquareWell& m) const
    {
        const double ax = std::abs(x.x);
        if (ax < m.half_width) {
            return 0.0;
        }
        return ax == m.half_width ? 0.5 * m.depth : m.depth;
    }
};

struct GradientVisitor {
    Vec x;

    Vec operator()(const Harmonic&) const { return x; }
    Vec operator()(const CoulombExact&) const
    {
        const double r = norm(x);
        if (r == 0.0) {
            fail(ErrorKind::NondifferentiablePoint, "exact Coulomb potential at the origin");
        }
        return x / (r * r * r);
    }
    Vec operator()(const CoulombCutoff& m) const
    {
        const double r = norm(x);
        if (r == 0.0) {
            fail(ErrorKind::NondifferentiablePoint, "cutoff Coulomb potential has a cusp at the origin");
        }
        const double s = r + m.a;
        return x / (s * s * r);
    }
    Vec operator()(const CoulombErf& m) const
    {
        const double r = norm(x);
        const double a2 = m.alpha * m.alpha;
        const double g = 2.0 * m.c * a2 * std::exp(-a2 * r * r) + erf_part(m.mu, r).g;
        return g * x;
    }
    Vec operator()(const CoulombTanh& m) const { return tanh_part(m.mu, norm(x)).g * x; }
    Vec operator()(const FiniteWellErf& m) const
    {
        const double lo = m.nu * (x.x - m.half_width);
        const double hi = m.nu * (x.x + m.half_width);
        const double d = 0.5 * m.depth * kTwoOverSqrtPi * m.nu * (std::exp(-lo * lo) - std::exp(-hi * hi));
        return {d, 0.0};
    }
    Vec operator()(const SquareWell& m) const
    {
        if (std::abs(x.x) == m.half_width) {
            fail(ErrorKind::NondifferentiablePoint, "square well wall");
        }
        return {};
    }
};

}  // namespace

double value(const PotentialModel& model, const Vec& x) { return std::visit(ValueVisitor{x}, model); }

Vec gradient(const PotentialModel& model, const Vec& x) { return std::visit(GradientVisitor{x}, model); }

std::string_view model_name(const PotentialModel& model)
{
    static constexpr std::string_view names[] = {"harmonic",    "coulomb_exact",   "coulomb_cutoff", "coulomb_erf",
                                                 "coulomb_tanh", "finite_well_erf", "square_well"};
    return names[model.index()];
}

bool is_radial(const PotentialModel& model)
{
    return !std::holds_alternative<FiniteWellErf>(model) && !std::holds_alternative<SquareWell>(model);
}

bool is_smooth(const PotentialModel& model)
{
    return !std::holds_alternative<CoulombExact>(model) && !std::holds_alternative<CoulombCutoff>(model) &&
           !std::holds_alternative<SquareWell>(model);
}

PotentialModel with_parameter(const PotentialModel& model, std::string_view name, double v)
{
    PotentialModel out = model;
    bool hit = false;
    auto set = [&](double& field) {
        field = v;
        hit = true;
    };
    std::visit(
        [&](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CoulombCutoff>) {
                if (name == "a") set(m.a);
            } else if constexpr (std::is_same_v<T, CoulombErf>) {
                if (name == "mu") set(m.mu);
                if (name == "c") set(m.c);
                if (name == "alpha") set(m.alpha);
            } else if constexpr (std::is_same_v<T, CoulombTanh>) {
                if (name == "mu") set(m.mu);
            } else if constexpr (std::is_same_v<T, FiniteWellErf>) {
                if (name == "nu") set(m.nu);
                if (name == "depth") set(m.depth);
                if (name == "half_width") set(m.half_width);
            } else if constexpr (std::is_same_v<T, SquareWell>) {
                if (name == "depth") set(m.depth);
                if (name == "half_width") set(m.half_width);
            }
        },
        out);
    if (!hit) {
        fail(ErrorKind::ConfigError,
             "potential " + std::string(model_name(model)) + " has no parameter '" + std::string(name) + "'");
    }
    return out;
}

std::vector<AsymptoticRow> asymptotic_check(const std::function<PotentialModel(double)>& family,
                                            const PotentialModel& reference, double r_min, double r_max,
                                            std::span<const double> parameters, const AsymptoticOptions& opts)
{
    std::vector<double> xs;
    const std::size_t n = std::max<std::size_t>(opts.samples, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        const bool skip = std::any_of(opts.excluded.begin(), opts.excluded.end(),
                                      [&](double e) { return std::abs(x - e) < opts.margin; });
        if (!skip) {
            xs.push_back(x);
        }
    }
    std::vector<AsymptoticRow> rows;
    for (double p : parameters) {
        const PotentialModel m = family(p);
        double worst = 0.0;
        for (double x : xs) {
            worst = std::max(worst, std::abs(value(m, {x, 0.0}) - value(reference, {x, 0.0})));
        }
        rows.push_back({p, worst});
    }
    return rows;
}

}  // namespace miw
