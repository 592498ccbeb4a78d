#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "miw/vec.hpp"

namespace miw {

/// V = r^2 / 2.
struct Harmonic {
    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// V = -1/r, singular at the origin.
struct CoulombExact {
    friend bool operator==(const CoulombExact&, const CoulombExact&) = default;
};

/// V = -1/(r + a).
struct CoulombCutoff {
    double a = 1.0;
    friend bool operator==(const CoulombCutoff&, const CoulombCutoff&) = default;
};

/// V = -c exp(-alpha^2 r^2) - erf(mu r) / r. The pure error-function form has c = 0.
struct CoulombErf {
    double mu = 1.0;
    double c = 0.0;
    double alpha = 1.0;
    friend bool operator==(const CoulombErf&, const CoulombErf&) = default;
};

/// V = -tanh(mu r) / r.
struct CoulombTanh {
    double mu = 1.0;
    friend bool operator==(const CoulombTanh&, const CoulombTanh&) = default;
};

/// Smoothed finite well in the first coordinate:
/// V = (L/2) [erf(nu (x - a)) - erf(nu (x + a)) + 2], depth L, half width a.
struct FiniteWellErf {
    double depth = 2.0;
    double half_width = 1.0;
    double nu = 2.0;
    friend bool operator==(const FiniteWellErf&, const FiniteWellErf&) = default;
};

/// Sharp well, the nu -> infinity limit of FiniteWellErf. Reference only.
struct SquareWell {
    double depth = 2.0;
    double half_width = 1.0;
    friend bool operator==(const SquareWell&, const SquareWell&) = default;
};

using PotentialModel =
    std::variant<Harmonic, CoulombExact, CoulombCutoff, CoulombErf, CoulombTanh, FiniteWellErf, SquareWell>;

double value(const PotentialModel& model, const Vec& x);
Vec gradient(const PotentialModel& model, const Vec& x);

std::string_view model_name(const PotentialModel& model);

/// True when V depends on x only through |x|.
bool is_radial(const PotentialModel& model);

/// True when V is continuously differentiable everywhere.
bool is_smooth(const PotentialModel& model);

/// Copy of `model` with the named smoothing parameter ("mu", "nu", "a", "c",
/// "alpha", "depth", "half_width") replaced. Unknown names raise ConfigError.
PotentialModel with_parameter(const PotentialModel& model, std::string_view name, double v);

struct AsymptoticRow {
    double parameter = 0.0;
    double max_deviation = 0.0;
};

struct AsymptoticOptions {
    std::size_t samples = 2001;
    /// Sample points closer than `margin` to any of these are skipped
    /// (the walls of a sharp well, where no smooth model converges uniformly).
    std::vector<double> excluded;
    double margin = 0.0;
};

/// For each parameter p, sup over x in [r_min, r_max] (first axis) of
/// |V_p(x) - V_ref(x)|.
std::vector<AsymptoticRow> asymptotic_check(const std::function<PotentialModel(double)>& family,
                                            const PotentialModel& reference, double r_min, double r_max,
                                            std::span<const double> parameters, const AsymptoticOptions& opts = {});

}  // namespace miw
