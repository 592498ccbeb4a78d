#pragma once

#include <string_view>

#include "miw/vec.hpp"

namespace miw {

enum class KernelFamily { Gaussian, Exponential, Epanechnikov };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Radial profile and its first three derivatives with respect to t = |u|^2 / 2.
struct Profile {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

/// Normalized, radially symmetric kernel in one or two dimensions.
///
/// Gaussian is the unit-variance normal density. Exponential is the
/// origin-smoothed form exp(-sqrt(1 + |u|^2)), which keeps the Laplace tail
/// while staying infinitely differentiable at u = 0. Epanechnikov is
/// 1 - |u|^2 on the unit ball; it is not differentiable on the support edge.
class Kernel {
public:
    Kernel() = default;
    Kernel(KernelFamily family, int dim);

    KernelFamily family() const { return family_; }
    int dimension() const { return dim_; }

    double operator()(const Vec& u) const { return profile(0.5 * norm2(u)).value; }
    double at_origin() const { return profile(0.0).value; }
    Profile profile(double t) const;

    /// True when third derivatives exist everywhere (required for the quantum force).
    bool smooth() const { return family_ != KernelFamily::Epanechnikov; }

    /// Support radius in |u|; infinity for unbounded kernels.
    double support_radius() const;

private:
    KernelFamily family_ = KernelFamily::Gaussian;
    int dim_ = 1;
    double norm_ = 0.0;
};

}  // namespace miw
