#include "miw/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "miw/error.hpp"

namespace miw {

std::string_view to_string(KernelFamily family)
{
    switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Epanechnikov: return "epanechnikov";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name)
{
    if (name == "gaussian") {
        return KernelFamily::Gaussian;
    }
    if (name == "exponential") {
        return KernelFamily::Exponential;
    }
    if (name == "epanechnikov") {
        return KernelFamily::Epanechnikov;
    }
    fail(ErrorKind::ConfigError, "unknown kernel '" + std::string(name) + "'");
}

Kernel::Kernel(KernelFamily family, int dim) : family_(family), dim_(dim)
{
    if (dim != 1 && dim != 2) {
        fail(ErrorKind::ConfigError, "kernel dimension must be 1 or 2");
    }
    using std::numbers::pi;
    switch (family) {
    case KernelFamily::Gaussian:
        norm_ = dim == 1 ? 1.0 / std::sqrt(2.0 * pi) : 1.0 / (2.0 * pi);
        break;
    case KernelFamily::Exponential:
        // 1D: integral of exp(-sqrt(1+u^2)) is 2 K_1(1); 2D: 2 pi * 2/e.
        norm_ = dim == 1 ? 1.0 / (2.0 * std::cyl_bessel_k(1.0, 1.0)) : std::numbers::e / (4.0 * pi);
        break;
    case KernelFamily::Epanechnikov:
        norm_ = dim == 1 ? 0.75 : 2.0 / pi;
        break;
    }
}

Profile Kernel::profile(double t) const
{
    switch (family_) {
    case KernelFamily::Gaussian: {
        const double v = norm_ * std::exp(-t);
        return {v, -v, v, -v};
    }
    case KernelFamily::Exponential: {
        const double w = std::sqrt(1.0 + 2.0 * t);
        const double v = norm_ * std::exp(-w);
        const double iw = 1.0 / w;
        const double iw2 = iw * iw;
        const double iw3 = iw2 * iw;
        return {v, -v * iw, v * (iw2 + iw3), -v * (iw3 + 3.0 * iw2 * iw2 + 3.0 * iw3 * iw2)};
    }
    case KernelFamily::Epanechnikov:
        if (t >= 0.5) {
            return {};
        }
        return {norm_ * (1.0 - 2.0 * t), -2.0 * norm_, 0.0, 0.0};
    }
    return {};
}

double Kernel::support_radius() const
{
    return family_ == KernelFamily::Epanechnikov ? 1.0 : std::numeric_limits<double>::infinity();
}

}  // namespace miw
