#include "miw/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "miw/error.hpp"

namespace miw {

namespace {

double clamp_ratio(double r)
{
    if (std::isnan(r)) {
        return 1.0;
    }
    return std::clamp(r, kRatioFloor, kRatioCeil);
}

}  // namespace

KernelSum::KernelSum(const Kernel& kernel, std::span<const Vec> centers, std::span<const double> bandwidths,
                     std::span<const int> signs)
    : kernel_(kernel), centers_(centers), bandwidths_(bandwidths), signs_(signs)
{
    if (centers.empty()) {
        fail(ErrorKind::EmptyEnsemble, "kernel estimate needs at least one world");
    }
    if (bandwidths.size() != centers.size() || signs.size() != centers.size()) {
        fail(ErrorKind::ConfigError, "positions, bandwidths and signs differ in length");
    }
    for (double h : bandwidths) {
        if (!(h > 0.0)) {
            fail(ErrorKind::ConfigError, "bandwidths must be positive");
        }
    }
}

double KernelSum::density(const Vec& q) const
{
    const int d = kernel_.dimension();
    double sum = 0.0;
    for (std::size_t n = 0; n < centers_.size(); ++n) {
        const double h = bandwidths_[n];
        if (std::isinf(h)) {
            continue;
        }
        const Vec u = (q - centers_[n]) / h;
        const double hd = d == 1 ? h : h * h;
        sum += signs_[n] * kernel_(u) / hd;
    }
    return sum / static_cast<double>(centers_.size());
}

KernelEstimate KernelSum::estimate(const Vec& q) const
{
    const DensityJet j = jet(q);
    return {j.density, j.gradient, j.laplacian()};
}

DensityJet KernelSum::jet(const Vec& q) const
{
    const int d = kernel_.dimension();
    const bool planar = d == 2;
    DensityJet out;
    for (std::size_t n = 0; n < centers_.size(); ++n) {
        const double h = bandwidths_[n];
        if (std::isinf(h)) {
            continue;
        }
        const Vec u = (q - centers_[n]) / h;
        const double uu = norm2(u);
        const Profile p = kernel_.profile(0.5 * uu);
        const double hd = planar ? h * h : h;
        const double w = signs_[n] / hd;
        const double ih = 1.0 / h;
        const double ih2 = ih * ih;

        out.density += w * p.value;
        out.gradient += (w * p.d1 * ih) * u;

        Sym2 hess{p.d2 * u.x * u.x + p.d1, p.d2 * u.x * u.y, planar ? p.d2 * u.y * u.y + p.d1 : 0.0};
        const double hw = w * ih2;
        out.hessian += Sym2{hw * hess.xx, hw * hess.xy, hw * hess.yy};

        const double gl = w * ih2 * ih * (p.d3 * uu + (d + 2) * p.d2);
        out.grad_laplacian += gl * u;
    }
    const double inv_n = 1.0 / static_cast<double>(centers_.size());
    out.density *= inv_n;
    out.gradient *= inv_n;
    out.hessian = Sym2{out.hessian.xx * inv_n, out.hessian.xy * inv_n, out.hessian.yy * inv_n};
    out.grad_laplacian *= inv_n;
    return out;
}

double KernelSum::partial_sum(const Vec& q, std::span<const std::size_t> indices) const
{
    const int d = kernel_.dimension();
    double sum = 0.0;
    for (std::size_t i : indices) {
        const double h = bandwidths_[i];
        if (std::isinf(h)) {
            continue;
        }
        const double hd = d == 1 ? h : h * h;
        sum += kernel_((q - centers_[i]) / h) / hd;
    }
    return sum;
}

KernelEstimate estimate(const Vec& query, std::span<const Vec> positions, std::span<const double> bandwidths,
                        std::span<const int> signs, const Kernel& kernel)
{
    return KernelSum(kernel, positions, bandwidths, signs).estimate(query);
}

double optimal_bandwidth_scale(std::size_t n_worlds, int dim, double constant)
{
    return constant * std::pow(static_cast<double>(n_worlds), -1.0 / (dim + 4.0));
}

std::vector<double> initial_bandwidths(std::span<const Vec> positions,
                                       const std::function<double(const Vec&)>& target_density,
                                       const Kernel& kernel, double constant, std::span<const WorldRole> roles)
{
    const double h_star = optimal_bandwidth_scale(positions.size(), kernel.dimension(), constant);
    std::vector<double> out(positions.size(), std::numeric_limits<double>::infinity());
    for (std::size_t n = 0; n < positions.size(); ++n) {
        const WorldRole role = roles.empty() ? WorldRole::Free : roles[n];
        if (role == WorldRole::FixedBoundary || role == WorldRole::Node) {
            continue;
        }
        const double p = target_density(positions[n]);
        if (!(p > 0.0)) {
            fail(ErrorKind::NonpositiveDensity, "target density vanishes at world " + std::to_string(n));
        }
        out[n] = h_star / p;
    }
    return out;
}

std::vector<double> recurse_bandwidth(const KernelSum& sum, std::span<const double> priori,
                                      std::span<const WorldRole> roles, double mass_scale, double exponent)
{
    const auto centers = sum.centers();
    std::vector<double> out(sum.bandwidths().begin(), sum.bandwidths().end());
    for (std::size_t n = 0; n < centers.size(); ++n) {
        if (roles[n] != WorldRole::Free || std::isinf(out[n])) {
            continue;
        }
        const double ratio = clamp_ratio(sum.density(centers[n]) / (mass_scale * priori[n]));
        out[n] *= exponent == 1.0 ? ratio : std::pow(ratio, exponent);
    }
    return out;
}

std::vector<double> recurse_node_bandwidth(const KernelSum& sum, std::span<const std::size_t> node_indices,
                                           std::span<const std::size_t> domain_indices, bool include_self)
{
    if (node_indices.empty() || domain_indices.empty()) {
        fail(ErrorKind::ConfigError, "node recursion needs nonempty node and node-domain sets");
    }
    const auto centers = sum.centers();
    std::vector<double> out(sum.bandwidths().begin(), sum.bandwidths().end());
    std::vector<std::size_t> others;
    others.reserve(node_indices.size());
    for (std::size_t n : node_indices) {
        if (std::isinf(out[n])) {
            continue;
        }
        others.clear();
        std::copy_if(node_indices.begin(), node_indices.end(), std::back_inserter(others),
                     [n, include_self](std::size_t i) { return include_self || i != n; });
        const double num = sum.partial_sum(centers[n], others);
        const double den = sum.partial_sum(centers[n], domain_indices);
        if (!(den > 0.0)) {
            fail(ErrorKind::ZeroDenominator, "node domain kernel sum vanishes at node " + std::to_string(n));
        }
        out[n] *= clamp_ratio(num / den);
    }
    return out;
}

std::vector<double> recurse_node_domain_bandwidth(const KernelSum& sum, std::span<const double> priori,
                                                  std::span<const WorldRole> roles)
{
    const auto centers = sum.centers();
    const double k0 = sum.kernel().at_origin();
    std::vector<double> out(sum.bandwidths().begin(), sum.bandwidths().end());
    for (std::size_t n = 0; n < centers.size(); ++n) {
        if (roles[n] != WorldRole::NodeDomain || std::isinf(out[n])) {
            continue;
        }
        const double h = out[n];
        const double den = priori[n] - sum.density(centers[n]) + k0 / h;
        if (!(den > 0.0)) {
            fail(ErrorKind::NonpositiveDenominator,
                 "estimate overshoots the priori density at node-domain world " + std::to_string(n));
        }
        out[n] = h * clamp_ratio(k0 / den / h);
    }
    return out;
}

double max_relative_change(std::span<const double> before, std::span<const double> after)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < before.size(); ++n) {
        if (std::isinf(before[n]) || std::isinf(after[n])) {
            continue;
        }
        worst = std::max(worst, std::abs(after[n] / before[n] - 1.0));
    }
    return worst;
}

}  // namespace miw
