#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "miw/kernel.hpp"
#include "miw/vec.hpp"

namespace miw {

enum class WorldRole { Free, FixedBoundary, Node, NodeDomain };

/// Density, gradient and Laplacian of the estimate at one query point.
struct KernelEstimate {
    double density = 0.0;
    Vec gradient;
    double laplacian = 0.0;
};

/// Derivatives up to third order, as needed by the quantum force.
struct DensityJet {
    double density = 0.0;
    Vec gradient;
    Sym2 hessian;
    Vec grad_laplacian;

    double laplacian() const { return hessian.trace(); }
};

/// Bounds on the multiplicative change of a single bandwidth recursion step.
inline constexpr double kRatioFloor = 1e-6;
inline constexpr double kRatioCeil = 1e6;

/// Sample-point adaptive kernel estimator
///   P(q) = (1/N) sum_n s_n h_n^-d K((q - x_n) / h_n)
/// over borrowed world data. Worlds with infinite bandwidth contribute exactly
/// zero but still count towards N.
class KernelSum {
public:
    KernelSum(const Kernel& kernel, std::span<const Vec> centers, std::span<const double> bandwidths,
              std::span<const int> signs);

    std::size_t size() const { return centers_.size(); }
    const Kernel& kernel() const { return kernel_; }
    std::span<const Vec> centers() const { return centers_; }
    std::span<const double> bandwidths() const { return bandwidths_; }
    std::span<const int> signs() const { return signs_; }

    double density(const Vec& q) const;
    KernelEstimate estimate(const Vec& q) const;
    DensityJet jet(const Vec& q) const;

    /// Unsigned sum_i h_i^-d K((q - x_i) / h_i) over a subset of worlds (no 1/N).
    double partial_sum(const Vec& q, std::span<const std::size_t> indices) const;

private:
    Kernel kernel_;
    std::span<const Vec> centers_;
    std::span<const double> bandwidths_;
    std::span<const int> signs_;
};

KernelEstimate estimate(const Vec& query, std::span<const Vec> positions, std::span<const double> bandwidths,
                        std::span<const int> signs, const Kernel& kernel);

/// h* = constant * N^(-1/(d+4)), the MSE-optimal rate for a second-order kernel.
double optimal_bandwidth_scale(std::size_t n_worlds, int dim, double constant = 1.0);

/// h_n = h* / P(x_n). Node and fixed-boundary worlds (when roles are given)
/// are skipped and receive infinity.
std::vector<double> initial_bandwidths(std::span<const Vec> positions,
                                       const std::function<double(const Vec&)>& target_density,
                                       const Kernel& kernel, double constant = 1.0,
                                       std::span<const WorldRole> roles = {});

/// One Jacobi sweep of h_n <- h_n * (P_N(x_n) / (m P~(x_n)))^e on free worlds.
/// The plain recursion has m = 1 and e = 1.
std::vector<double> recurse_bandwidth(const KernelSum& sum, std::span<const double> priori,
                                      std::span<const WorldRole> roles, double mass_scale = 1.0,
                                      double exponent = 1.0);

/// Node recursion: h_n <- h_n * S_nodes(x_n) / S_domain(x_n), with S the
/// unsigned kernel sums h_i^-d K((x_n - x_i)/h_i). By default the updated
/// node's own kernel is left out of S_nodes; with include_self it is kept,
/// which makes the map contractive in h_n whenever S_domain exceeds the other
/// nodes' sum. Nodes with infinite bandwidth are held.
std::vector<double> recurse_node_bandwidth(const KernelSum& sum, std::span<const std::size_t> node_indices,
                                           std::span<const std::size_t> domain_indices,
                                           bool include_self = false);

/// Node-domain recursion: h_n <- K(0) / (P~(x_n) - P_N(x_n) + K(0)/h_n).
std::vector<double> recurse_node_domain_bandwidth(const KernelSum& sum, std::span<const double> priori,
                                                  std::span<const WorldRole> roles);

/// Largest |h_new/h_old - 1| over worlds whose bandwidth is finite in both.
double max_relative_change(std::span<const double> before, std::span<const double> after);

}  // namespace miw
