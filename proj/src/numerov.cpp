#include "miw/numerov.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "miw/error.hpp"

namespace miw {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Block = std::function<MatrixXd(const MatrixXd&)>;

void check_request(const GridSpec& grid, std::size_t n_states)
{
    grid.validate();
    if (n_states == 0 || n_states >= grid.size()) {
        fail(ErrorKind::ConfigError, "requested " + std::to_string(n_states) + " states on a grid of " +
                                         std::to_string(grid.size()) + " unknowns");
    }
}

std::vector<double> sample_potential(const PotentialModel& model, const GridSpec& grid)
{
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = value(model, grid.point(k));
        if (!std::isfinite(v[k])) {
            fail(ErrorKind::ConfigError, "potential is not finite on grid point " + std::to_string(k));
        }
    }
    return v;
}

NumerovSolution package(const GridSpec& grid, const VectorXd& values, const MatrixXd& vectors, std::size_t k)
{
    NumerovSolution out;
    out.grid = grid;
    const double measure = grid.cell_measure();
    for (std::size_t i = 0; i < k; ++i) {
        VectorXd v = vectors.col(static_cast<Eigen::Index>(i));
        v /= std::sqrt(v.squaredNorm() * measure);
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (v[big] < 0.0) {
            v = -v;
        }
        out.eigenvalues.push_back(values[static_cast<Eigen::Index>(i)]);
        out.eigenvectors.emplace_back(v.data(), v.data() + v.size());
    }
    return out;
}

NumerovSolution dense_solve(const GridSpec& grid, const MatrixXd& h, std::size_t k)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        fail(ErrorKind::EigenFailure, "dense symmetric eigensolver failed");
    }
    return package(grid, es.eigenvalues(), es.eigenvectors(), k);
}

// Block subspace iteration on (H - sigma)^-1 with Rayleigh-Ritz in H. The
// start block is deterministic so repeated solves agree bitwise.
NumerovSolution shift_invert_solve(const GridSpec& grid, std::size_t k, const Block& inverse, const Block& apply_h)
{
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto p = static_cast<Eigen::Index>(std::min<std::size_t>(grid.size(), k + std::max<std::size_t>(k, 8)));
    MatrixXd x(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = std::cos(0.5 + static_cast<double>((i + 1) * (j + 1)) * 0.7390851332151607) + 1e-3 * (j == 0);
        }
    }
    constexpr int kMaxIterations = 3000;
    constexpr double kTolerance = 1e-10;
    for (int it = 0; it < kMaxIterations; ++it) {
        const MatrixXd z = inverse(x);
        Eigen::HouseholderQR<MatrixXd> qr(z);
        const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, p);
        const MatrixXd hq = apply_h(q);
        const MatrixXd t = q.transpose() * hq;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (t + t.transpose()));
        if (es.info() != Eigen::Success) {
            fail(ErrorKind::EigenFailure, "Ritz projection failed");
        }
        x = q * es.eigenvectors();
        const MatrixXd r = hq * es.eigenvectors() - x * es.eigenvalues().asDiagonal();
        bool done = true;
        for (std::size_t i = 0; i < k; ++i) {
            const auto c = static_cast<Eigen::Index>(i);
            if (r.col(c).norm() > kTolerance * std::max(1.0, std::abs(es.eigenvalues()[c]))) {
                done = false;
                break;
            }
        }
        if (done) {
            return package(grid, es.eigenvalues(), x, k);
        }
    }
    fail(ErrorKind::EigenFailure, "shift-invert iteration did not converge");
}

SpMat tridiagonal(Eigen::Index n, double off, double diag)
{
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, diag);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, off);
            t.emplace_back(i + 1, i, off);
        }
    }
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

GridSpec GridSpec::line(Interval span, std::size_t points)
{
    GridSpec g;
    g.dim = 1;
    g.axes[0] = {span, points};
    return g;
}

GridSpec GridSpec::square(Interval x, Interval y, std::size_t nx, std::size_t ny)
{
    GridSpec g;
    g.dim = 2;
    g.axes = {GridAxis{x, nx}, GridAxis{y, ny}};
    return g;
}

Vec GridSpec::point(std::size_t k) const
{
    if (dim == 1) {
        return {axes[0].at(k), 0.0};
    }
    return {axes[0].at(k / axes[1].points), axes[1].at(k % axes[1].points)};
}

double GridSpec::cell_measure() const
{
    return dim == 1 ? axes[0].spacing() : axes[0].spacing() * axes[1].spacing();
}

void GridSpec::validate() const
{
    if (dim != 1 && dim != 2) {
        fail(ErrorKind::ConfigError, "grid dimension must be 1 or 2");
    }
    for (int a = 0; a < dim; ++a) {
        const GridAxis& ax = axes[static_cast<std::size_t>(a)];
        if (ax.points < 3 || !(ax.span.lo < ax.span.hi)) {
            fail(ErrorKind::ConfigError, "grid axes need at least 3 points on a nonempty interval");
        }
    }
}

Region GridSpec::region() const { return dim == 1 ? Region(axes[0].span) : Region(axes[0].span, axes[1].span); }

NumerovSolution solve_1d(const PotentialModel& model, const GridSpec& grid, std::size_t n_states)
{
    check_request(grid, n_states);
    if (grid.dim != 1) {
        fail(ErrorKind::ConfigError, "solve_1d needs a one-dimensional grid");
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double s = grid.axes[0].spacing();
    const auto v = sample_potential(model, grid);
    const VectorXd vv = Eigen::Map<const VectorXd>(v.data(), n);

    // A and B are both polynomials in the same Toeplitz matrix, so they
    // commute and H = -1/2 B^-1 A + diag V is symmetric.
    const SpMat a = tridiagonal(n, 1.0 / (s * s), -2.0 / (s * s));
    const SpMat b = tridiagonal(n, 1.0 / 12.0, 10.0 / 12.0);
    Eigen::SimplicialLLT<SpMat> b_fact(b);
    if (b_fact.info() != Eigen::Success) {
        fail(ErrorKind::EigenFailure, "Numerov weight matrix factorization failed");
    }

    if (grid.size() <= kDenseLimit) {
        MatrixXd h = b_fact.solve(MatrixXd(-0.5 * a));
        h = 0.5 * (h + h.transpose());
        h.diagonal() += vv;
        return dense_solve(grid, h, n_states);
    }

    const double sigma = vv.minCoeff() - 1.0;
    // (H - sigma)^-1 = (K - sigma B)^-1 B with K = -1/2 A + B diag V.
    const SpMat k = SpMat(-0.5 * a) + b * SpMat(vv.asDiagonal());
    Eigen::SparseLU<SpMat> shifted;
    shifted.compute(SpMat(k - sigma * b));
    if (shifted.info() != Eigen::Success) {
        fail(ErrorKind::EigenFailure, "shifted Numerov factorization failed");
    }
    const Block inverse = [&](const MatrixXd& x) -> MatrixXd { return shifted.solve(MatrixXd(b * x)); };
    const Block apply_h = [&](const MatrixXd& x) -> MatrixXd {
        return b_fact.solve(MatrixXd(-0.5 * (a * x))) + vv.asDiagonal() * x;
    };
    return shift_invert_solve(grid, n_states, inverse, apply_h);
}

NumerovSolution solve_2d(const PotentialModel& model, const GridSpec& grid, std::size_t n_states)
{
    check_request(grid, n_states);
    if (grid.dim != 2) {
        fail(ErrorKind::ConfigError, "solve_2d needs a two-dimensional grid");
    }
    const auto nx = static_cast<Eigen::Index>(grid.axes[0].points);
    const auto ny = static_cast<Eigen::Index>(grid.axes[1].points);
    const double sx = grid.axes[0].spacing();
    const double sy = grid.axes[1].spacing();
    const auto v = sample_potential(model, grid);

    std::vector<Eigen::Triplet<double>> t;
    const double cx = 0.5 / (sx * sx);
    const double cy = 0.5 / (sy * sy);
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index j = 0; j < ny; ++j) {
            const Eigen::Index k = i * ny + j;
            t.emplace_back(k, k, 2.0 * cx + 2.0 * cy + v[static_cast<std::size_t>(k)]);
            if (i + 1 < nx) {
                t.emplace_back(k, k + ny, -cx);
                t.emplace_back(k + ny, k, -cx);
            }
            if (j + 1 < ny) {
                t.emplace_back(k, k + 1, -cy);
                t.emplace_back(k + 1, k, -cy);
            }
        }
    }
    const Eigen::Index n = nx * ny;
    SpMat h(n, n);
    h.setFromTriplets(t.begin(), t.end());

    if (grid.size() <= kDenseLimit) {
        return dense_solve(grid, MatrixXd(h), n_states);
    }
    const double sigma = *std::min_element(v.begin(), v.end()) - 1.0;
    SpMat shifted = h;
    shifted.diagonal().array() -= sigma;
    Eigen::SimplicialLLT<SpMat> fact(shifted);
    if (fact.info() != Eigen::Success) {
        fail(ErrorKind::EigenFailure, "shifted Laplacian factorization failed");
    }
    const Block inverse = [&](const MatrixXd& x) -> MatrixXd { return fact.solve(x); };
    const Block apply_h = [&](const MatrixXd& x) -> MatrixXd { return h * x; };
    return shift_invert_solve(grid, n_states, inverse, apply_h);
}

NumerovSolution solve(const PotentialModel& model, const GridSpec& grid, std::size_t n_states)
{
    return grid.dim == 1 ? solve_1d(model, grid, n_states) : solve_2d(model, grid, n_states);
}

std::vector<double> density_from_state(const NumerovSolution& solution, std::size_t state_index)
{
    if (state_index >= solution.eigenvectors.size()) {
        fail(ErrorKind::IndexOutOfRange, "state " + std::to_string(state_index) + " not in solution with " +
                                             std::to_string(solution.eigenvectors.size()) + " states");
    }
    const auto& psi = solution.eigenvectors[state_index];
    std::vector<double> d(psi.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        d[i] = psi[i] * psi[i];
        mass += d[i];
    }
    mass *= solution.grid.cell_measure();
    for (double& x : d) {
        x /= mass;
    }
    return d;
}

}  // namespace miw
