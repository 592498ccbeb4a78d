#include <doctest.h>

#include <cmath>
#include <random>

#include "miw/quantum.hpp"
#include "support.hpp"

using namespace miw;

namespace {

WorldEnsemble free_ensemble(std::vector<Vec> x, std::vector<double> h, int dim)
{
    WorldEnsemble e;
    e.dim = dim;
    e.positions = std::move(x);
    e.bandwidths = std::move(h);
    e.velocities.assign(e.positions.size(), Vec{});
    e.roles.assign(e.positions.size(), WorldRole::Free);
    e.signs.assign(e.positions.size(), 1);
    return e;
}

WorldEnsemble random_ensemble(std::mt19937_64& rng, std::size_t n, int dim)
{
    std::uniform_real_distribution<double> hu(0.4, 1.0);
    std::vector<double> h;
    for (std::size_t i = 0; i < n; ++i) {
        h.push_back(hu(rng));
    }
    return free_ensemble(testing::random_points(rng, n, dim, -1.5, 1.5, 0.05), h, dim);
}

}  // namespace

TEST_CASE("lone gaussian world")
{
    for (int dim : {1, 2}) {
        const Kernel k(KernelFamily::Gaussian, dim);
        for (double h : {0.5, 1.0, 1.7}) {
            const auto e = free_ensemble({{0.3, -0.2 * (dim - 1)}}, {h}, dim);
            const QuantumPoint qp = quantum_at(e.density(k), e.positions[0]);
            // 1D: Q = 1/(4h^2); in d dimensions the Laplacian picks up d of those.
            CHECK(qp.q == doctest::Approx(dim / (4.0 * h * h)).epsilon(1e-14));
            CHECK(qp.grad_q == Vec{});
            CHECK(quantum_force(e, k)[0] == Vec{});
            CHECK(interworld_energy(e, k) == 0.0);
        }
    }
}

TEST_CASE("flat density gives no quantum potential")
{
    // Far inside a dense uniform 1D comb with wide kernels the estimate is flat.
    const Kernel k(KernelFamily::Gaussian, 1);
    std::vector<Vec> x;
    for (int i = -400; i <= 400; ++i) {
        x.push_back({0.05 * i, 0.0});
    }
    const auto e = free_ensemble(x, std::vector<double>(x.size(), 1.0), 1);
    const QuantumPoint qp = quantum_at(e.density(k), Vec{});
    CHECK(std::abs(qp.q) < 1e-12);
    CHECK(std::abs(qp.grad_q.x) < 1e-12);
}

TEST_CASE("mirror pairs get opposite forces and equal potentials")
{
    const Kernel k(KernelFamily::Gaussian, 1);
    const auto two = free_ensemble({{-0.6, 0.0}, {0.6, 0.0}}, {0.5, 0.5}, 1);
    const auto f = quantum_force(two, k);
    CHECK(f[0].x == doctest::Approx(-f[1].x).epsilon(1e-14));
    CHECK(f[0].x != 0.0);

    const auto five = free_ensemble({{-2.0, 0.0}, {-0.7, 0.0}, {0.0, 0.0}, {0.7, 0.0}, {2.0, 0.0}},
                                    {0.9, 0.6, 0.5, 0.6, 0.9}, 1);
    const auto q = quantum_potential(five, k);
    CHECK(q[0] == doctest::Approx(q[4]).epsilon(1e-13));
    CHECK(q[1] == doctest::Approx(q[3]).epsilon(1e-13));
}

TEST_CASE("energy estimators")
{
    const Kernel k(KernelFamily::Gaussian, 1);
    std::mt19937_64 rng(23);
    const auto e = random_ensemble(rng, 6, 1);
    const Evaluation ev = evaluate(e, k, Harmonic{});
    double v = 0.0;
    double vq = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(ev.energy.potential[i] == doctest::Approx(0.5 * norm2(e.positions[i])));
        CHECK(ev.forces.classical[i] == -e.positions[i]);
        v += ev.energy.potential[i];
        vq += ev.energy.potential[i] + ev.forces.q[i];
    }
    CHECK(ev.energy.eq3_mean == doctest::Approx(vq / 6.0).epsilon(1e-14));
    CHECK(ev.energy.eq1_sum == doctest::Approx((v + ev.energy.interworld) / 6.0).epsilon(1e-14));

    // U_N summed directly from the estimate.
    const auto sum = e.density(k);
    double u = 0.0;
    for (const Vec& x : e.positions) {
        const auto est = sum.estimate(x);
        u += norm2(est.gradient) / (8.0 * est.density * est.density);
    }
    CHECK(ev.energy.interworld == doctest::Approx(u).epsilon(1e-13));

    // Results do not depend on the thread count.
    const Evaluation par = evaluate(e, k, Harmonic{}, 4);
    CHECK(par.energy.eq3_mean == ev.energy.eq3_mean);
    CHECK(par.energy.interworld == ev.energy.interworld);
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(par.forces.quantum[i] == ev.forces.quantum[i]);
    }
}

TEST_CASE("zero potential with a flat estimate has zero energy")
{
    const Kernel k(KernelFamily::Gaussian, 1);
    std::vector<Vec> x;
    for (int i = -400; i <= 400; ++i) {
        x.push_back({0.05 * i, 0.0});
    }
    const auto e = free_ensemble(x, std::vector<double>(x.size(), 1.0), 1);
    const QuantumPoint qp = quantum_at(e.density(k), Vec{});
    CHECK(value(FiniteWellErf{0.0, 1.0, 2.0}, Vec{}) + qp.q == doctest::Approx(0.0));
}

TEST_CASE("quantum evaluation failures")
{
    const auto e = free_ensemble({{0.0, 0.0}, {1.0, 0.0}}, {0.1, 0.1}, 1);
    CHECK_FAILS_WITH(quantum_at(e.density(Kernel(KernelFamily::Gaussian, 1)), Vec{40.0, 0.0}),
                     ErrorKind::DensityUnderflow);
    CHECK_FAILS_WITH(evaluate(e, Kernel(KernelFamily::Epanechnikov, 1), Harmonic{}), ErrorKind::KernelNotSmooth);
}

TEST_SUITE("properties")
{
    TEST_CASE("quantum force is minus the gradient of Q")
    {
        std::mt19937_64 rng(29);
        const double eps = 1e-5;
        for (auto fam : {KernelFamily::Gaussian, KernelFamily::Exponential}) {
            for (int dim : {1, 2}) {
                const Kernel k(fam, dim);
                for (int trial = 0; trial < 10; ++trial) {
                    const auto e = random_ensemble(rng, 5, dim);
                    const auto sum = e.density(k);
                    const auto f = quantum_force(e, k);
                    for (std::size_t i = 0; i < e.size(); ++i) {
                        const Vec x = e.positions[i];
                        const double dx = (quantum_at(sum, x + Vec{eps, 0.0}).q - quantum_at(sum, x - Vec{eps, 0.0}).q) /
                                          (2 * eps);
                        const double scale = std::max(norm(f[i]), 1e-3);
                        CHECK(std::abs(-f[i].x - dx) / scale < 1e-5);
                        if (dim == 2) {
                            const double dy =
                                (quantum_at(sum, x + Vec{0.0, eps}).q - quantum_at(sum, x - Vec{0.0, eps}).q) /
                                (2 * eps);
                            CHECK(std::abs(-f[i].y - dy) / scale < 1e-5);
                        }
                    }
                }
            }
        }
    }

    TEST_CASE("Q is translation invariant and scales as the inverse square")
    {
        std::mt19937_64 rng(31);
        const Kernel k(KernelFamily::Gaussian, 2);
        for (int trial = 0; trial < 20; ++trial) {
            const auto e = random_ensemble(rng, 6, 2);
            const Vec q{0.2, -0.3};
            const QuantumPoint base = quantum_at(e.density(k), q);

            auto moved = e;
            const Vec shift{1.7, -0.4};
            for (Vec& p : moved.positions) {
                p += shift;
            }
            const QuantumPoint t = quantum_at(moved.density(k), q + shift);
            CHECK(std::abs(t.q - base.q) <= 1e-10 * std::max(1.0, std::abs(base.q)));
            CHECK(norm(t.grad_q - base.grad_q) <= 1e-10 * std::max(1.0, norm(base.grad_q)));

            const double lambda = 1.9;
            auto scaled = e;
            for (Vec& p : scaled.positions) {
                p *= lambda;
            }
            for (double& h : scaled.bandwidths) {
                h *= lambda;
            }
            const QuantumPoint s = quantum_at(scaled.density(k), lambda * q);
            CHECK(std::abs(s.q * lambda * lambda - base.q) <= 1e-10 * std::max(1.0, std::abs(base.q)));
        }
    }

    TEST_CASE("interworld energy is nonnegative")
    {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 100; ++trial) {
            const int dim = 1 + trial % 2;
            const auto e = random_ensemble(rng, 3 + trial % 7, dim);
            CHECK(interworld_energy(e, Kernel(KernelFamily::Gaussian, dim)) >= 0.0);
        }
    }
}
