#include "miw/quantum.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>

#include "miw/error.hpp"

namespace miw {

namespace {

void require_smooth(const Kernel& kernel)
{
    if (!kernel.smooth()) {
        fail(ErrorKind::KernelNotSmooth,
             std::string(to_string(kernel.family())) + " kernel lacks the derivatives the quantum force needs");
    }
}

// Runs body(n) for every index, split into contiguous chunks. Each index is
// written by exactly one worker so the output is independent of `threads`.
template <class F>
void for_each_index(std::span<const std::size_t> idx, unsigned threads, F&& body)
{
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(idx.size(), 1)));
    if (threads == 1) {
        for (std::size_t n : idx) {
            body(n);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (idx.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const std::size_t lo = t * chunk;
                    const std::size_t hi = std::min(idx.size(), lo + chunk);
                    for (std::size_t i = lo; i < hi; ++i) {
                        body(idx[i]);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace

QuantumPoint quantum_at(const KernelSum& sum, const Vec& q)
{
    QuantumPoint out;
    out.jet = sum.jet(q);
    const DensityJet& j = out.jet;
    const double p = j.density;
    if (!(p > kDensityFloor)) {
        fail(ErrorKind::DensityUnderflow, "estimated density " + std::to_string(p) + " below floor");
    }
    const double lap = j.laplacian();
    const double g2 = norm2(j.gradient);
    const double ip = 1.0 / p;
    out.q = -0.25 * lap * ip + 0.125 * g2 * ip * ip;
    out.grad_q = (-0.25 * ip) * j.grad_laplacian + (0.25 * lap * ip * ip) * j.gradient +
                 (0.25 * ip * ip) * (j.hessian * j.gradient) - (0.25 * g2 * ip * ip * ip) * j.gradient;
    return out;
}

Evaluation evaluate(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model, unsigned threads,
                    std::span<const std::size_t> subset)
{
    require_smooth(kernel);
    const std::size_t n = ens.size();
    const KernelSum sum = ens.density(kernel);

    std::vector<std::size_t> work;
    if (subset.empty()) {
        work = ens.active_indices();
        const auto nodes = ens.indices_of(WorldRole::Node);
        work.insert(work.end(), nodes.begin(), nodes.end());
    } else {
        work.assign(subset.begin(), subset.end());
    }

    // Positive-only view for node worlds.
    std::vector<double> positive_h = ens.bandwidths;
    for (std::size_t i = 0; i < n; ++i) {
        if (ens.signs[i] < 0) {
            positive_h[i] = std::numeric_limits<double>::infinity();
        }
    }
    const KernelSum positive(kernel, ens.positions, positive_h, ens.signs);

    Evaluation ev;
    ev.forces.classical.assign(n, Vec{});
    ev.forces.quantum.assign(n, Vec{});
    ev.forces.q.assign(n, 0.0);
    ev.energy.potential.resize(n);
    ev.energy.quantum.assign(n, 0.0);
    ev.interworld_terms.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        ev.energy.potential[i] = value(model, ens.positions[i]);
    }
    for_each_index(work, threads, [&](std::size_t i) {
        if (ens.roles[i] == WorldRole::FixedBoundary) {
            return;
        }
        const bool node = ens.roles[i] == WorldRole::Node;
        QuantumPoint qp;
        try {
            qp = quantum_at(node ? positive : sum, ens.positions[i]);
        } catch (const Error& e) {
            fail(e.kind(), std::string(e.what()) + " at world " + std::to_string(i));
        }
        ev.forces.classical[i] = -gradient(model, ens.positions[i]);
        ev.forces.quantum[i] = -qp.grad_q;
        if (node) {
            return;
        }
        ev.forces.q[i] = qp.q;
        ev.energy.quantum[i] = qp.q;
        const double p = qp.jet.density;
        ev.interworld_terms[i] = 0.125 * norm2(qp.jet.gradient) / (p * p);
    });
    finalize(ev, ens);
    return ev;
}

void finalize(Evaluation& ev, const WorldEnsemble& ens)
{
    // Reductions in index order keep the sums independent of the thread count.
    const std::vector<std::size_t> active = ens.active_indices();
    double v_sum = 0.0;
    double vq_sum = 0.0;
    ev.energy.interworld = 0.0;
    ev.max_force = 0.0;
    for (std::size_t i : active) {
        v_sum += ev.energy.potential[i];
        vq_sum += ev.energy.potential[i] + ev.energy.quantum[i];
        ev.energy.interworld += ev.interworld_terms[i];
        ev.max_force = std::max(ev.max_force, norm(ev.forces.total(i)));
    }
    const double m = active.empty() ? 1.0 : static_cast<double>(active.size());
    ev.energy.eq1_sum = (v_sum + ev.energy.interworld) / m;
    ev.energy.eq3_mean = vq_sum / m;
}

std::vector<double> quantum_potential(const WorldEnsemble& ens, const Kernel& kernel)
{
    return evaluate(ens, kernel, Harmonic{}).forces.q;
}

std::vector<Vec> quantum_force(const WorldEnsemble& ens, const Kernel& kernel)
{
    return evaluate(ens, kernel, Harmonic{}).forces.quantum;
}

double interworld_energy(const WorldEnsemble& ens, const Kernel& kernel)
{
    return evaluate(ens, kernel, Harmonic{}).energy.interworld;
}

EnergyReport total_energy(const WorldEnsemble& ens, const Kernel& kernel, const PotentialModel& model)
{
    return evaluate(ens, kernel, model).energy;
}

}  // namespace miw
