#include "miw/harness.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "miw/error.hpp"
#include "miw/io.hpp"
#include "miw/symmetry.hpp"

namespace miw {

namespace fs = std::filesystem;

RunRecord execute_run(const RunConfig& config)
{
    config.validate();
    const Kernel kernel = config.make_kernel();
    RunRecord rec;
    WorldEnsemble initial;
    SymmetryPlan plan;
    try {
        initial = make_initial(config.region, config.layout, config.boundary, config.nodes, kernel);
        if (config.symmetry != Symmetry::None) {
            plan = exploit_symmetry(initial, config.potential, config.symmetry);
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidLayout || e.kind() == ErrorKind::SymmetryViolation) {
            fail(ErrorKind::ConfigError, e.what());
        }
        throw;
    }
    RelaxOptions opts;
    if (config.symmetry != Symmetry::None) {
        opts.symmetry = &plan;
    }
    return relax(initial, kernel, config.potential, config.region, config.schedule, opts);
}

NumerovSolution execute_numerov(const RunConfig& config)
{
    return solve(config.potential, config.numerov.grid(config.region), config.numerov.states);
}

std::vector<double> sampled_density(const WorldEnsemble& ens, const Kernel& kernel, const GridSpec& grid)
{
    const KernelSum sum = ens.density(kernel);
    std::vector<double> p(grid.size());
    double mass = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        p[k] = sum.density(grid.point(k));
        mass += p[k];
    }
    mass *= grid.cell_measure();
    if (mass > 0.0) {
        for (double& v : p) {
            v /= mass;
        }
    }
    return p;
}

DensityDiscrepancy compare_density(const WorldEnsemble& ens, const Kernel& kernel, const NumerovSolution& sol,
                                   std::size_t state)
{
    const auto ref = density_from_state(sol, state);
    const auto est = sampled_density(ens, kernel, sol.grid);
    DensityDiscrepancy d;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        const double diff = std::abs(est[k] - ref[k]);
        d.l1 += diff;
        d.sup = std::max(d.sup, diff);
    }
    d.l1 *= sol.grid.cell_measure();
    return d;
}

ComparisonRow compare(const RunConfig& config, const RunRecord& record, const NumerovSolution& sol)
{
    if (!(sol.grid == config.numerov.grid(config.region))) {
        fail(ErrorKind::MismatchedProblem, "Numerov grid differs from the run's reference grid");
    }
    if (config.reference_state >= sol.eigenvalues.size()) {
        fail(ErrorKind::MismatchedProblem, "Numerov solution lacks the reference state");
    }
    ComparisonRow row;
    row.termination = std::string(to_string(record.termination));
    row.abort_kind = record.abort_kind ? std::string(to_string(*record.abort_kind)) : "";
    row.e_numerov = sol.eigenvalues[config.reference_state];
    if (!record.trace.empty()) {
        row.e_miw_eq3 = record.trace.back().energy_eq3;
        row.e_miw_eq1 = record.trace.back().energy_eq1;
    }
    row.abs_error = std::abs(row.e_miw_eq3 - row.e_numerov);
    row.rel_error = row.abs_error / std::abs(row.e_numerov);
    if (record.termination != Termination::Aborted) {
        row.density = compare_density(record.final_state, config.make_kernel(), sol, config.reference_state);
    } else {
        row.density = {std::nan(""), std::nan("")};
    }
    return row;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows)
{
    std::string out =
        "parameter,e_miw_eq3,e_miw_eq1,e_numerov,abs_error,rel_error,density_l1,density_sup,termination,abort_kind,"
        "run_sha256,numerov_sha256\n";
    for (const auto& r : rows) {
        out += (r.parameter ? format_double(*r.parameter) : std::string()) + ',' + format_double(r.e_miw_eq3) + ',' +
               format_double(r.e_miw_eq1) + ',' + format_double(r.e_numerov) + ',' + format_double(r.abs_error) +
               ',' + format_double(r.rel_error) + ',' + format_double(r.density.l1) + ',' +
               format_double(r.density.sup) + ',' + r.termination + ',' + r.abort_kind + ',' + r.run_hash + ',' +
               r.numerov_hash + '\n';
    }
    return out;
}

int exit_code_for(const RunRecord& record)
{
    switch (record.termination) {
    case Termination::Converged: return kExitOk;
    case Termination::MaxIterations: return kExitNotConverged;
    case Termination::Aborted: return kExitAborted;
    }
    return kExitAborted;
}

namespace {

struct StoredRun {
    RunRecord record;
    std::string hash;
};

StoredRun store_run(const RunConfig& config, const fs::path& dir)
{
    StoredRun out;
    out.record = execute_run(config);
    const std::string text = run_record_json(config, out.record).dump(1) + '\n';
    write_atomic(dir / "config.json", to_json(config).dump(2) + '\n');
    write_atomic(dir / "run_record.json", text);
    write_atomic(dir / "trace.csv", trace_csv(out.record));
    out.hash = sha256_hex(text);
    const Json meta = {{"wall_seconds", out.record.wall_seconds}, {"run_record_sha256", out.hash}};
    write_atomic(dir / "meta.json", meta.dump(2) + '\n');
    return out;
}

std::string store_numerov(const RunConfig& config, const NumerovSolution& sol, const fs::path& dir)
{
    const std::string text = numerov_json(config.potential, sol).dump() + '\n';
    write_atomic(dir / "numerov.json", text);
    write_atomic(dir / "numerov_density.txt",
                 density_grid_text(sol.grid, density_from_state(sol, config.reference_state)));
    return sha256_hex(text);
}

void log_run(const RunConfig& config, const RunRecord& rec)
{
    const double e = rec.trace.empty() ? std::nan("") : rec.trace.back().energy_eq3;
    spdlog::info("{}: {} after {} iterations, E = {:.6f}{}", config.name, to_string(rec.termination), rec.trace.size(),
                 e, rec.message.empty() ? "" : " (" + rec.message + ")");
}

}  // namespace

int cmd_run(const fs::path& config_path, const fs::path& out, std::optional<std::uint64_t> seed)
{
    RunConfig config = load_run_config(config_path);
    if (seed) {
        config.layout.seed = *seed;
    }
    const StoredRun run = store_run(config, out);
    log_run(config, run.record);
    return exit_code_for(run.record);
}

int cmd_numerov(const fs::path& config_path, const fs::path& out)
{
    const RunConfig config = load_run_config(config_path);
    const NumerovSolution sol = execute_numerov(config);
    store_numerov(config, sol, out);
    spdlog::info("{}: Numerov E0 = {:.8f} on {} unknowns", config.name, sol.eigenvalues.front(), sol.grid.size());
    return kExitOk;
}

int cmd_sweep(const fs::path& config_path, const fs::path& out, unsigned jobs, std::optional<std::uint64_t> seed)
{
    SweepConfig sweep = load_sweep_config(config_path);
    if (seed) {
        sweep.base.layout.seed = *seed;
    }
    const std::size_t n = sweep.values.size();
    std::vector<ComparisonRow> rows(n);
    std::vector<std::string> failures(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            RunConfig cfg = sweep.base;
            cfg.potential = with_parameter(sweep.base.potential, sweep.parameter, sweep.values[i]);
            cfg.name = sweep.base.name + "_" + sweep.parameter + "_" + format_double(sweep.values[i]);
            const fs::path dir = out / ("point_" + std::to_string(i));
            try {
                const StoredRun run = store_run(cfg, dir);
                const NumerovSolution sol = execute_numerov(cfg);
                const std::string nhash = store_numerov(cfg, sol, dir);
                rows[i] = compare(cfg, run.record, sol);
                rows[i].run_hash = run.hash;
                rows[i].numerov_hash = nhash;
                log_run(cfg, run.record);
            } catch (const std::exception& e) {
                rows[i].termination = "aborted";
                rows[i].abort_kind = "exception";
                failures[i] = e.what();
                spdlog::error("{}: {}", cfg.name, e.what());
            }
            rows[i].parameter = sweep.values[i];
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < std::max(1u, jobs); ++t) {
            pool.emplace_back(worker);
        }
    }

    write_atomic(out / "sweep.json", to_json(sweep).dump(2) + '\n');
    write_atomic(out / "comparison.csv", comparison_csv(rows));
    bool partial = false;
    for (std::size_t i = 0; i < n; ++i) {
        partial = partial || rows[i].termination == "aborted";
    }
    return partial ? kExitPartialSweep : kExitOk;
}

int cmd_compare(const fs::path& run_record, const fs::path& numerov_solution, const fs::path& out)
{
    const Json rj = Json::parse(read_file(run_record));
    const Json nj = Json::parse(read_file(numerov_solution));
    const RunConfig config = run_config_from_json(rj.at("config"));
    if (potential_from_json(nj.at("potential")) != config.potential) {
        fail(ErrorKind::MismatchedProblem, "run and Numerov solution use different potentials");
    }
    RunRecord rec;
    rec.final_state = ensemble_from_json(rj.at("final_state"));
    const std::string term = rj.at("termination").get<std::string>();
    rec.termination = term == "converged"        ? Termination::Converged
                      : term == "max_iterations" ? Termination::MaxIterations
                                                 : Termination::Aborted;
    IterationRecord last;
    last.energy_eq3 = rj.value("final_energy_eq3", std::nan(""));
    last.energy_eq1 = rj.value("final_energy_eq1", std::nan(""));
    rec.trace.push_back(last);
    const NumerovSolution sol = numerov_from_json(nj);
    ComparisonRow row = compare(config, rec, sol);
    row.abort_kind = rj.at("abort_kind").is_null() ? "" : rj.at("abort_kind").get<std::string>();
    row.run_hash = sha256_hex(read_file(run_record));
    row.numerov_hash = sha256_hex(read_file(numerov_solution));
    write_atomic(out / "comparison.csv", comparison_csv({row}));
    spdlog::info("{}: |E_miw - E_numerov| = {:.3e} (rel {:.3e}), density L1 = {:.4f}, sup = {:.4f}", config.name,
                 row.abs_error, row.rel_error, row.density.l1, row.density.sup);
    return kExitOk;
}

}  // namespace miw
