// Command-line driver: run, numerov, sweep, compare.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <optional>
#include <string>

#include "miw/error.hpp"
#include "miw/harness.hpp"

namespace {

void configure_logging()
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("miw"));
    const char* level = std::getenv("MIW_LOG_LEVEL");
    const std::string l = level ? level : "info";
    if (l == "error") {
        spdlog::set_level(spdlog::level::err);
    } else if (l == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        spdlog::set_level(spdlog::level::info);
    }
    spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv)
{
    configure_logging();
    CLI::App app{"Many-interacting-worlds relaxation solver with a Numerov reference"};
    app.require_subcommand(1);

    std::string config;
    std::string out = "out";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string record;
    std::string solution;

    auto* run = app.add_subcommand("run", "relax one configuration and write its run record");
    run->add_option("--config", config, "run config (JSON)")->required();
    run->add_option("--out", out, "output directory");
    run->add_option("--seed", seed, "seed for jittered layouts");

    auto* numerov = app.add_subcommand("numerov", "solve the reference eigenproblem for a run config");
    numerov->add_option("--config", config, "run config (JSON)")->required();
    numerov->add_option("--out", out, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run MIW and Numerov over a parameter list");
    sweep->add_option("--config", config, "sweep config (JSON)")->required();
    sweep->add_option("--out", out, "output directory");
    sweep->add_option("--jobs", jobs, "parallel sweep points")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "seed for jittered layouts");

    auto* compare = app.add_subcommand("compare", "compare a run record with a Numerov solution");
    compare->add_option("--run", record, "run_record.json")->required();
    compare->add_option("--numerov", solution, "numerov.json")->required();
    compare->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : miw::kExitConfigError;
    }

    try {
        if (*run) {
            return miw::cmd_run(config, out, seed);
        }
        if (*numerov) {
            return miw::cmd_numerov(config, out);
        }
        if (*sweep) {
            return miw::cmd_sweep(config, out, jobs, seed);
        }
        return miw::cmd_compare(record, solution, out);
    } catch (const miw::Error& e) {
        spdlog::error("{}: {}", miw::to_string(e.kind()), e.what());
        const bool config_like =
            e.kind() == miw::ErrorKind::ConfigError || e.kind() == miw::ErrorKind::MismatchedProblem;
        return config_like ? miw::kExitConfigError : miw::kExitAborted;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return miw::kExitAborted;
    }
}
