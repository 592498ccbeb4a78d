#include <doctest.h>

#include <filesystem>

#include "miw/config.hpp"
#include "miw/harness.hpp"
#include "miw/io.hpp"
#include "support.hpp"

using namespace miw;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = MIW_CONFIG_DIR;

// Fresh scratch directory under the build tree's temp area.
fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("miw_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const Json& j)
{
    const fs::path p = dir / "config.json";
    write_atomic(p, j.dump(2));
    return p;
}

Json config_json(const char* name) { return Json::parse(read_file(kConfigs / name)); }

}  // namespace

TEST_CASE("shipped configs survive a round trip")
{
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        const Json j = Json::parse(read_file(entry.path()));
        CAPTURE(entry.path().filename().string());
        if (j.contains("parameter")) {
            const SweepConfig s = load_sweep_config(entry.path());
            const Json once = to_json(s);
            CHECK(to_json(sweep_config_from_json(once)) == once);
        } else {
            const RunConfig c = load_run_config(entry.path());
            const Json once = to_json(c);
            const RunConfig again = run_config_from_json(once);
            CHECK(to_json(again) == once);
            CHECK(again.potential == c.potential);
            CHECK(again.region == c.region);
            CHECK(again.schedule.dt == c.schedule.dt);
            CHECK(again.schedule.node_self_term == c.schedule.node_self_term);
        }
    }
}

TEST_CASE("config validation happens before any work")
{
    Json j = config_json("harmonic_1d.json");
    SUBCASE("zero time step")
    {
        j["schedule"]["dt"] = 0.0;
        CHECK_FAILS_WITH(run_config_from_json(j), ErrorKind::ConfigError);
    }
    SUBCASE("more states than grid points")
    {
        j["numerov"]["points"] = Json::array({5});
        j["numerov"]["states"] = 6;
        CHECK_FAILS_WITH(run_config_from_json(j), ErrorKind::ConfigError);
    }
    SUBCASE("dimension mismatch")
    {
        j["layout"]["counts"] = Json::array({4, 4});
        CHECK_FAILS_WITH(run_config_from_json(j), ErrorKind::ConfigError);
    }
    SUBCASE("non-smooth kernel for dynamics")
    {
        j["kernel"] = "epanechnikov";
        CHECK_FAILS_WITH(run_config_from_json(j), ErrorKind::ConfigError);
    }
    SUBCASE("unknown potential")
    {
        j["potential"]["model"] = "yukawa";
        CHECK_FAILS_WITH(run_config_from_json(j), ErrorKind::ConfigError);
    }
    SUBCASE("empty sweep")
    {
        Json s = config_json("sweep_well_nu.json");
        s["values"] = Json::array();
        CHECK_FAILS_WITH(sweep_config_from_json(s), ErrorKind::ConfigError);
    }
    SUBCASE("malformed file")
    {
        const fs::path dir = scratch("malformed");
        write_atomic(dir / "bad.json", "{ not json");
        CHECK_FAILS_WITH(load_run_config(dir / "bad.json"), ErrorKind::ConfigError);
        CHECK_FAILS_WITH(load_run_config(dir / "missing.json"), ErrorKind::ConfigError);
    }
}

TEST_CASE("persistence helpers")
{
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    WorldEnsemble e;
    e.dim = 2;
    e.positions = {{0.1, 0.2}, {1.5, 1.5}, {-0.3, 0.7}};
    e.velocities.assign(3, Vec{});
    e.bandwidths = {0.4, std::numeric_limits<double>::infinity(), 0.6};
    e.roles = {WorldRole::Free, WorldRole::FixedBoundary, WorldRole::NodeDomain};
    e.signs = {1, 1, 1};
    const WorldEnsemble back = ensemble_from_json(Json::parse(to_json(e).dump()));
    CHECK(back.positions == e.positions);
    CHECK(back.bandwidths == e.bandwidths);
    CHECK(back.roles == e.roles);
}

TEST_CASE("command exit codes")
{
    const fs::path dir = scratch("exit");
    Json ok = config_json("harmonic_1d.json");
    CHECK(cmd_run(write_config(dir, ok), dir / "ok", std::nullopt) == kExitOk);

    Json capped = ok;
    capped["schedule"]["iterations"] = 50;
    CHECK(cmd_run(write_config(dir, capped), dir / "capped", std::nullopt) == kExitNotConverged);

    Json chaos = config_json("chaos_2d_mu6.json");
    CHECK(cmd_run(write_config(dir, chaos), dir / "chaos", std::nullopt) == kExitAborted);
    const Json rec = Json::parse(read_file(dir / "chaos" / "run_record.json"));
    CHECK(rec.at("termination") == "aborted");
    CHECK(rec.at("abort_kind") == "CollisionDetected");

    Json bad = ok;
    bad["schedule"]["dt"] = 0.0;
    CHECK_FAILS_WITH(cmd_run(write_config(dir, bad), dir / "bad", std::nullopt), ErrorKind::ConfigError);
    CHECK_FALSE(fs::exists(dir / "bad" / "run_record.json"));
}

TEST_CASE("compare checks that both sides describe the same problem")
{
    const fs::path dir = scratch("compare");
    Json c = config_json("harmonic_1d.json");
    c["schedule"]["iterations"] = 100;
    const fs::path cfg = write_config(dir, c);
    REQUIRE(cmd_run(cfg, dir / "run", std::nullopt) == kExitNotConverged);
    REQUIRE(cmd_numerov(cfg, dir / "ref") == kExitOk);
    CHECK(cmd_compare(dir / "run" / "run_record.json", dir / "ref" / "numerov.json", dir / "cmp") == kExitOk);
    const std::string csv = read_file(dir / "cmp" / "comparison.csv");
    CHECK(csv.find(sha256_hex(read_file(dir / "run" / "run_record.json"))) != std::string::npos);
    CHECK(csv.find(sha256_hex(read_file(dir / "ref" / "numerov.json"))) != std::string::npos);

    Json other = c;
    other["region"]["x"] = Json::array({-5, 5});
    REQUIRE(cmd_numerov(write_config(dir / "o", other), dir / "other") == kExitOk);
    CHECK_FAILS_WITH(cmd_compare(dir / "run" / "run_record.json", dir / "other" / "numerov.json", dir / "cmp2"),
                     ErrorKind::MismatchedProblem);

    Json well = c;
    well["potential"] = Json::parse(R"({"model": "finite_well_erf", "depth": 2, "half_width": 1, "nu": 2})");
    REQUIRE(cmd_numerov(write_config(dir / "w", well), dir / "well") == kExitOk);
    CHECK_FAILS_WITH(cmd_compare(dir / "run" / "run_record.json", dir / "well" / "numerov.json", dir / "cmp3"),
                     ErrorKind::MismatchedProblem);
}

TEST_CASE("repeated commands write identical files")
{
    const fs::path dir = scratch("repeat");
    Json s = config_json("sweep_well_nu.json");
    s["base"]["schedule"]["iterations"] = 300;
    s["values"] = Json::array({1.0, 2.0});
    const fs::path cfg = write_config(dir, s);
    cmd_sweep(cfg, dir / "a", 2, std::nullopt);
    cmd_sweep(cfg, dir / "b", 1, std::nullopt);
    for (const char* f : {"comparison.csv", "point_0/run_record.json", "point_1/trace.csv",
                          "point_1/numerov.json", "point_0/numerov_density.txt"}) {
        CAPTURE(f);
        CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
    }
    const std::string csv = read_file(dir / "a" / "comparison.csv");
    CHECK(csv.find(sha256_hex(read_file(dir / "a" / "point_1" / "run_record.json"))) != std::string::npos);
}
