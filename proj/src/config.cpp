#include "miw/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "miw/error.hpp"

namespace miw {

namespace {

template <class T>
T get(const Json& j, const char* key, const T& fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("field '") + key + "': " + e.what());
    }
}

Interval interval_from_json(const Json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2) {
        fail(ErrorKind::ConfigError, std::string(what) + " must be a [lo, hi] pair");
    }
    const Interval iv{j[0].get<double>(), j[1].get<double>()};
    if (!(iv.lo < iv.hi)) {
        fail(ErrorKind::ConfigError, std::string(what) + " needs lo < hi");
    }
    return iv;
}

Layout layout_from_string(const std::string& s)
{
    if (s == "uniform_grid") return Layout::UniformGrid;
    if (s == "radial") return Layout::Radial;
    if (s == "explicit") return Layout::Explicit;
    fail(ErrorKind::ConfigError, "unknown layout '" + s + "'");
}

std::string to_string(Layout l)
{
    switch (l) {
    case Layout::UniformGrid: return "uniform_grid";
    case Layout::Radial: return "radial";
    case Layout::Explicit: return "explicit";
    }
    return "uniform_grid";
}

Json parse_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::ConfigError, "cannot open config " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace

GridSpec NumerovSpec::grid(const Region& run_region) const
{
    const Region r = region.value_or(run_region);
    if (points.size() != static_cast<std::size_t>(r.dimension())) {
        fail(ErrorKind::ConfigError, "numerov.points needs one count per region axis");
    }
    return r.dimension() == 1 ? GridSpec::line(r.axis(0), points[0])
                              : GridSpec::square(r.axis(0), r.axis(1), points[0], points[1]);
}

Json to_json(const PotentialModel& m)
{
    Json j;
    j["model"] = std::string(model_name(m));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CoulombCutoff>) {
                j["a"] = p.a;
            } else if constexpr (std::is_same_v<T, CoulombErf>) {
                j["mu"] = p.mu;
                j["c"] = p.c;
                j["alpha"] = p.alpha;
            } else if constexpr (std::is_same_v<T, CoulombTanh>) {
                j["mu"] = p.mu;
            } else if constexpr (std::is_same_v<T, FiniteWellErf>) {
                j["depth"] = p.depth;
                j["half_width"] = p.half_width;
                j["nu"] = p.nu;
            } else if constexpr (std::is_same_v<T, SquareWell>) {
                j["depth"] = p.depth;
                j["half_width"] = p.half_width;
            }
        },
        m);
    return j;
}

PotentialModel potential_from_json(const Json& j)
{
    const auto name = get<std::string>(j, "model", "");
    auto positive = [&](const char* key, double fallback) {
        const double v = get<double>(j, key, fallback);
        if (!(v > 0.0)) {
            fail(ErrorKind::ConfigError, std::string("potential parameter '") + key + "' must be positive");
        }
        return v;
    };
    if (name == "harmonic") return Harmonic{};
    if (name == "coulomb_exact") return CoulombExact{};
    if (name == "coulomb_cutoff") return CoulombCutoff{positive("a", 1.0)};
    if (name == "coulomb_erf") {
        const double mu = positive("mu", 1.0);
        const double c = get<double>(j, "c", 0.0);
        if (c < 0.0) {
            fail(ErrorKind::ConfigError, "potential parameter 'c' must be nonnegative");
        }
        return CoulombErf{mu, c, positive("alpha", mu)};
    }
    if (name == "coulomb_tanh") return CoulombTanh{positive("mu", 1.0)};
    if (name == "finite_well_erf") {
        return FiniteWellErf{positive("depth", 2.0), positive("half_width", 1.0), positive("nu", 2.0)};
    }
    if (name == "square_well") return SquareWell{positive("depth", 2.0), positive("half_width", 1.0)};
    fail(ErrorKind::ConfigError, "unknown potential model '" + name + "'");
}

Json to_json(const Region& r)
{
    Json j;
    j["x"] = {r.axis(0).lo, r.axis(0).hi};
    if (r.dimension() == 2) {
        j["y"] = {r.axis(1).lo, r.axis(1).hi};
    }
    return j;
}

Region region_from_json(const Json& j)
{
    if (!j.contains("x")) {
        fail(ErrorKind::ConfigError, "region needs an x interval");
    }
    const Interval x = interval_from_json(j["x"], "region.x");
    if (j.contains("y")) {
        return Region(x, interval_from_json(j["y"], "region.y"));
    }
    return Region(x);
}

Json to_json(const RunConfig& c)
{
    Json j;
    j["name"] = c.name;
    j["units"] = "hbar = m = 1; Coulomb models in m e^2 / hbar^2 = 1";
    j["potential"] = to_json(c.potential);
    j["region"] = to_json(c.region);
    Json layout;
    layout["kind"] = to_string(c.layout.layout);
    layout["counts"] = c.layout.counts;
    if (!c.layout.positions.empty()) {
        Json pts = Json::array();
        for (const Vec& p : c.layout.positions) {
            pts.push_back(c.region.dimension() == 1 ? Json{p.x} : Json{p.x, p.y});
        }
        layout["positions"] = pts;
    }
    layout["bandwidth_constant"] = c.layout.bandwidth_constant;
    layout["jitter"] = c.layout.jitter;
    layout["seed"] = c.layout.seed;
    j["layout"] = layout;
    j["boundary"] = {{"enabled", c.boundary.enabled}};
    j["nodes"] = {{"enabled", c.nodes.enabled},
                  {"line_x", c.nodes.line_x},
                  {"infinite", c.nodes.infinite},
                  {"domain_radius_factor", c.nodes.domain_radius_factor}};
    j["kernel"] = std::string(to_string(c.kernel));
    const RelaxationSchedule& s = c.schedule;
    j["schedule"] = {{"dt", s.dt},
                     {"iterations", s.iterations},
                     {"substeps", s.substeps},
                     {"recursion_every", s.recursion_every},
                     {"recursion_sweeps", s.recursion_sweeps},
                     {"recursion_tol", s.recursion_tol},
                     {"mass_normalized", s.mass_normalized},
                     {"node_self_term", s.node_self_term},
                     {"recursion_exponent", s.recursion_exponent},
                     {"force_tol", s.force_tol},
                     {"energy_tol", s.energy_tol},
                     {"window", s.window},
                     {"backtracking", s.backtracking},
                     {"snapshot_every", s.snapshot_every},
                     {"threads", s.threads}};
    j["symmetry"] = std::string(to_string(c.symmetry));
    Json nv;
    nv["points"] = c.numerov.points;
    nv["states"] = c.numerov.states;
    if (c.numerov.region) {
        nv["region"] = to_json(*c.numerov.region);
    }
    j["numerov"] = nv;
    j["reference_state"] = c.reference_state;
    return j;
}

RunConfig run_config_from_json(const Json& j)
{
    if (!j.is_object()) {
        fail(ErrorKind::ConfigError, "run config must be a JSON object");
    }
    RunConfig c;
    try {
        c.name = get<std::string>(j, "name", c.name);
        if (!j.contains("potential") || !j.contains("region")) {
            fail(ErrorKind::ConfigError, "run config needs 'potential' and 'region'");
        }
        c.potential = potential_from_json(j["potential"]);
        c.region = region_from_json(j["region"]);

        const Json layout = j.value("layout", Json::object());
        c.layout.layout = layout_from_string(get<std::string>(layout, "kind", "uniform_grid"));
        c.layout.counts = get<std::vector<std::size_t>>(layout, "counts", {});
        if (layout.contains("positions")) {
            for (const auto& p : layout["positions"]) {
                const auto v = p.get<std::vector<double>>();
                if (v.size() != static_cast<std::size_t>(c.region.dimension())) {
                    fail(ErrorKind::ConfigError, "explicit position has the wrong dimension");
                }
                c.layout.positions.push_back({v[0], v.size() > 1 ? v[1] : 0.0});
            }
        }
        c.layout.bandwidth_constant = get<double>(layout, "bandwidth_constant", c.layout.bandwidth_constant);
        c.layout.jitter = get<double>(layout, "jitter", c.layout.jitter);
        c.layout.seed = get<std::uint64_t>(layout, "seed", c.layout.seed);

        const Json boundary = j.value("boundary", Json::object());
        c.boundary.enabled = get<bool>(boundary, "enabled", false);

        const Json nodes = j.value("nodes", Json::object());
        c.nodes.enabled = get<bool>(nodes, "enabled", false);
        c.nodes.line_x = get<double>(nodes, "line_x", 0.0);
        c.nodes.infinite = get<std::vector<std::size_t>>(nodes, "infinite", {});
        c.nodes.domain_radius_factor = get<double>(nodes, "domain_radius_factor", c.nodes.domain_radius_factor);

        c.kernel = kernel_family_from_string(get<std::string>(j, "kernel", "gaussian"));

        const Json s = j.value("schedule", Json::object());
        RelaxationSchedule& r = c.schedule;
        r.dt = get<double>(s, "dt", r.dt);
        r.iterations = get<std::size_t>(s, "iterations", r.iterations);
        r.substeps = get<std::size_t>(s, "substeps", r.substeps);
        r.recursion_every = get<std::size_t>(s, "recursion_every", r.recursion_every);
        r.recursion_sweeps = get<std::size_t>(s, "recursion_sweeps", r.recursion_sweeps);
        r.recursion_tol = get<double>(s, "recursion_tol", r.recursion_tol);
        r.mass_normalized = get<bool>(s, "mass_normalized", r.mass_normalized);
        r.node_self_term = get<bool>(s, "node_self_term", r.node_self_term);
        r.recursion_exponent = get<double>(s, "recursion_exponent", r.recursion_exponent);
        r.force_tol = get<double>(s, "force_tol", r.force_tol);
        r.energy_tol = get<double>(s, "energy_tol", r.energy_tol);
        r.window = get<std::size_t>(s, "window", r.window);
        r.backtracking = get<bool>(s, "backtracking", r.backtracking);
        r.snapshot_every = get<std::size_t>(s, "snapshot_every", r.snapshot_every);
        r.threads = get<unsigned>(s, "threads", r.threads);

        c.symmetry = symmetry_from_string(get<std::string>(j, "symmetry", "none"));

        const Json nv = j.value("numerov", Json::object());
        c.numerov.points = get<std::vector<std::size_t>>(
            nv, "points", c.region.dimension() == 1 ? std::vector<std::size_t>{100} : std::vector<std::size_t>{59, 59});
        c.numerov.states = get<std::size_t>(nv, "states", 1);
        if (nv.contains("region")) {
            c.numerov.region = region_from_json(nv["region"]);
        }
        c.reference_state = get<std::size_t>(j, "reference_state", 0);
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, e.what());
    }
    c.validate();
    return c;
}

void RunConfig::validate() const
{
    schedule.validate();
    const Kernel k = make_kernel();
    if (!k.smooth()) {
        fail(ErrorKind::ConfigError,
             std::string(to_string(kernel)) + " kernel is not smooth enough for the quantum force");
    }
    if (!is_smooth(potential)) {
        fail(ErrorKind::ConfigError, std::string(model_name(potential)) + " potential is not differentiable everywhere");
    }
    if (layout.layout == Layout::UniformGrid && layout.counts.size() != static_cast<std::size_t>(region.dimension())) {
        fail(ErrorKind::ConfigError, "layout.counts must give one count per region axis");
    }
    if (layout.layout == Layout::Radial && region.dimension() != 2) {
        fail(ErrorKind::ConfigError, "radial layout needs a 2D region");
    }
    if (!(layout.bandwidth_constant > 0.0) || layout.jitter < 0.0 || layout.jitter >= 0.5) {
        fail(ErrorKind::ConfigError, "bandwidth_constant must be positive and jitter in [0, 0.5)");
    }
    if (nodes.enabled && region.dimension() != 2) {
        fail(ErrorKind::ConfigError, "node lines need a 2D region");
    }
    const GridSpec g = numerov.grid(region);
    g.validate();
    if (numerov.states == 0 || numerov.states >= g.size()) {
        fail(ErrorKind::ConfigError, "numerov.states must be between 1 and the number of grid points");
    }
    if (reference_state >= numerov.states) {
        fail(ErrorKind::ConfigError, "reference_state must be below numerov.states");
    }
}

Json to_json(const SweepConfig& c)
{
    return {{"base", to_json(c.base)}, {"parameter", c.parameter}, {"values", c.values}};
}

SweepConfig sweep_config_from_json(const Json& j)
{
    SweepConfig c;
    if (!j.is_object() || !j.contains("base")) {
        fail(ErrorKind::ConfigError, "sweep config needs a 'base' run config");
    }
    c.base = run_config_from_json(j["base"]);
    c.parameter = get<std::string>(j, "parameter", "");
    c.values = get<std::vector<double>>(j, "values", {});
    c.validate();
    return c;
}

void SweepConfig::validate() const
{
    if (values.empty()) {
        fail(ErrorKind::ConfigError, "sweep value list is empty");
    }
    if (!std::is_sorted(values.begin(), values.end()) ||
        std::adjacent_find(values.begin(), values.end()) != values.end()) {
        fail(ErrorKind::ConfigError, "sweep values must be strictly ascending");
    }
    for (double v : values) {
        RunConfig point = base;
        point.potential = with_parameter(base.potential, parameter, v);
        point.validate();
    }
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(parse_file(path)); }

SweepConfig load_sweep_config(const std::filesystem::path& path) { return sweep_config_from_json(parse_file(path)); }

}  // namespace miw
