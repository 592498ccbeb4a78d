#include "miw/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "miw/error.hpp"

namespace miw {

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::ConfigError, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string trace_csv(const RunRecord& record)
{
    std::string out = "iteration,energy_eq3,energy_eq1,max_force,bandwidth_change,dt\n";
    for (const auto& r : record.trace) {
        out += std::to_string(r.iteration) + ',' + format_double(r.energy_eq3) + ',' + format_double(r.energy_eq1) +
               ',' + format_double(r.max_force) + ',' + format_double(r.bandwidth_change) + ',' +
               format_double(r.dt) + '\n';
    }
    return out;
}

namespace {

std::string role_name(WorldRole r)
{
    switch (r) {
    case WorldRole::Free: return "free";
    case WorldRole::FixedBoundary: return "fixed_boundary";
    case WorldRole::Node: return "node";
    case WorldRole::NodeDomain: return "node_domain";
    }
    return "free";
}

WorldRole role_from_name(const std::string& s)
{
    if (s == "free") return WorldRole::Free;
    if (s == "fixed_boundary") return WorldRole::FixedBoundary;
    if (s == "node") return WorldRole::Node;
    if (s == "node_domain") return WorldRole::NodeDomain;
    fail(ErrorKind::ConfigError, "unknown world role '" + s + "'");
}

// Infinite bandwidths are stored as null; JSON has no infinity.
Json bandwidths_json(const std::vector<double>& h)
{
    Json out = Json::array();
    for (double v : h) {
        out.push_back(std::isinf(v) ? Json(nullptr) : Json(v));
    }
    return out;
}

std::vector<double> bandwidths_from_json(const Json& j)
{
    std::vector<double> out;
    for (const auto& v : j) {
        out.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
    }
    return out;
}

Json points_json(const std::vector<Vec>& pts, int dim)
{
    Json out = Json::array();
    for (const Vec& p : pts) {
        out.push_back(dim == 1 ? Json{p.x} : Json{p.x, p.y});
    }
    return out;
}

std::vector<Vec> points_from_json(const Json& j)
{
    std::vector<Vec> out;
    for (const auto& p : j) {
        // Non-finite coordinates serialize as null; only a diverged run writes them.
        if (p.at(0).is_null() || (p.size() > 1 && p.at(1).is_null())) {
            fail(ErrorKind::ConfigError, "ensemble holds non-finite positions (the run diverged)");
        }
        out.push_back({p.at(0).get<double>(), p.size() > 1 ? p.at(1).get<double>() : 0.0});
    }
    return out;
}

}  // namespace

Json to_json(const WorldEnsemble& ens)
{
    Json j;
    j["dim"] = ens.dim;
    j["positions"] = points_json(ens.positions, ens.dim);
    j["bandwidths"] = bandwidths_json(ens.bandwidths);
    Json roles = Json::array();
    for (WorldRole r : ens.roles) {
        roles.push_back(role_name(r));
    }
    j["roles"] = roles;
    j["signs"] = ens.signs;
    return j;
}

WorldEnsemble ensemble_from_json(const Json& j)
{
    WorldEnsemble ens;
    try {
        ens.dim = j.at("dim").get<int>();
        ens.positions = points_from_json(j.at("positions"));
        ens.bandwidths = bandwidths_from_json(j.at("bandwidths"));
        for (const auto& r : j.at("roles")) {
            ens.roles.push_back(role_from_name(r.get<std::string>()));
        }
        ens.signs = j.at("signs").get<std::vector<int>>();
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("malformed ensemble: ") + e.what());
    }
    ens.velocities.assign(ens.positions.size(), Vec{});
    ens.validate();
    return ens;
}

Json run_record_json(const RunConfig& config, const RunRecord& record)
{
    Json j;
    j["config"] = to_json(config);
    j["termination"] = std::string(to_string(record.termination));
    j["abort_kind"] = record.abort_kind ? Json(std::string(to_string(*record.abort_kind))) : Json(nullptr);
    j["message"] = record.message;
    j["iterations"] = record.trace.size();
    if (!record.trace.empty()) {
        const auto& last = record.trace.back();
        j["final_energy_eq3"] = last.energy_eq3;
        j["final_energy_eq1"] = last.energy_eq1;
        j["final_max_force"] = last.max_force;
    }
    j["final_state"] = to_json(record.final_state);
    Json snaps = Json::array();
    for (const auto& s : record.snapshots) {
        snaps.push_back({{"iteration", s.iteration},
                         {"positions", points_json(s.positions, record.final_state.dim)},
                         {"bandwidths", bandwidths_json(s.bandwidths)}});
    }
    j["snapshots"] = snaps;
    return j;
}

Json to_json(const GridSpec& g)
{
    Json axes = Json::array();
    for (int a = 0; a < g.dim; ++a) {
        const GridAxis& ax = g.axes[static_cast<std::size_t>(a)];
        axes.push_back({{"lo", ax.span.lo}, {"hi", ax.span.hi}, {"points", ax.points}});
    }
    return {{"dim", g.dim}, {"axes", axes}};
}

GridSpec grid_from_json(const Json& j)
{
    GridSpec g;
    try {
        g.dim = j.at("dim").get<int>();
        for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim) && a < 2; ++a) {
            const Json& ax = j.at("axes").at(a);
            g.axes[a] = {{ax.at("lo").get<double>(), ax.at("hi").get<double>()}, ax.at("points").get<std::size_t>()};
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("malformed grid: ") + e.what());
    }
    g.validate();
    return g;
}

Json numerov_json(const PotentialModel& model, const NumerovSolution& sol)
{
    Json j;
    j["potential"] = to_json(model);
    j["grid"] = to_json(sol.grid);
    j["eigenvalues"] = sol.eigenvalues;
    j["eigenvectors"] = sol.eigenvectors;
    return j;
}

NumerovSolution numerov_from_json(const Json& j)
{
    NumerovSolution s;
    try {
        s.grid = grid_from_json(j.at("grid"));
        s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        s.eigenvectors = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
    } catch (const Json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("malformed Numerov solution: ") + e.what());
    }
    return s;
}

std::string density_grid_text(const GridSpec& grid, const std::vector<double>& density)
{
    std::string out;
    for (std::size_t k = 0; k < density.size(); ++k) {
        const Vec p = grid.point(k);
        out += format_double(p.x);
        if (grid.dim == 2) {
            out += ' ' + format_double(p.y);
        }
        out += ' ' + format_double(density[k]) + '\n';
    }
    return out;
}

}  // namespace miw
