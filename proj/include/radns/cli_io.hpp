#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eulerian_bridge.hpp"
#include "family_runner.hpp"
#include "initial_data.hpp"
#include "lagrangian_solver.hpp"
#include "monitors.hpp"
#include "params.hpp"
#include "weak_form.hpp"

namespace radns {

namespace fs = std::filesystem;
using json = nlohmann::json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// TOML-like reader: [section] headers, key = value, '#' comments.
// Values are numbers, "strings", true/false, or flat arrays of numbers.
// ---------------------------------------------------------------------------

using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;

struct ConfigEntry {
    ConfigValue value;
    int line = 0;
};

using ConfigTable = std::map<std::string, ConfigEntry>;  // "section.key"

namespace detail {

inline auto trim(std::string s) -> std::string {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline auto strip_comment(const std::string& s) -> std::string {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

inline auto parse_number(const std::string& tok, double& out) -> bool {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

inline auto parse_value(const std::string& raw, ConfigValue& out, std::string& err) -> bool {
    const std::string s = trim(raw);
    if (s.empty()) {
        err = "missing value";
        return false;
    }
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') {
            err = "unterminated string";
            return false;
        }
        out = s.substr(1, s.size() - 2);
        return true;
    }
    if (s == "true" || s == "false") {
        out = (s == "true");
        return true;
    }
    if (s.front() == '[') {
        if (s.back() != ']') {
            err = "unterminated array";
            return false;
        }
        std::vector<double> xs;
        std::stringstream ss(s.substr(1, s.size() - 2));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            double v;
            if (!parse_number(tok, v)) {
                err = "array element '" + tok + "' is not a number";
                return false;
            }
            xs.push_back(v);
        }
        out = xs;
        return true;
    }
    double v;
    if (!parse_number(s, v)) {
        err = "cannot parse value '" + s + "'";
        return false;
    }
    out = v;
    return true;
}

}  // namespace detail

inline auto parse_config_text(const std::string& text) -> ConfigTable {
    ConfigTable table;
    std::vector<std::string> errs;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = detail::trim(detail::strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                errs.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string full = section.empty() ? key : section + "." + key;
        ConfigValue v;
        std::string err;
        if (!detail::parse_value(s.substr(eq + 1), v, err)) {
            errs.push_back("line " + std::to_string(lineno) + ": " + full + ": " + err);
            continue;
        }
        if (table.count(full)) {
            errs.push_back("line " + std::to_string(lineno) + ": duplicate key " + full);
            continue;
        }
        table[full] = {v, lineno};
    }
    if (!errs.empty()) throw ConfigError(errs);
    return table;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct DataSpec {
    std::string source = "gaussian_bump";  // constant | gaussian_bump | discontinuous_shell | csv
    BumpSpec bump;
    ShellSpec shell;
    std::string path;  // csv, resolved against the config directory
};

struct RunConfig {
    FluidParams params;
    DataSpec data;
    double a = 0.1;
    double k = 4.0;
    std::vector<double> a_list;
    std::vector<double> k_list;
    SolverConfig solver;
    double eps = 0.5;                 // envelope / high-order cutoff
    int eulerian_points = 1024;
    std::uint64_t seed = 42;
    int intervals = 100;              // random sets per sample for uniform integrability
    double family_dx = 0.0;           // > 0: family runs share mass spacing
    std::vector<int> weak_N = {256, 512, 1024};
    int weak_points_per_cell = 8;  // r-grid points per mass cell for the residual quadrature
    std::string out_dir = "out";
    std::string source_text;  // raw config bytes, hashed into the manifest
    fs::path base_dir = ".";

    [[nodiscard]] auto validate() const -> std::vector<std::string> {
        std::vector<std::string> errs = params.validate();
        for (auto& e : solver.validate()) errs.push_back(e);
        if (!(a > 0.0)) errs.emplace_back("domain.a must be positive");
        if (!(k > 0.0)) errs.emplace_back("domain.k must be positive");
        for (double x : a_list)
            if (!(x > 0.0)) errs.emplace_back("domain.a_list entries must be positive");
        for (double x : k_list)
            if (!(x > 0.0)) errs.emplace_back("domain.k_list entries must be positive");
        static const std::set<std::string> sources = {"constant", "gaussian_bump", "discontinuous_shell", "csv"};
        if (!sources.count(data.source)) errs.push_back("data.source '" + data.source + "' is not one of constant, gaussian_bump, discontinuous_shell, csv");
        if (data.source == "csv" && data.path.empty()) errs.emplace_back("data.path is required for csv data");
        if (data.source == "gaussian_bump") {
            if (!(data.bump.width > 0.0)) errs.emplace_back("data.width must be positive");
            if (!(data.bump.amplitude > -1.0)) errs.emplace_back("data.amplitude must exceed -1 (positive density)");
        }
        if (data.source == "discontinuous_shell") {
            if (!(data.shell.inner_density > 0.0)) errs.emplace_back("data.inner_density must be positive");
            if (!(data.shell.shell_radius > 0.0 && data.shell.shell_radius < data.shell.r_max))
                errs.emplace_back("data.shell_radius must lie in (0, r_max)");
        }
        if (!(eps > 0.0)) errs.emplace_back("monitors.eps must be positive");
        if (eulerian_points < 2) errs.emplace_back("output.eulerian_points must be at least 2");
        if (intervals < 1) errs.emplace_back("monitors.intervals must be at least 1");
        if (weak_N.size() < 2) errs.emplace_back("weakform.N must list at least two resolutions");
        for (int N : weak_N)
            if (N < 8) errs.emplace_back("weakform.N entries must be at least 8");
        if (weak_points_per_cell < 1) errs.emplace_back("weakform.points_per_cell must be at least 1");
        if (out_dir.empty()) errs.emplace_back("output.dir must not be empty");
        return errs;
    }
};

namespace detail {

struct Reader {
    const ConfigTable& t;
    std::vector<std::string>& errs;
    std::set<std::string> used;

    auto find(const std::string& key) -> const ConfigEntry* {
        auto it = t.find(key);
        if (it == t.end()) return nullptr;
        used.insert(key);
        return &it->second;
    }
    void bad(const std::string& key, const ConfigEntry& e, const std::string& want) {
        errs.push_back("line " + std::to_string(e.line) + ": " + key + " must be " + want);
    }
    void num(const std::string& key, double& out) {
        if (auto* e = find(key)) {
            if (auto* p = std::get_if<double>(&e->value)) out = *p;
            else bad(key, *e, "a number");
        }
    }
    void integer(const std::string& key, int& out) {
        if (auto* e = find(key)) {
            auto* p = std::get_if<double>(&e->value);
            if (p && std::floor(*p) == *p && std::abs(*p) < 1e9) out = static_cast<int>(*p);
            else bad(key, *e, "an integer");
        }
    }
    void str(const std::string& key, std::string& out) {
        if (auto* e = find(key)) {
            if (auto* p = std::get_if<std::string>(&e->value)) out = *p;
            else bad(key, *e, "a string");
        }
    }
    void list(const std::string& key, std::vector<double>& out) {
        if (auto* e = find(key)) {
            if (auto* p = std::get_if<std::vector<double>>(&e->value)) out = *p;
            else bad(key, *e, "an array of numbers");
        }
    }
    void ilist(const std::string& key, std::vector<int>& out) {
        std::vector<double> xs;
        if (auto* e = t.count(key) ? &t.at(key) : nullptr) {
            list(key, xs);
            out.clear();
            for (double x : xs) {
                if (std::floor(x) != x) {
                    bad(key, *e, "an array of integers");
                    return;
                }
                out.push_back(static_cast<int>(x));
            }
        }
    }
};

}  // namespace detail

/// Build a validated RunConfig from config text. Every problem is collected before throwing.
inline auto parse_config_string(const std::string& text, const fs::path& base_dir = ".") -> RunConfig {
    const ConfigTable table = parse_config_text(text);
    RunConfig cfg;
    cfg.source_text = text;
    cfg.base_dir = base_dir;
    std::vector<std::string> errs;
    detail::Reader rd{table, errs, {}};

    rd.num("fluid.gamma", cfg.params.gamma);
    rd.num("fluid.mu", cfg.params.mu);
    rd.num("fluid.lambda", cfg.params.lambda);
    rd.num("fluid.kappa", cfg.params.kappa);
    rd.integer("fluid.n", cfg.params.n);
    rd.num("fluid.R", cfg.params.R);

    rd.str("data.source", cfg.data.source);
    rd.num("data.amplitude", cfg.data.bump.amplitude);
    rd.num("data.center", cfg.data.bump.center);
    rd.num("data.width", cfg.data.bump.width);
    rd.num("data.inner_density", cfg.data.shell.inner_density);
    rd.num("data.shell_radius", cfg.data.shell.shell_radius);
    rd.num("data.r_max", cfg.data.shell.r_max);
    rd.str("data.path", cfg.data.path);

    rd.num("domain.a", cfg.a);
    rd.num("domain.k", cfg.k);
    rd.list("domain.a_list", cfg.a_list);
    rd.list("domain.k_list", cfg.k_list);

    rd.integer("solver.N", cfg.solver.N);
    rd.num("solver.T", cfg.solver.T);
    rd.num("solver.cfl", cfg.solver.cfl);
    rd.num("solver.dt_min", cfg.solver.dt_min);
    rd.list("solver.output_times", cfg.solver.output_times);
    rd.integer("solver.max_newton", cfg.solver.max_newton);
    rd.num("solver.newton_tol", cfg.solver.newton_tol);
    std::string mode = to_string(cfg.solver.mode);
    rd.str("solver.mode", mode);
    if (mode == "strict") cfg.solver.mode = MonitorMode::Strict;
    else if (mode == "exploratory") cfg.solver.mode = MonitorMode::Exploratory;
    else errs.push_back("solver.mode must be strict or exploratory");

    rd.num("monitors.eps", cfg.eps);
    rd.integer("monitors.intervals", cfg.intervals);
    int seed = static_cast<int>(cfg.seed);
    rd.integer("monitors.seed", seed);
    if (seed < 0) errs.emplace_back("monitors.seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(std::max(seed, 0));

    rd.num("family.dx", cfg.family_dx);
    rd.ilist("weakform.N", cfg.weak_N);
    rd.integer("weakform.points_per_cell", cfg.weak_points_per_cell);

    rd.str("output.dir", cfg.out_dir);
    rd.integer("output.eulerian_points", cfg.eulerian_points);

    for (const auto& [key, entry] : table)
        if (!rd.used.count(key)) errs.push_back("line " + std::to_string(entry.line) + ": unknown key " + key);
    for (auto& e : cfg.validate()) errs.push_back(e);
    if (!errs.empty()) throw ConfigError(errs);
    return cfg;
}

inline auto read_file(const fs::path& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline auto parse_config(const fs::path& path) -> RunConfig {
    return parse_config_string(read_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

inline auto data_path(const RunConfig& cfg) -> fs::path {
    fs::path p(cfg.data.path);
    return p.is_absolute() ? p : cfg.base_dir / p;
}

inline auto load_data(const RunConfig& cfg) -> RadialData {
    if (cfg.data.source == "constant") return constant_data(cfg.params);
    if (cfg.data.source == "gaussian_bump") return gaussian_bump(cfg.params, cfg.data.bump);
    if (cfg.data.source == "discontinuous_shell") return discontinuous_shell(cfg.params, cfg.data.shell);
    return read_radial_csv(data_path(cfg).string(), cfg.params);
}

// ---------------------------------------------------------------------------
// Hashing and formatting
// ---------------------------------------------------------------------------

inline auto sha256_hex(const std::string& bytes) -> std::string {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

/// 17 significant digits, locale independent
inline auto fmt(double x) -> std::string {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline auto jnum(double x) -> json {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

/// Creates the directory and proves it is writable before any compute.
inline void preflight_output(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".write_probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!out || !(out << "ok")) throw IoError("output directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

// ---------------------------------------------------------------------------
// Serialization of run artifacts
// ---------------------------------------------------------------------------

inline auto lagrangian_csv(const Trajectory& traj) -> std::string {
    std::ostringstream os;
    os << "t,index,x,r,u,v,e\n";
    for (const auto& s : traj.states) {
        for (int j = 0; j <= s.N(); ++j) {
            os << fmt(s.t) << ',' << j << ',' << fmt(s.node_x(j)) << ',' << fmt(s.r[j]) << ',' << fmt(s.u[j]) << ',';
            if (j < s.N()) os << fmt(s.v[j]) << ',' << fmt(s.e[j]);
            else os << ',';
            os << '\n';
        }
    }
    return os.str();
}

inline auto eulerian_csv(const Trajectory& traj, int points) -> std::string {
    std::ostringstream os;
    os << "t,r,rho,u,e,phi\n";
    for (const auto& s : traj.states) {
        const RadialProfile p = eulerian_profile(s, points);
        for (std::size_t i = 0; i < p.r.size(); ++i)
            os << fmt(p.t) << ',' << fmt(p.r[i]) << ',' << fmt(p.rho[i]) << ',' << fmt(p.u[i]) << ',' << fmt(p.e[i]) << ','
               << fmt(p.phi[i]) << '\n';
    }
    return os.str();
}

inline auto entropy_csv(const Trajectory& traj) -> std::string {
    std::ostringstream os;
    os << "t,E,D_heat,D_bulk,D_shear,cumulative_D,C0\n";
    for (const auto& r : traj.entropy)
        os << fmt(r.t) << ',' << fmt(r.E) << ',' << fmt(r.D.heat) << ',' << fmt(r.D.bulk) << ',' << fmt(r.D.shear) << ','
           << fmt(r.cumulative.total()) << ',' << fmt(r.C0) << '\n';
    return os.str();
}

inline auto monitor_json(const BoundCheck& b) -> json {
    return json{{"monitor", b.name},
                {"mode", b.mode},
                {"satisfied", b.satisfied},
                {"margin", jnum(b.margin)},
                {"worst_location", {{"x", jnum(b.worst_x)}, {"t", jnum(b.worst_t)}}},
                {"value", jnum(b.value)}};
}

/// Every monitor of one trajectory. "assert" entries gate strict runs.
inline auto evaluate_monitors(const Trajectory& traj, double C0, double eps, std::uint64_t seed, int intervals)
    -> std::vector<BoundCheck> {
    std::vector<BoundCheck> out;
    out.push_back(check_entropy(traj));

    BoundCheck mass;
    mass.name = "mass_identity";
    BoundCheck path, env, mv;
    path.name = "path_bounds";
    env.name = "density_envelope";
    mv.name = "mean_value_cells";
    for (const auto& s : traj.states) {
        const double res = mass_identity_residual(s);
        mass.observe(1e-10 - res, 0.0, s.t);
        mass.value = std::max(mass.value, res);
        path.merge(check_path_bounds(s, C0));
        if (eps < s.k) env.merge(check_envelope(s, eps, C0, traj.params));
        if (s.k >= 1.0) mv.merge(cell_mean_values(s, C0, traj.params).check);
    }
    path.value = C0;
    env.value = C0;
    out.push_back(mass);
    out.push_back(path);
    out.push_back(env);
    out.push_back(mv);

    std::vector<RadialProfile> profiles;
    for (const auto& s : traj.states)
        if (s.t > 0.0) profiles.push_back(eulerian_profile(s, 2048));
    if (!profiles.empty()) {
        const double CT = entropy_bound_CT(profiles);
        BoundCheck ui;
        ui.name = "uniform_integrability";
        ui.value = CT;
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            const auto sets = random_intervals(profiles[j].a, profiles[j].r.back(), intervals, seed + j);
            ui.merge(uniform_integrability(profiles[j], sets, CT));
        }
        out.push_back(ui);
    }
    if (traj.states.size() >= 3) {
        const HighOrderReport ho = high_order_functional(traj, eps);
        BoundCheck hb;
        hb.name = "high_order_functional";
        hb.mode = "report";
        hb.value = ho.value;
        hb.margin = ho.value_unweighted;
        out.push_back(hb);
    }
    return out;
}

struct RunArtifacts {
    LagrangianData data;
    Trajectory traj;
    double C0 = 0.0;
    std::vector<BoundCheck> monitors;
    bool complete = true;
    std::string abort_reason;
    int exit_code = 0;
};

inline auto monitors_failed(const std::vector<BoundCheck>& ms) -> bool {
    for (const auto& m : ms)
        if (m.mode == "assert" && !m.satisfied) return true;
    return false;
}

/// Data -> solve -> monitors for a single (a, k). Exceptions from the solver are folded into
/// the artifacts so partial output can still be written.
inline auto run_pipeline(const RunConfig& cfg, const RadialData& base, double a, double k) -> RunArtifacts {
    RunArtifacts art;
    art.data = build_lagrangian(base, a, k, cfg.solver.N, cfg.params.n);
    art.C0 = data_entropy_constant(art.data, cfg.params);
    try {
        art.traj = run(art.data.to_state(), cfg.params, cfg.solver);
    } catch (const MonitorViolation& ex) {
        art.traj = ex.partial();
        art.complete = false;
        art.abort_reason = ex.what();
        art.exit_code = 4;
    } catch (const RunAborted& ex) {
        art.traj = ex.partial();
        art.complete = false;
        art.abort_reason = ex.what();
        art.exit_code = 3;
    }
    art.traj.C0 = art.C0;
    art.monitors = evaluate_monitors(art.traj, art.C0, cfg.eps, cfg.seed, cfg.intervals);
    if (art.exit_code == 0 && cfg.solver.mode == MonitorMode::Strict && monitors_failed(art.monitors)) art.exit_code = 4;
    return art;
}

inline auto config_json(const RunConfig& cfg) -> json {
    const auto& p = cfg.params;
    return json{{"fluid", {{"gamma", p.gamma}, {"mu", p.mu}, {"lambda", p.lambda}, {"kappa", p.kappa}, {"n", p.n}, {"R", p.R}}},
                {"data", {{"source", cfg.data.source}, {"path", cfg.data.path}}},
                {"solver", {{"N", cfg.solver.N}, {"T", cfg.solver.T}, {"cfl", cfg.solver.cfl}, {"dt_min", cfg.solver.dt_min},
                            {"output_times", cfg.solver.sample_times()}, {"mode", to_string(cfg.solver.mode)}}},
                {"eps", cfg.eps},
                {"seed", cfg.seed}};
}

inline auto input_digests(const RunConfig& cfg) -> json {
    json j;
    j["config_sha256"] = sha256_hex(cfg.source_text);
    j["data_sha256"] = cfg.data.source == "csv" ? json(sha256_hex(read_file(data_path(cfg)))) : json(nullptr);
    j["inputs_sha256"] = sha256_hex(cfg.source_text + "\n" + j["data_sha256"].dump() + "\n" + config_json(cfg).dump());
    return j;
}

inline auto write_manifest(const fs::path& dir, const RunConfig& cfg, const std::vector<std::string>& files, json extra = {})
    -> void {
    json m = input_digests(cfg);
    m["effective_config"] = config_json(cfg);
    json fj = json::object();
    for (const auto& f : files) fj[f] = sha256_hex(read_file(dir / f));
    m["files"] = fj;
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

/// lagrangian.csv, eulerian.csv, entropy.csv, monitors.json in `dir`; returns the file names.
inline auto write_run_files(const fs::path& dir, const RunArtifacts& art, const RunConfig& cfg) -> std::vector<std::string> {
    write_text(dir / "lagrangian.csv", lagrangian_csv(art.traj));
    write_text(dir / "eulerian.csv", eulerian_csv(art.traj, cfg.eulerian_points));
    write_text(dir / "entropy.csv", entropy_csv(art.traj));
    json mj = json::array();
    for (const auto& b : art.monitors) mj.push_back(monitor_json(b));
    json doc{{"a", art.data.a},
             {"k", art.data.k},
             {"N", art.data.N()},
             {"C0", art.C0},
             {"complete", art.complete},
             {"abort_reason", art.abort_reason},
             {"steps", art.traj.dt_history.size()},
             {"rejections", art.traj.rejections},
             {"monitors", mj}};
    write_text(dir / "monitors.json", doc.dump(2) + "\n");
    return {"lagrangian.csv", "eulerian.csv", "entropy.csv", "monitors.json"};
}

inline auto emit_outputs(const RunArtifacts& art, const RunConfig& cfg, const fs::path& dir) -> void {
    preflight_output(dir);
    const auto files = write_run_files(dir, art, cfg);
    write_manifest(dir, cfg, files, json{{"kind", "run"}, {"exit_code", art.exit_code}});
}

inline auto run_dir_name(double a, double k) -> std::string { return "a" + fmt(a) + "_k" + fmt(k); }

inline auto paths_csv(const FamilyReport& rep) -> std::string {
    std::ostringstream os;
    os << "a,k,x,t,r\n";
    for (const auto& run : rep.runs) {
        const PathFamily& pf = run.paths;
        for (std::size_t j = 0; j < pf.t.size(); ++j)
            for (std::size_t i = 0; i < pf.x.size(); ++i)
                os << fmt(pf.a) << ',' << fmt(pf.k) << ',' << fmt(pf.x[i]) << ',' << fmt(pf.t[j]) << ',' << fmt(pf.r[j][i]) << '\n';
    }
    return os.str();
}

inline auto family_json(const FamilyReport& rep) -> json {
    json runs = json::array();
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const RunSummary& s = rep.runs[i].summary;
        const HolderFit& h = rep.holder[i];
        json hj{{"flat", h.flat}, {"alpha_r", jnum(h.alpha_r)}, {"alpha_t", jnum(h.alpha_t)},
                {"reference_alpha_r", 0.5}, {"reference_alpha_t", 0.25}};
        runs.push_back(json{{"a", s.a},
                            {"k", s.k},
                            {"N", s.N},
                            {"C0", s.C0},
                            {"E0", s.E0},
                            {"complete", s.complete},
                            {"abort_reason", s.abort_reason},
                            {"steps", s.steps},
                            {"rejections", s.rejections},
                            {"min_e", jnum(s.min_e)},
                            {"monitors", json::array({monitor_json(s.entropy), monitor_json(s.path), monitor_json(s.envelope),
                                                      monitor_json(s.mean_value)})},
                            {"holder", hj},
                            {"dir", run_dir_name(s.a, s.k)}});
    }
    json dist = json::array();
    for (const auto& row : rep.distance) {
        json r = json::array();
        for (double d : row) r.push_back(jnum(d));
        dist.push_back(r);
    }
    json succ = json::array();
    for (double d : rep.successive_k_distance) succ.push_back(jnum(d));
    json ifs = json::array();
    for (std::size_t ik = 0; ik < rep.interfaces.size(); ++ik) {
        const VacuumInterface& vi = rep.interfaces[ik];
        ifs.push_back(json{{"k", rep.k_list[ik]},
                           {"a", vi.a},
                           {"t", vi.t},
                           {"r_inner_by_a", vi.r_by_a},
                           {"underline_r", vi.r_under},
                           {"C0", vi.C0},
                           {"bounded_by_C0", vi.bounded_by_C0},
                           {"small_t_decrease", vi.small_t_decrease},
                           {"min_interior_density", vi.rho_min}});
    }
    return json{{"a_list", rep.a_list},
                {"k_list", rep.k_list},
                {"complete", rep.complete},
                {"runs", runs},
                {"distance", dist},
                {"successive_k_distance", succ},
                {"vacuum_interface", ifs}};
}

/// family.json and paths.csv at the top, one subdirectory per (a, k) with the run files.
inline auto emit_family(const FamilyReport& rep, const RunConfig& cfg, const fs::path& dir) -> void {
    preflight_output(dir);
    std::vector<std::string> files;
    for (const auto& run : rep.runs) {
        const fs::path sub = dir / run_dir_name(run.summary.a, run.summary.k);
        preflight_output(sub);
        RunArtifacts art;
        art.data = run.data;
        art.traj = run.traj;
        art.C0 = run.summary.C0;
        art.complete = run.summary.complete;
        art.abort_reason = run.summary.abort_reason;
        art.monitors = {run.summary.entropy, run.summary.path, run.summary.envelope, run.summary.mean_value};
        for (const auto& f : write_run_files(sub, art, cfg)) files.push_back(run_dir_name(run.summary.a, run.summary.k) + "/" + f);
    }
    write_text(dir / "family.json", family_json(rep).dump(2) + "\n");
    write_text(dir / "paths.csv", paths_csv(rep));
    files.emplace_back("family.json");
    files.emplace_back("paths.csv");
    write_manifest(dir, cfg, files, json{{"kind", "family"}});
}

// ---------------------------------------------------------------------------
// Weak-form convergence study
// ---------------------------------------------------------------------------

struct WeakStudy {
    std::vector<int> N;
    std::vector<WeakRow> rows;
    // per identity: max residual over the catalog at each N, and observed orders
    std::map<std::string, std::vector<double>> max_residual;
    std::map<std::string, std::vector<double>> order;
};

inline auto weak_form_study(const RunConfig& cfg, const RadialData& base, int workers = 1) -> WeakStudy {
    WeakStudy st;
    st.N = cfg.weak_N;
    std::sort(st.N.begin(), st.N.end());
    std::vector<std::vector<WeakRow>> tables(st.N.size());
    parallel_for(st.N.size(), workers, [&](std::size_t i) {
        SolverConfig sc = cfg.solver;
        sc.N = st.N[i];
        sc.keep_all_steps = true;
        sc.mode = MonitorMode::Exploratory;
        const LagrangianData d = build_lagrangian(base, cfg.a, cfg.k, sc.N, cfg.params.n);
        const Trajectory tr = run(d.to_state(), cfg.params, sc);
        const auto cat = standard_catalog(cfg.a, tr.states.front().r_edge(), sc.T);
        tables[i] = weak_residual_table(tr, cat, cfg.weak_points_per_cell * sc.N + 1);
    });
    for (const auto& t : tables) st.rows.insert(st.rows.end(), t.begin(), t.end());
    for (WeakEq eq : {WeakEq::Continuity, WeakEq::Momentum, WeakEq::Energy}) {
        std::vector<double> mx;
        for (const auto& t : tables) {
            double m = 0.0;
            for (const auto& r : t)
                if (r.eq == eq) m = std::max(m, r.residual);
            mx.push_back(m);
        }
        std::vector<double> ord;
        for (std::size_t i = 0; i + 1 < mx.size(); ++i)
            ord.push_back(std::log(mx[i] / mx[i + 1]) / std::log(static_cast<double>(st.N[i + 1]) / st.N[i]));
        st.max_residual[to_string(eq)] = mx;
        st.order[to_string(eq)] = ord;
    }
    return st;
}

inline auto weak_csv(const WeakStudy& st) -> std::string {
    std::ostringstream os;
    os << "eq,phi_id,N,residual\n";
    for (const auto& r : st.rows) os << to_string(r.eq) << ',' << r.phi_id << ',' << r.N << ',' << fmt(r.residual) << '\n';
    return os.str();
}

inline auto emit_weak(const WeakStudy& st, const RunConfig& cfg, const fs::path& dir) -> void {
    preflight_output(dir);
    write_text(dir / "weakform.csv", weak_csv(st));
    json j{{"N", st.N}};
    for (const auto& [eq, mx] : st.max_residual) {
        json o = json::array();
        for (double x : st.order.at(eq)) o.push_back(jnum(x));
        j["identities"][eq] = json{{"max_residual", mx}, {"observed_order", o}};
    }
    write_text(dir / "weakform.json", j.dump(2) + "\n");
    write_manifest(dir, cfg, {"weakform.csv", "weakform.json"}, json{{"kind", "weakform"}});
}

}  // namespace radns
