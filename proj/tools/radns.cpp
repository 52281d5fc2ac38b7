#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "radns/radns.hpp"

using namespace radns;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kAborted = 3;
constexpr int kMonitorFailed = 4;

struct Common {
    std::string config;
    std::string out;
    std::string mode;
    int workers = 1;
};

auto load(const Common& c) -> RunConfig {
    RunConfig cfg = parse_config(c.config);
    if (!c.out.empty()) cfg.out_dir = c.out;
    if (c.mode == "strict") cfg.solver.mode = MonitorMode::Strict;
    else if (c.mode == "exploratory") cfg.solver.mode = MonitorMode::Exploratory;
    return cfg;
}

void print_monitors(const std::vector<BoundCheck>& ms) {
    for (const auto& m : ms)
        std::printf("  %-24s %-6s %-4s margin=%s\n", m.name.c_str(), m.mode.c_str(), m.satisfied ? "ok" : "FAIL",
                    fmt(m.margin).c_str());
}

auto cmd_run(const Common& c) -> int {
    const RunConfig cfg = load(c);
    preflight_output(cfg.out_dir);
    const RadialData base = load_data(cfg);
    const RunArtifacts art = run_pipeline(cfg, base, cfg.a, cfg.k);
    emit_outputs(art, cfg, cfg.out_dir);
    std::printf("run a=%s k=%s N=%d C0=%s steps=%zu\n", fmt(cfg.a).c_str(), fmt(cfg.k).c_str(), cfg.solver.N,
                fmt(art.C0).c_str(), art.traj.dt_history.size());
    print_monitors(art.monitors);
    if (!art.complete) std::fprintf(stderr, "run stopped: %s\n", art.abort_reason.c_str());
    return art.exit_code;
}

auto cmd_family(const Common& c) -> int {
    RunConfig cfg = load(c);
    if (cfg.a_list.empty()) cfg.a_list = {cfg.a};
    if (cfg.k_list.empty()) cfg.k_list = {cfg.k};
    preflight_output(cfg.out_dir);
    const RadialData base = load_data(cfg);
    FamilyOptions opt;
    opt.workers = c.workers;
    opt.eps = cfg.eps;
    opt.dx_per_unit_k = cfg.family_dx;
    const FamilyReport rep = run_family(cfg.a_list, cfg.k_list, base, cfg.params, cfg.solver, opt);
    emit_family(rep, cfg, cfg.out_dir);
    bool failed = false;
    for (const auto& r : rep.runs) {
        const RunSummary& s = r.summary;
        std::printf("a=%s k=%s C0=%s complete=%d\n", fmt(s.a).c_str(), fmt(s.k).c_str(), fmt(s.C0).c_str(), s.complete);
        print_monitors({s.entropy, s.path, s.envelope, s.mean_value});
        for (const auto* b : {&s.entropy, &s.path, &s.envelope, &s.mean_value}) failed = failed || !b->satisfied;
    }
    for (const auto& vi : rep.interfaces) failed = failed || !vi.bounded_by_C0;
    if (!rep.complete) return kAborted;
    if (failed && cfg.solver.mode == MonitorMode::Strict) return kMonitorFailed;
    return kOk;
}

auto cmd_weak(const Common& c) -> int {
    const RunConfig cfg = load(c);
    preflight_output(cfg.out_dir);
    const RadialData base = load_data(cfg);
    const WeakStudy st = weak_form_study(cfg, base, c.workers);
    emit_weak(st, cfg, cfg.out_dir);
    for (const auto& [eq, mx] : st.max_residual) {
        std::printf("%-12s", eq.c_str());
        for (std::size_t i = 0; i < mx.size(); ++i) std::printf(" N=%d:%.3e", st.N[i], mx[i]);
        for (double o : st.order.at(eq)) std::printf(" order=%.2f", o);
        std::printf("\n");
    }
    return kOk;
}

auto parse_fn(const std::string& s) -> ConvexFn {
    if (s == "G") return ConvexFn::G;
    if (s == "psi") return ConvexFn::Psi;
    if (s == "H") return ConvexFn::H;
    throw ConfigError("--fn must be G, psi or H");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radially symmetric viscous gas: annular approximations and diagnostics"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool workers) {
        sub->add_option("--config", common.config, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output directory (overrides output.dir)");
        sub->add_option("--mode", common.mode, "monitor mode")->check(CLI::IsMember({"strict", "exploratory"}));
        if (workers) sub->add_option("--workers", common.workers, "concurrent runs")->check(CLI::PositiveNumber);
    };
    auto* run_cmd = app.add_subcommand("run", "single (a,k) run with monitors");
    add_common(run_cmd, false);
    auto* fam_cmd = app.add_subcommand("family", "(a,k) family with path diagnostics");
    add_common(fam_cmd, true);
    auto* weak_cmd = app.add_subcommand("check-weakform", "weak-form residual convergence study");
    add_common(weak_cmd, true);

    auto* sc = app.add_subcommand("scalars", "evaluate convex functions and their branch inverses");
    std::string fn = "psi", branch = "right";
    double y = 1.0, z = 1.0;
    bool inverse = false;
    sc->add_option("--fn", fn, "G, psi or H");
    sc->add_option("--branch", branch, "left or right")->check(CLI::IsMember({"left", "right"}));
    auto* y_opt = sc->add_option("--y", y, "value to invert");
    auto* z_opt = sc->add_option("--z", z, "argument to evaluate");
    sc->add_flag("--inverse", inverse, "print the branch inverse at y instead of the value at z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(common);
        if (*fam_cmd) return cmd_family(common);
        if (*weak_cmd) return cmd_weak(common);
        const ConvexFn f = parse_fn(fn);
        if (y_opt->count() > 0 && z_opt->count() == 0) inverse = true;
        if (inverse) std::printf("%.17g\n", branch_inverse(f, branch == "left" ? Branch::Left : Branch::Right, y));
        else std::printf("%.17g\n", convex_eval(f, z));
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kConfigError;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kConfigError;
    } catch (const RunAborted& e) {
        std::cerr << "run aborted: " << e.what() << "\n";
        return kAborted;
    } catch (const MonitorViolation& e) {
        std::cerr << "monitor violation: " << e.what() << "\n";
        return kMonitorFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAborted;
    }
}
