// Configuration-driven front end: every command resolves a flat key/value
// config (file < --set < flags), validates it against its own key registry,
// stamps the resolved config and its hash on every artifact, and reports
// through the exit code: 0 clean, 2 scientific failure (non-convergence or a
// violated bound), 1 usage or I/O trouble.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vlab/config.hpp"
#include "vlab/diagnostics.hpp"
#include "vlab/io.hpp"
#include "vlab/modulus.hpp"
#include "vlab/pointwise.hpp"
#include "vlab/solver.hpp"
#include "vlab/stability.hpp"
#include "vlab/twist.hpp"
#include "vlab/vorticity.hpp"

namespace {

using namespace vlab;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// one subcommand flag bound to a config key; flags outrank --set and the file
struct OptBind {
    CLI::Option* opt = nullptr;
    std::string key;
    const std::string* value = nullptr;
};

struct GlobalArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string seed_text;
    std::string out_dir;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

struct RunContext {
    Settings cfg; // resolved, defaults filled, 'out' stripped
    std::string out;
    std::uint64_t seed = 0;
    ArtifactMeta meta;
};

void ensure(Settings& c, const std::string& key, const std::string& value)
{
    if (!c.has(key))
        c.kv[key] = value;
}

void ensure_solver(Settings& c)
{
    ensure(c, "solver.dt", "1e-3");
    ensure(c, "solver.t_end", "1");
    ensure(c, "solver.delta", "-1");
    ensure(c, "solver.tol", "1e-8");
    ensure(c, "solver.max_iter", "40");
    ensure(c, "solver.integrator", "rk4");
}

void ensure_theta(Settings& c)
{
    ensure(c, "theta", "constant");
    ensure(c, "theta.c0", "1000");
    const std::string kind = c.get("theta", "constant");
    if (kind == "constant")
        ensure(c, "theta.amplitude", "1");
    else if (kind == "powerlog")
        ensure(c, "theta.alpha", "0.5");
}

const std::vector<std::string> kSolverKeys = {"solver.dt",  "solver.t_end",
                                              "solver.delta", "solver.tol",
                                              "solver.max_iter", "solver.integrator"};
const std::vector<std::string> kThetaKeys = {"theta", "theta.c0", "theta.amplitude",
                                             "theta.alpha"};

void ensure_stability(Settings& c)
{
    ensure_solver(c);
    ensure_theta(c);
    ensure(c, "stability.grid_n", "24");
    ensure(c, "stability.p", "4");
    ensure(c, "stability.stride", "1");
}

void defaults_simulate(Settings& c)
{
    ensure(c, "spec", "corotating-pair");
    ensure(c, "grid_n", "24");
    ensure(c, "write.binary", "true");
    ensure(c, "write.stride", "0");
    ensure_solver(c);
}

void defaults_picard(Settings& c)
{
    ensure(c, "spec", "zero");
    ensure(c, "grid_n", "24");
    ensure(c, "write.binary", "true");
    ensure(c, "write.stride", "0");
    ensure_solver(c);
}

void defaults_kernel_audit(Settings& c)
{
    ensure(c, "domain", "plane");
    ensure(c, "samples", "20000");
    if (c.get("domain", "plane") == "torus")
        ensure(c, "domain.period", "1");
}

void defaults_modulus(Settings& c)
{
    ensure(c, "r", "1e-4");
    ensure_theta(c);
    if (c.has("audit")) {
        ensure(c, "audit.m", "1e-2,1e-3,1e-4");
        ensure(c, "audit.cap", "20");
    }
}

void defaults_stability(Settings& c)
{
    ensure(c, "spec", "patch");
    ensure(c, "perturbation", "perturbation-patch");
    ensure(c, "perturbation.amplitude", "1");
    ensure(c, "eps", "1e-2,1e-3,1e-4,1e-5");
    ensure_stability(c);
}

void defaults_domain_compare(Settings& c)
{
    ensure(c, "spec", "gaussian");
    const VorticitySpec spec = builtin_vorticity(c.get("spec", "gaussian"));
    ensure(c, "twist",
           spec.domain.kind == DomainKind::Torus ? "torus-shear" : "disk-twist");
    ensure(c, "eps", "1e-2,1e-3,1e-4");
    ensure_stability(c);
}

void defaults_time_audit(Settings& c)
{
    ensure(c, "spec", "single-vortex-tracers");
    ensure(c, "grid_n", "24");
    ensure_solver(c);
    ensure_theta(c);
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

SolverConfig solver_from(const Settings& c)
{
    SolverConfig s;
    s.dt = c.get_double("solver.dt", s.dt);
    s.t_end = c.get_double("solver.t_end", s.t_end);
    s.delta = c.get_double("solver.delta", s.delta);
    s.picard_tol = c.get_double("solver.tol", s.picard_tol);
    s.picard_max_iter = c.get_int("solver.max_iter", s.picard_max_iter);
    const std::string integ = c.get("solver.integrator", "rk4");
    if (integ == "rk4")
        s.integrator = Integrator::RK4;
    else if (integ == "euler")
        s.integrator = Integrator::Euler;
    else
        throw std::invalid_argument("unknown integrator '" + integ + "' (expected rk4|euler)");
    return s;
}

ThetaProfile theta_from(const Settings& c)
{
    const std::string kind = c.get("theta", "constant");
    const double c0 = c.get_double("theta.c0", 1000.0);
    if (kind == "constant")
        return ThetaProfile::constant(c.get_double("theta.amplitude", 1.0), c0);
    if (kind == "powerlog")
        return ThetaProfile::powerlog(c.get_double("theta.alpha", 0.5), c0);
    if (kind == "linear")
        return ThetaProfile::linear(c0);
    throw std::invalid_argument("unknown theta '" + kind +
                                "' (expected constant|powerlog|linear)");
}

// file < --set < flags; then the command's own defaults fill the gaps, so the
// embedded config and its hash name the complete effective run
RunContext resolve(const GlobalArgs& g, const std::vector<OptBind>& binds,
                   const std::vector<std::string>& allowed, const std::string& command,
                   void (*defaults)(Settings&))
{
    Settings cfg;
    if (!g.config_path.empty())
        cfg = load_config_file(g.config_path);
    for (const auto& ov : g.overrides)
        apply_override(cfg, ov);
    for (const auto& b : binds)
        if (b.opt->count() > 0)
            cfg.set(b.key, *b.value);
    if (g.seed_opt->count() > 0)
        cfg.set("seed", g.seed_text);
    if (g.out_opt->count() > 0)
        cfg.set("out", g.out_dir);
    ensure(cfg, "seed", "0");
    if (defaults)
        defaults(cfg);

    RunContext ctx;
    ctx.out = cfg.get("out", "");
    cfg.kv.erase("out"); // plumbing, not part of the run identity
    require_known_keys(cfg, cat(allowed, {"seed"}), "command '" + command + "'");
    ctx.seed = static_cast<std::uint64_t>(cfg.get_double("seed", 0.0));
    ctx.cfg = cfg;
    ctx.meta.version = kVersion;
    ctx.meta.config_hash = cfg.hash();
    ctx.meta.seed = ctx.seed;
    ctx.meta.config = cfg;
    if (!ctx.out.empty())
        std::filesystem::create_directories(ctx.out);
    return ctx;
}

std::string artifact(const RunContext& ctx, const std::string& name)
{
    return (std::filesystem::path(ctx.out) / name).string();
}

json meta_json(const ArtifactMeta& meta)
{
    json j;
    j["tool"] = meta.tool + " " + meta.version;
    j["config_hash"] = hex64(meta.config_hash);
    j["seed"] = meta.seed;
    j["generated"] = utc_now();
    return j;
}

json config_json(const Settings& cfg)
{
    json j = json::object();
    for (const auto& [k, v] : cfg.kv)
        j[k] = v;
    return j;
}

void write_summary(const RunContext& ctx, json payload)
{
    payload["meta"] = meta_json(ctx.meta);
    payload["config"] = config_json(ctx.cfg);
    atomic_write_text(artifact(ctx, "summary.json"), payload.dump(2) + "\n");
}

ParticleFlow builtin_flow(const std::string& name, int grid_n)
{
    ParticleFlow flow = discretize(builtin_vorticity(name), grid_n);
    flow.add_tracers(builtin_tracers(name));
    return flow;
}

double final_displacement(const Trajectory& traj)
{
    double d = 0.0;
    const Vec2* a = traj.frame(0);
    const Vec2* b = traj.frame(traj.steps);
    for (std::size_t i = 0; i < traj.n; ++i)
        d = std::max(d, norm(b[i] - a[i]));
    return d;
}

json alpha_json(const StabilityReport& rep)
{
    json arr = json::array();
    for (const auto& a : rep.alpha)
        arr.push_back({{"t", a.t}, {"alpha", a.alpha}, {"se", a.se}, {"points", a.points}});
    return arr;
}

json stability_json(const StabilityReport& rep)
{
    json j;
    j["converged"] = rep.converged;
    j["all_pass"] = rep.all_pass;
    j["envelope_c"] = rep.envelope_c;
    j["envelope_found"] = rep.envelope_found;
    j["envelope_cap"] = rep.envelope_cap;
    j["eps"] = rep.eps_list;
    j["alpha"] = alpha_json(rep);
    j["base_norm"] = rep.base_norm;
    j["base_norm_linf"] = rep.base_norm_linf;
    j["p"] = rep.p;
    j["grid_n"] = rep.grid_n;
    return j;
}

// ---- commands -------------------------------------------------------------

int run_simulate(const RunContext& ctx)
{
    const std::string name = ctx.cfg.get("spec", "corotating-pair");
    const int grid_n = ctx.cfg.get_int("grid_n", 24);
    const SolverConfig scfg = solver_from(ctx.cfg);
    const ParticleFlow flow = builtin_flow(name, grid_n);

    const Trajectory traj = direct_solve(flow, scfg);
    const double drift = final_displacement(traj);

    std::cout << "simulate: spec '" << name << "', " << traj.n << " particles, "
              << traj.steps << " steps, t_end " << format_double(traj.t_end) << "\n";
    std::cout << "simulate: final displacement " << format_double(drift)
              << ", circulation " << format_double(flow.circulation()) << "\n";

    if (!ctx.out.empty()) {
        write_trajectory_csv(artifact(ctx, "trajectory.csv"), traj, ctx.meta,
                             static_cast<std::size_t>(ctx.cfg.get_int("write.stride", 0)));
        if (ctx.cfg.get_bool("write.binary", true))
            write_trajectory_binary(artifact(ctx, "trajectory.bin"), traj);
        json j;
        j["command"] = "simulate";
        j["spec"] = name;
        j["n"] = traj.n;
        j["steps"] = traj.steps;
        j["t_end"] = traj.t_end;
        j["circulation"] = flow.circulation();
        j["covered_area"] = flow.covered_area();
        j["projections"] = traj.projections;
        j["final_displacement"] = drift;
        write_summary(ctx, j);
    }
    return 0;
}

int run_picard(const RunContext& ctx)
{
    const std::string name = ctx.cfg.get("spec", "zero");
    const int grid_n = ctx.cfg.get_int("grid_n", 24);
    const SolverConfig scfg = solver_from(ctx.cfg);
    const ParticleFlow flow = builtin_flow(name, grid_n);

    const PicardResult res = picard_solve(flow, scfg);
    const double last = res.residuals.empty() ? 0.0 : res.residuals.back();

    std::cout << "picard: spec '" << name << "', " << res.traj.n << " particles, "
              << res.traj.steps << " steps\n";
    if (res.converged)
        std::cout << "picard: converged in " << res.iterations
                  << " iteration(s), final residual " << format_double(last) << "\n";
    else
        std::cout << "picard: NOT converged after " << res.iterations
                  << " iteration(s), final residual " << format_double(last) << "\n";

    if (!ctx.out.empty()) {
        write_trajectory_csv(artifact(ctx, "trajectory.csv"), res.traj, ctx.meta,
                             static_cast<std::size_t>(ctx.cfg.get_int("write.stride", 0)));
        if (ctx.cfg.get_bool("write.binary", true))
            write_trajectory_binary(artifact(ctx, "trajectory.bin"), res.traj);
        write_residuals_csv(artifact(ctx, "residuals.csv"), res.residuals, ctx.meta);
        json j;
        j["command"] = "picard";
        j["spec"] = name;
        j["n"] = res.traj.n;
        j["steps"] = res.traj.steps;
        j["iterations"] = res.iterations;
        j["converged"] = res.converged;
        j["monotone"] = res.monotone;
        j["residuals"] = res.residuals;
        write_summary(ctx, j);
    }
    return res.converged ? 0 : 2;
}

int run_kernel_audit(const RunContext& ctx)
{
    Domain dom = domain_from_name(ctx.cfg.get("domain", "plane"));
    dom.period = ctx.cfg.get_double("domain.period", dom.period);
    dom.validate();
    const int samples = ctx.cfg.get_int("samples", 20000);

    const KernelAuditReport rep = kernel_bound_audit(dom, samples, ctx.seed);
    const double two_pi_c1 = 2.0 * 3.14159265358979323846 * rep.C1_fit;

    std::cout << "kernel-audit: domain " << dom.name() << ", " << samples
              << " samples, seed " << ctx.seed << "\n";
    std::cout << "kernel-audit: C1_fit " << format_double(rep.C1_fit) << " (2*pi*C1 = "
              << format_double(two_pi_c1) << "), C2_fit " << format_double(rep.C2_fit)
              << ", violations " << rep.violations << "\n";

    if (!ctx.out.empty()) {
        write_kernel_audit_csv(artifact(ctx, "kernel-audit.csv"), rep, ctx.meta);
        json j;
        j["command"] = "kernel-audit";
        j["domain"] = dom.name();
        j["samples"] = samples;
        j["c1_fit"] = rep.C1_fit;
        j["c1_times_2pi"] = two_pi_c1;
        j["c2_fit"] = rep.C2_fit;
        j["violations"] = rep.violations;
        write_summary(ctx, j);
    }
    return rep.violations == 0 ? 0 : 2;
}

int run_modulus(const RunContext& ctx)
{
    const ThetaProfile theta = theta_from(ctx.cfg);
    const double r = ctx.cfg.get_double("r", 1e-4);
    if (!(r > 0.0))
        throw std::invalid_argument("modulus: r must be positive");

    const double mu_r = mu(r, theta);
    const double m_r = big_m(r, theta);
    const double nu_r = nu(r, theta);

    std::cout << "theta " << theta.name() << ", c0 = " << format_double(theta.c0) << "\n";
    if (!theta.osgood())
        std::cout << "warning: theta '" << theta.name()
                  << "' is not Osgood; big_m stays bounded as r -> 0\n";
    std::cout << "mu(" << format_double(r) << ") = " << format_double(mu_r) << "\n";
    std::cout << "big_m(" << format_double(r) << ") = " << format_double(m_r) << "\n";
    std::cout << "nu(" << format_double(r) << ") = " << format_double(nu_r) << "\n";

    json audit_j;
    int rc = 0;
    const std::string audit_spec = ctx.cfg.get("audit", "");
    if (!audit_spec.empty()) {
        const VorticitySpec spec = builtin_vorticity(audit_spec);
        const std::vector<double> m_list =
            ctx.cfg.get_list("audit.m", {1e-2, 1e-3, 1e-4});
        const double cap = ctx.cfg.get_double("audit.cap", 20.0);
        const PointwiseAuditReport rep =
            pointwise_scaling_audit(spec.domain, spec, theta, m_list, cap);
        std::cout << "pointwise audit: spec '" << audit_spec << "', max ratio "
                  << format_double(rep.max_ratio) << " (cap " << format_double(cap)
                  << "), " << (rep.pass ? "pass" : "FAIL") << "\n";
        if (!ctx.out.empty())
            write_pointwise_audit_csv(artifact(ctx, "pointwise.csv"), rep, ctx.meta);
        audit_j["spec"] = audit_spec;
        audit_j["max_ratio"] = rep.max_ratio;
        audit_j["ratio_cap"] = rep.ratio_cap;
        audit_j["ynorm"] = rep.ynorm_value;
        audit_j["l1"] = rep.l1;
        audit_j["pass"] = rep.pass;
        rc = rep.pass ? 0 : 2;
    }

    if (!ctx.out.empty()) {
        const ModulusKit kit(theta);
        std::vector<double> rs, mus, ms, nus;
        const int rows = 200;
        const double lo = std::log(kit.r_min()), hi = std::log(kit.mu_star());
        for (int i = 0; i < rows; ++i) {
            const double rr = std::exp(lo + (hi - lo) * i / (rows - 1));
            rs.push_back(rr);
            mus.push_back(kit.mu(rr));
            ms.push_back(kit.big_m(rr));
            nus.push_back(kit.nu(rr));
        }
        write_modulus_table_csv(artifact(ctx, "modulus.csv"), rs, mus, ms, nus, ctx.meta);
        json j;
        j["command"] = "modulus";
        j["theta"] = theta.name();
        j["c0"] = theta.c0;
        j["osgood"] = theta.osgood();
        j["r"] = r;
        j["mu"] = mu_r;
        j["big_m"] = m_r;
        j["nu"] = nu_r;
        j["mu_star"] = kit.mu_star();
        if (!audit_j.is_null())
            j["audit"] = audit_j;
        write_summary(ctx, j);
    }
    return rc;
}

StabilityConfig stability_config(const Settings& cfg)
{
    StabilityConfig sc;
    sc.solver = solver_from(cfg);
    sc.grid_n = cfg.get_int("stability.grid_n", sc.grid_n);
    sc.p = cfg.get_double("stability.p", sc.p);
    sc.report_stride = cfg.get_int("stability.stride", sc.report_stride);
    return sc;
}

int run_stability(const RunContext& ctx)
{
    const std::string base_name = ctx.cfg.get("spec", "patch");
    const std::string pert_name = ctx.cfg.get("perturbation", "perturbation-patch");
    const double pert_amp = ctx.cfg.get_double("perturbation.amplitude", 1.0);
    const std::vector<double> eps = ctx.cfg.get_list("eps", {1e-2, 1e-3, 1e-4, 1e-5});
    const ThetaProfile theta = theta_from(ctx.cfg);
    const StabilityConfig scfg = stability_config(ctx.cfg);

    const StabilityReport rep = data_dependence_experiment(
        builtin_vorticity(base_name), builtin_vorticity(pert_name).scaled(pert_amp), eps,
        scfg, theta);

    std::cout << "stability: base '" << base_name << "' + eps * '" << pert_name << "', "
              << eps.size() << " eps values, grid " << scfg.grid_n << "\n";
    std::cout << "stability: converged " << (rep.converged ? "yes" : "NO")
              << ", envelope C = " << format_double(rep.envelope_c) << " (cap "
              << format_double(rep.envelope_cap) << ", "
              << (rep.envelope_found ? "found" : "NOT FOUND") << "), cells "
              << (rep.all_pass ? "pass" : "FAIL") << "\n";
    if (!rep.alpha.empty())
        std::cout << "stability: alpha " << format_double(rep.alpha.front().alpha)
                  << " (t = " << format_double(rep.alpha.front().t) << ") -> "
                  << format_double(rep.alpha.back().alpha) << " (t = "
                  << format_double(rep.alpha.back().t) << ")\n";

    if (!ctx.out.empty()) {
        write_stability_csv(artifact(ctx, "stability.csv"), rep, ctx.meta);
        json j = stability_json(rep);
        j["command"] = "stability";
        j["spec"] = base_name;
        j["perturbation"] = pert_name;
        j["pert_norm"] = rep.pert_norm;
        j["pert_norm_linf"] = rep.pert_norm_linf;
        write_summary(ctx, j);
    }
    return rep.converged && rep.envelope_found && rep.all_pass ? 0 : 2;
}

int run_domain_compare(const RunContext& ctx)
{
    const std::string spec_name = ctx.cfg.get("spec", "gaussian");
    const VorticitySpec spec = builtin_vorticity(spec_name);
    const std::string twist_name = ctx.cfg.get("twist", "disk-twist");
    if (twist_name != "disk-twist" && twist_name != "torus-shear")
        throw std::invalid_argument("unknown twist '" + twist_name +
                                    "' (expected disk-twist|torus-shear)");
    const TwistMap twist = twist_name == "disk-twist"
                               ? TwistMap::disk_twist(1.0)
                               : TwistMap::torus_shear(1.0, spec.domain.period);
    const std::vector<double> eps = ctx.cfg.get_list("eps", {1e-2, 1e-3, 1e-4});
    const ThetaProfile theta = theta_from(ctx.cfg);
    const StabilityConfig scfg = stability_config(ctx.cfg);

    const StabilityReport rep = domain_dependence_experiment(spec, twist, eps, scfg, theta);

    std::cout << "domain-compare: spec '" << spec_name << "' vs '" << twist_name
              << "', " << eps.size() << " eps values, grid " << scfg.grid_n << "\n";
    std::cout << "domain-compare: converged " << (rep.converged ? "yes" : "NO")
              << ", C1 = " << format_double(rep.envelope_c) << " ("
              << (rep.envelope_found ? "found" : "NOT FOUND") << "), C2 = "
              << format_double(rep.forcing_c) << ", cells "
              << (rep.all_pass ? "pass" : "FAIL") << "\n";

    if (!ctx.out.empty()) {
        write_stability_csv(artifact(ctx, "domain-compare.csv"), rep, ctx.meta);
        json j = stability_json(rep);
        j["command"] = "domain-compare";
        j["spec"] = spec_name;
        j["twist"] = twist_name;
        j["forcing_c"] = rep.forcing_c;
        j["forcing"] = rep.forcing;
        j["forcing_c2"] = rep.forcing_c2;
        write_summary(ctx, j);
    }
    return rep.converged && rep.envelope_found && rep.all_pass ? 0 : 2;
}

int run_time_audit(const RunContext& ctx)
{
    const std::string name = ctx.cfg.get("spec", "single-vortex-tracers");
    const int grid_n = ctx.cfg.get_int("grid_n", 24);
    const ThetaProfile theta = theta_from(ctx.cfg);
    const SolverConfig scfg = solver_from(ctx.cfg);
    const ParticleFlow flow = builtin_flow(name, grid_n);

    const PicardResult res = picard_solve(flow, scfg);
    if (!res.converged) {
        std::cout << "time-audit: picard NOT converged after " << res.iterations
                  << " iteration(s)\n";
        if (!ctx.out.empty()) {
            json j;
            j["command"] = "time-audit";
            j["spec"] = name;
            j["converged"] = false;
            write_summary(ctx, j);
        }
        return 2;
    }

    const double omega_norm = flow_norm_l1y(flow, theta);
    const TimeContinuityReport rep = time_continuity_audit(res.traj, omega_norm, theta);

    std::cout << "time-audit: spec '" << name << "', omega_norm "
              << format_double(omega_norm) << "\n";
    std::cout << "time-audit: c1 = " << format_double(rep.c1) << ", c2 = "
              << format_double(rep.c2) << ", " << (rep.pass ? "pass" : "FAIL") << "\n";

    if (!ctx.out.empty()) {
        write_time_audit_csv(artifact(ctx, "time-audit.csv"), rep, ctx.meta);
        json j;
        j["command"] = "time-audit";
        j["spec"] = name;
        j["converged"] = true;
        j["omega_norm"] = omega_norm;
        j["c1"] = rep.c1;
        j["c2"] = rep.c2;
        j["pass"] = rep.pass;
        write_summary(ctx, j);
    }
    return rep.pass ? 0 : 2;
}

int run_list()
{
    std::cout << "specs:\n";
    for (const auto& name : builtin_names())
        std::cout << "  " << name << "\n";
    std::cout << "thetas:\n";
    std::cout << "  constant\n";
    std::cout << "  linear  [non-Osgood]\n";
    std::cout << "  powerlog(alpha)\n";
    std::cout << "twists:\n";
    std::cout << "  disk-twist\n";
    std::cout << "  torus-shear\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lagrangian vortex laboratory"};
    app.require_subcommand(1);

    GlobalArgs gl;
    app.add_option("--config", gl.config_path, "config file (key = value, or JSON)");
    app.add_option("--set", gl.overrides, "override key=value (repeatable)")->type_size(1);
    gl.seed_opt = app.add_option("--seed", gl.seed_text, "RNG seed");
    gl.out_opt = app.add_option("--out", gl.out_dir, "artifact directory (none: print only)");

    int rc = 0;

    struct Cmd {
        CLI::App* sub = nullptr;
        std::vector<OptBind> binds;
        std::vector<std::string> allowed;
    };
    std::vector<std::unique_ptr<std::string>> flag_store;
    auto bind = [&](Cmd& c, const std::string& flag, const std::string& key,
                    const std::string& help) {
        flag_store.push_back(std::make_unique<std::string>());
        std::string* slot = flag_store.back().get();
        c.binds.push_back({c.sub->add_option(flag, *slot, help), key, slot});
    };
    auto finish = [&](Cmd& c, void (*defaults)(Settings&), int (*runner)(const RunContext&)) {
        c.sub->fallthrough();
        c.sub->callback([&gl, &c, &rc, defaults, runner]() {
            rc = runner(resolve(gl, c.binds, c.allowed, c.sub->get_name(), defaults));
        });
    };

    Cmd simulate;
    simulate.sub = app.add_subcommand("simulate", "integrate the coupled dynamics");
    bind(simulate, "--spec", "spec", "builtin vorticity name");
    bind(simulate, "--grid", "grid_n", "cells per axis");
    bind(simulate, "--dt", "solver.dt", "time step");
    bind(simulate, "--tend", "solver.t_end", "final time");
    simulate.allowed = cat({"spec", "grid_n", "write.binary", "write.stride"}, kSolverKeys);
    finish(simulate, defaults_simulate, run_simulate);

    Cmd picard;
    picard.sub = app.add_subcommand("picard", "fixed-point iteration to the solution");
    bind(picard, "--spec", "spec", "builtin vorticity name");
    bind(picard, "--grid", "grid_n", "cells per axis");
    bind(picard, "--dt", "solver.dt", "time step");
    bind(picard, "--tend", "solver.t_end", "final time");
    bind(picard, "--tol", "solver.tol", "sup-distance tolerance");
    bind(picard, "--max-iter", "solver.max_iter", "iteration cap");
    picard.allowed = cat({"spec", "grid_n", "write.binary", "write.stride"}, kSolverKeys);
    finish(picard, defaults_picard, run_picard);

    Cmd kaudit;
    kaudit.sub = app.add_subcommand("kernel-audit", "sampled kernel bound constants");
    bind(kaudit, "--domain", "domain", "plane|torus|disk");
    bind(kaudit, "--samples", "samples", "sample count");
    kaudit.allowed = {"domain", "domain.period", "samples"};
    finish(kaudit, defaults_kernel_audit, run_kernel_audit);

    Cmd modulus;
    modulus.sub = app.add_subcommand("modulus", "evaluate mu, big_m, nu at r");
    bind(modulus, "--theta", "theta", "constant|powerlog|linear");
    bind(modulus, "--r", "r", "evaluation point");
    bind(modulus, "--c0", "theta.c0", "modulus cutoff constant");
    bind(modulus, "--alpha", "theta.alpha", "powerlog exponent");
    bind(modulus, "--amplitude", "theta.amplitude", "constant theta amplitude");
    bind(modulus, "--audit", "audit", "also run the pointwise scaling audit on a builtin");
    modulus.allowed = cat({"r", "audit", "audit.m", "audit.cap"}, kThetaKeys);
    finish(modulus, defaults_modulus, run_modulus);

    const std::vector<std::string> stab_keys = {"stability.grid_n", "stability.p",
                                                "stability.stride", "eps"};

    Cmd stability;
    stability.sub = app.add_subcommand("stability", "paired-run dependence on the data");
    bind(stability, "--spec", "spec", "base builtin");
    bind(stability, "--perturbation", "perturbation", "perturbation builtin");
    bind(stability, "--eps", "eps", "comma list of perturbation sizes");
    bind(stability, "--grid", "stability.grid_n", "cells per axis");
    bind(stability, "--dt", "solver.dt", "time step");
    bind(stability, "--tend", "solver.t_end", "final time");
    stability.allowed = cat(cat(cat({"spec", "perturbation", "perturbation.amplitude"},
                                    stab_keys),
                                kSolverKeys),
                            kThetaKeys);
    finish(stability, defaults_stability, run_stability);

    Cmd domain;
    domain.sub = app.add_subcommand("domain-compare", "conjugated-run dependence on the domain");
    bind(domain, "--spec", "spec", "base builtin");
    bind(domain, "--twist", "twist", "disk-twist|torus-shear");
    bind(domain, "--eps", "eps", "comma list of twist sizes");
    bind(domain, "--grid", "stability.grid_n", "cells per axis");
    bind(domain, "--dt", "solver.dt", "time step");
    bind(domain, "--tend", "solver.t_end", "final time");
    domain.allowed = cat(cat(cat({"spec", "twist"}, stab_keys), kSolverKeys), kThetaKeys);
    finish(domain, defaults_domain_compare, run_domain_compare);

    Cmd taudit;
    taudit.sub = app.add_subcommand("time-audit", "flow distance to the identity vs the envelope");
    bind(taudit, "--spec", "spec", "builtin vorticity name");
    bind(taudit, "--grid", "grid_n", "cells per axis");
    bind(taudit, "--dt", "solver.dt", "time step");
    bind(taudit, "--tend", "solver.t_end", "final time");
    taudit.allowed = cat(cat({"spec", "grid_n"}, kSolverKeys), kThetaKeys);
    finish(taudit, defaults_time_audit, run_time_audit);

    CLI::App* list = app.add_subcommand("list", "builtin specs, thetas, twists");
    list->callback([&rc]() { rc = run_list(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
