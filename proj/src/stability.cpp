#include "vlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vlab/pointwise.hpp"
#include "vlab/rng.hpp"

namespace vlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// |.|_{L1 cap Lp} and |.|_{Linf} of a value column over the flow's cells;
// atoms enter l1 as |circulation|, tracers carry nothing.
struct NormPair {
    double l1lp = 0.0;
    double linf = 0.0;
};

NormPair weighted_norms(const ParticleFlow& flow, const std::vector<double>& vals,
                        double p)
{
    double l1 = 0.0, lpp = 0.0, linf = 0.0;
    for (std::size_t i = 0; i < flow.size(); ++i) {
        const double v = std::abs(vals[i]);
        if (i < flow.atom_count) {
            l1 += v;
            continue;
        }
        const double w = flow.weights[i];
        if (w <= 0.0)
            continue;
        l1 += w * v;
        lpp += w * std::pow(v, p);
        linf = std::max(linf, v);
    }
    const double lp = lpp > 0.0 ? std::pow(lpp, 1.0 / p) : 0.0;
    return {std::max(l1, lp), linf};
}

} // namespace

double flow_norm_l1y(const ParticleFlow& flow, const ThetaProfile& theta)
{
    double l1 = 0.0;
    std::vector<double> vals, wts;
    vals.reserve(flow.size());
    wts.reserve(flow.size());
    for (std::size_t i = 0; i < flow.size(); ++i) {
        const double w = i < flow.atom_count ? 1.0 : flow.weights[i];
        if (w <= 0.0)
            continue;
        l1 += w * std::abs(flow.values[i]);
        vals.push_back(flow.values[i]);
        wts.push_back(w);
    }
    if (vals.empty())
        return 0.0;
    return std::max(l1, ynorm(vals, wts, theta));
}

namespace {

double sup_distance(const Vec2* a, const Vec2* b, std::size_t n)
{
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, norm(a[i] - b[i]));
    return m;
}

// frame indices kept in the report: 0, stride, 2*stride, ..., last
std::vector<std::size_t> kept_frames(std::size_t frames, int stride)
{
    std::vector<std::size_t> kept;
    const std::size_t s = stride < 1 ? 1 : static_cast<std::size_t>(stride);
    for (std::size_t k = 0; k < frames; k += s)
        kept.push_back(k);
    if (kept.back() != frames - 1)
        kept.push_back(frames - 1);
    return kept;
}

struct SlopeFit {
    double slope = kNaN;
    double se = kNaN;
    int points = 0;
};

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
    SlopeFit f;
    f.points = static_cast<int>(xs.size());
    if (xs.size() < 2)
        return f;
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    f.slope = sxy / sxx;
    if (n > 2) {
        const double b = my - f.slope * mx;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - (f.slope * xs[i] + b);
            ss += r * r;
        }
        f.se = std::sqrt(ss / (static_cast<double>(n - 2) * sxx));
    } else {
        f.se = 0.0;
    }
    return f;
}

void validate_eps_list(const std::vector<double>& eps_list, std::size_t min_count)
{
    if (eps_list.size() < min_count)
        throw std::invalid_argument("stability: eps_list needs at least " +
                                    std::to_string(min_count) + " values");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (eps_list[i] < 0.0)
            throw std::invalid_argument("stability: eps must be >= 0");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("stability: eps_list must be strictly decreasing");
    }
}

// alpha(t): slope of ln d against ln eps over the cells still on the singular
// branch of the modulus
AlphaFit alpha_at(double t, const std::vector<double>& eps_list,
                  const std::vector<double>& drow, double knee)
{
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        if (eps_list[j] <= 0.0 || drow[j] <= 0.0 || drow[j] >= knee)
            continue;
        xs.push_back(std::log(eps_list[j]));
        ys.push_back(std::log(drow[j]));
    }
    const SlopeFit f = fit_slope(xs, ys);
    return {t, f.slope, f.se, f.points};
}

} // namespace

void StabilityConfig::validate() const
{
    solver.validate();
    if (grid_n < 4)
        throw std::invalid_argument("stability: grid_n must be >= 4");
    if (!(p > 2.0))
        throw std::invalid_argument("stability: norm exponent must exceed 2");
    if (report_stride < 1)
        throw std::invalid_argument("stability: report_stride must be >= 1");
}

StabilityReport data_dependence_experiment(const VorticitySpec& spec,
                                           const VorticitySpec& perturbation,
                                           const std::vector<double>& eps_list,
                                           const StabilityConfig& cfg,
                                           const ThetaProfile& theta)
{
    cfg.validate();
    theta.validate();
    validate_eps_list(eps_list, 4);
    if (!perturbation.all_atoms().empty())
        throw std::invalid_argument(
            "data dependence: perturbation must be atom-free (it may only "
            "rescale values on the shared grid)");

    const Domain dom = spec.domain;
    const VorticitySpec master =
        VorticitySpec::composite(dom, {spec, perturbation});
    const ParticleFlow proto = discretize(master, cfg.grid_n);

    StabilityReport rep;
    rep.eps_list = eps_list;
    rep.p = cfg.p;
    rep.grid_n = cfg.grid_n;

    const ParticleFlow base_flow = discretize_like(proto, spec);
    rep.base_norm = flow_norm_l1y(base_flow, theta);
    rep.base_norm_linf = weighted_norms(base_flow, base_flow.values, cfg.p).linf;
    {
        // unit-amplitude perturbation on the same grid; the spec part is
        // zeroed so atom counts still match
        const ParticleFlow pert_flow = discretize_like(
            proto, VorticitySpec::composite(dom, {spec.scaled(0.0), perturbation}));
        const NormPair np = weighted_norms(pert_flow, pert_flow.values, cfg.p);
        rep.pert_norm = np.l1lp;
        rep.pert_norm_linf = np.linf;
    }

    const PicardResult base = picard_solve(base_flow, cfg.solver);
    const std::size_t frames = base.traj.frames();
    const auto kept = kept_frames(frames, cfg.report_stride);
    rep.times.reserve(kept.size());
    for (std::size_t k : kept)
        rep.times.push_back(base.traj.time_at(k));
    rep.d.assign(kept.size(), std::vector<double>(eps_list.size(), kNaN));
    if (!base.converged) {
        rep.converged = false;
        return rep;
    }

    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        const VorticitySpec shifted = VorticitySpec::composite(
            dom, {spec, perturbation.scaled(eps_list[j])});
        const ParticleFlow flow_e = discretize_like(proto, shifted);
        const PicardResult pr = picard_solve(flow_e, cfg.solver);
        if (!pr.converged) {
            rep.converged = false;
            return rep;
        }
        for (std::size_t r = 0; r < kept.size(); ++r) {
            const std::size_t k = kept[r];
            rep.d[r][j] =
                sup_distance(base.traj.frame(k), pr.traj.frame(k), base.traj.n);
        }
    }

    const double knee = 1.0 / theta.c0;
    for (std::size_t r = 1; r < kept.size(); ++r)
        rep.alpha.push_back(alpha_at(rep.times[r], eps_list, rep.d[r], knee));

    const ModulusKit kit(theta);
    double eps_top = 0.0;
    for (double e : eps_list)
        eps_top = std::max(eps_top, e);

    if (rep.pert_norm <= 0.0 || eps_top <= 0.0) {
        // nothing was perturbed; any constant works
        rep.envelope_found = true;
        rep.envelope_c = 0.0;
        rep.envelope_cap = 0.0;
    } else {
        // beyond this constant the right-hand side's inner argument leaves
        // the modulus table at the largest eps and the bound goes vacuous
        rep.envelope_cap = kit.mu_star() / (eps_top * rep.pert_norm);
        const auto feasible = [&](double c) {
            for (std::size_t r = 0; r < kept.size(); ++r) {
                const double grow = std::exp(c * rep.times[r] * rep.base_norm);
                for (std::size_t j = 0; j < eps_list.size(); ++j) {
                    const double rhs =
                        grow * kit.nu(c * eps_list[j] * rep.pert_norm);
                    if (kit.nu(rep.d[r][j]) > rhs + 1e-12 + 1e-9 * rhs)
                        return false;
                }
            }
            return true;
        };
        if (feasible(0.0)) {
            rep.envelope_found = true;
            rep.envelope_c = 0.0;
        } else if (!feasible(rep.envelope_cap)) {
            rep.envelope_found = false;
            rep.envelope_c = kNaN;
        } else {
            double lo = 0.0, hi = rep.envelope_cap;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) ? hi : lo) = mid;
            }
            rep.envelope_found = true;
            rep.envelope_c = hi;
        }
    }

    rep.all_pass = rep.envelope_found;
    for (std::size_t r = 0; r < kept.size(); ++r) {
        for (std::size_t j = 0; j < eps_list.size(); ++j) {
            StabilityCell cell;
            cell.t = rep.times[r];
            cell.eps = eps_list[j];
            cell.d = rep.d[r][j];
            cell.nu_d = kit.nu(cell.d);
            if (rep.envelope_found) {
                cell.envelope = std::exp(rep.envelope_c * cell.t * rep.base_norm) *
                                kit.nu(rep.envelope_c * cell.eps * rep.pert_norm);
                cell.pass = cell.nu_d <= cell.envelope + 1e-12 + 1e-9 * cell.envelope;
            } else {
                cell.envelope = kNaN;
                cell.pass = false;
            }
            rep.all_pass = rep.all_pass && cell.pass;
            rep.cells.push_back(cell);
        }
    }
    return rep;
}

QuasiLipschitzReport quasi_lipschitz_probe(const Trajectory& x, const Trajectory& y,
                                           const ParticleFlow& omega0,
                                           const ParticleFlow& omega1,
                                           const ThetaProfile& theta,
                                           const SolverConfig& cfg, double p)
{
    theta.validate();
    if (x.n != y.n || x.steps != y.steps || x.t_end != y.t_end)
        throw std::invalid_argument("quasi-lipschitz: trajectories must share a grid");
    if (omega0.size() != x.n || omega1.size() != y.n ||
        omega0.atom_count != omega1.atom_count)
        throw std::invalid_argument("quasi-lipschitz: flows must live on the grid");

    const auto with_base = [](const Trajectory& t, const ParticleFlow& f) {
        Trajectory c = t;
        c.base = f;
        return c;
    };
    const Trajectory xt = apply_solution_operator(with_base(x, omega0), cfg);
    const Trajectory yt = apply_solution_operator(with_base(y, omega1), cfg);

    QuasiLipschitzReport rep;
    std::vector<double> dv(omega0.size());
    for (std::size_t i = 0; i < dv.size(); ++i)
        dv[i] = omega0.values[i] - omega1.values[i];
    rep.diff_norm = weighted_norms(omega0, dv, p).l1lp;
    rep.base_norm = flow_norm_l1y(omega0, theta);

    const double knee = 1.0 / theta.c0;
    const std::size_t frames = x.frames();
    rep.d_in.reserve(frames);
    rep.d_out.reserve(frames);
    for (std::size_t k = 0; k < frames; ++k) {
        rep.d_in.push_back(sup_distance(x.frame(k), y.frame(k), x.n));
        rep.d_out.push_back(sup_distance(xt.frame(k), yt.frame(k), x.n));
        if (rep.d_in.back() >= knee || rep.d_out.back() >= knee)
            rep.all_singular = false;
    }

    for (std::size_t k = 0; k + 1 < frames; ++k) {
        const double h = x.time_at(k + 1) - x.time_at(k);
        const double din = 0.5 * (rep.d_in[k] + rep.d_in[k + 1]);
        const double dout = 0.5 * (rep.d_out[k] + rep.d_out[k + 1]);
        const double dd = (rep.d_out[k + 1] - rep.d_out[k]) / h;
        const double unit =
            rep.diff_norm + rep.base_norm * (mu(din, theta) + mu(dout, theta));
        rep.times.push_back(x.time_at(k) + 0.5 * h);
        rep.deriv.push_back(dd);
        rep.rhs_unit.push_back(unit);
        rep.ratio.push_back(unit > 0.0 ? dd / unit : 0.0);
    }

    double top = 0.0;
    for (double r : rep.ratio)
        top = std::max(top, r);
    rep.fitted_c = top;
    if (!rep.ratio.empty()) {
        std::vector<double> sorted = rep.ratio;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size() / 2;
        rep.median_ratio = sorted.size() % 2 ? sorted[m]
                                             : 0.5 * (sorted[m - 1] + sorted[m]);
    }
    return rep;
}

StabilityReport domain_dependence_experiment(const VorticitySpec& spec,
                                             const TwistMap& twist,
                                             const std::vector<double>& eps_list,
                                             const StabilityConfig& cfg,
                                             const ThetaProfile& theta)
{
    cfg.validate();
    theta.validate();
    validate_eps_list(eps_list, 1);
    const Domain dom = spec.domain;
    if ((twist.kind == TwistMap::Kind::DiskTwist) != (dom.kind == DomainKind::Disk))
        throw std::invalid_argument("domain dependence: twist kind does not match the domain");
    if (twist.kind == TwistMap::Kind::TorusShear &&
        (dom.kind != DomainKind::Torus || twist.domain.period != dom.period))
        throw std::invalid_argument("domain dependence: twist kind does not match the domain");

    double eps_top = 0.0;
    for (double e : eps_list)
        eps_top = std::max(eps_top, e);

    // the map must be volume preserving before anything downstream makes sense
    {
        Rng rng = make_rng(424242);
        for (std::size_t s = 0; s < 1000; ++s) {
            Vec2 pt;
            if (dom.kind == DomainKind::Disk) {
                do {
                    pt = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
                } while (norm2(pt) >= 1.0);
            } else {
                pt = {uniform(rng, 0.0, dom.period), uniform(rng, 0.0, dom.period)};
            }
            const double det = twist.scaled_to(eps_top).jacobian_det(pt);
            if (std::abs(det - 1.0) > 1e-10)
                throw std::runtime_error("domain dependence: twist jacobian is not unit");
        }
    }

    StabilityReport rep;
    rep.eps_list = eps_list;
    rep.p = cfg.p;
    rep.grid_n = cfg.grid_n;
    for (double e : eps_list) {
        const TwistNorms nm = twist.scaled_to(e).norms();
        rep.forcing.push_back(nm.gradient_c1());
        rep.forcing_c2.push_back(nm.displacement_c2());
    }

    // one box for every run: the base support inflated by the largest map
    // displacement, so twisted supports never fall off the grid
    Vec2 lo{0.0, 0.0}, hi{0.0, 0.0};
    const bool have_box = spec.support_box(lo, hi);
    const auto atoms = spec.all_atoms();
    if (!have_box && atoms.empty())
        throw std::invalid_argument("domain dependence: spec has empty support");
    if (have_box && dom.kind != DomainKind::Torus) {
        const double pad = twist.scaled_to(eps_top).norms(128).c0;
        lo = lo - Vec2{pad, pad};
        hi = hi + Vec2{pad, pad};
    }

    const auto density0 = [&spec](const Vec2& x) { return spec.density(x); };
    const ParticleFlow flow0 =
        discretize_custom(density0, atoms, lo, hi, cfg.grid_n, dom);
    rep.base_norm = flow_norm_l1y(flow0, theta);
    rep.base_norm_linf = weighted_norms(flow0, flow0.values, cfg.p).linf;

    const PicardResult base = picard_solve(flow0, cfg.solver);
    const std::size_t frames = base.traj.frames();
    const auto kept = kept_frames(frames, cfg.report_stride);
    for (std::size_t k : kept)
        rep.times.push_back(base.traj.time_at(k));
    rep.d.assign(kept.size(), std::vector<double>(eps_list.size(), kNaN));
    if (!base.converged) {
        rep.converged = false;
        return rep;
    }

    // both sides of the comparison go through one extra operator application,
    // so the eps = 0 column cancels identically
    const std::vector<Vec2>& pts0 = flow0.positions;
    const auto ref = apply_operator_to_points(base.traj, cfg.solver, pts0);

    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        const TwistMap map = twist.scaled_to(eps_list[j]);
        const auto density_e = [&](const Vec2& x) {
            return spec.density(map.inverse(x));
        };
        std::vector<PointVortex> atoms_e = atoms;
        for (auto& a : atoms_e)
            a.position = map.apply(a.position);
        const ParticleFlow flow_e =
            discretize_custom(density_e, atoms_e, lo, hi, cfg.grid_n, dom);
        const PicardResult pr = picard_solve(flow_e, cfg.solver);
        if (!pr.converged) {
            rep.converged = false;
            return rep;
        }
        std::vector<Vec2> pts_e(pts0.size());
        for (std::size_t i = 0; i < pts0.size(); ++i)
            pts_e[i] = map.apply(pts0[i]);
        const auto moved = apply_operator_to_points(pr.traj, cfg.solver, pts_e);
        for (std::size_t r = 0; r < kept.size(); ++r) {
            const std::size_t k = kept[r];
            double m = 0.0;
            for (std::size_t i = 0; i < pts0.size(); ++i)
                m = std::max(m, norm(ref[k][i] - map.inverse(moved[k][i])));
            rep.d[r][j] = m;
        }
    }

    const double knee = 1.0 / theta.c0;
    for (std::size_t r = 1; r < kept.size(); ++r)
        rep.alpha.push_back(alpha_at(rep.times[r], eps_list, rep.d[r], knee));

    // forced Osgood envelope rho' = C1 |w0| mu(rho) + C2 eta, rho(0) = 0,
    // integrated on the kept time grid; C2 comes from the earliest growth,
    // C1 is the smallest value covering every cell
    const ModulusKit kit(theta);
    const auto envelope_rows = [&](double c1, double c2) {
        std::vector<std::vector<double>> rows(kept.size(),
                                              std::vector<double>(eps_list.size()));
        for (std::size_t j = 0; j < eps_list.size(); ++j) {
            const double eta = rep.forcing[j];
            double rho = 0.0;
            rows[0][j] = 0.0;
            for (std::size_t r = 1; r < kept.size(); ++r) {
                const double span = rep.times[r] - rep.times[r - 1];
                const int sub = 4;
                const double h = span / sub;
                for (int s = 0; s < sub; ++s) {
                    const auto f = [&](double v) {
                        return c1 * rep.base_norm * kit.mu(v) + c2 * eta;
                    };
                    const double k1 = f(rho);
                    const double k2 = f(rho + 0.5 * h * k1);
                    const double k3 = f(rho + 0.5 * h * k2);
                    const double k4 = f(rho + h * k3);
                    rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
                rows[r][j] = rho;
            }
        }
        return rows;
    };

    double c2 = 0.0;
    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        if (rep.forcing[j] <= 0.0)
            continue;
        for (std::size_t r = 1; r < kept.size(); ++r) {
            if (rep.d[r][j] > 0.0) {
                c2 = std::max(c2, rep.d[r][j] / (rep.forcing[j] * rep.times[r]));
                break;
            }
        }
    }
    c2 *= 1.05;
    rep.forcing_c = c2;

    const auto feasible = [&](double c1) {
        const auto rows = envelope_rows(c1, c2);
        for (std::size_t r = 0; r < kept.size(); ++r)
            for (std::size_t j = 0; j < eps_list.size(); ++j)
                if (rep.d[r][j] > rows[r][j] * (1.0 + 1e-9) + 1e-15)
                    return false;
        return true;
    };
    const double c1_cap = 1e6;
    if (feasible(0.0)) {
        rep.envelope_found = true;
        rep.envelope_c = 0.0;
    } else if (!feasible(c1_cap)) {
        rep.envelope_found = false;
        rep.envelope_c = kNaN;
    } else {
        double lo_c = 0.0, hi_c = c1_cap;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo_c + hi_c);
            (feasible(mid) ? hi_c : lo_c) = mid;
        }
        rep.envelope_found = true;
        rep.envelope_c = hi_c;
    }
    rep.envelope_cap = c1_cap;

    rep.all_pass = rep.envelope_found;
    const auto rows = rep.envelope_found
                          ? envelope_rows(rep.envelope_c, c2)
                          : std::vector<std::vector<double>>();
    for (std::size_t r = 0; r < kept.size(); ++r) {
        for (std::size_t j = 0; j < eps_list.size(); ++j) {
            StabilityCell cell;
            cell.t = rep.times[r];
            cell.eps = eps_list[j];
            cell.d = rep.d[r][j];
            cell.nu_d = kit.nu(cell.d);
            if (rep.envelope_found) {
                cell.envelope = rows[r][j];
                cell.pass = cell.d <= cell.envelope * (1.0 + 1e-9) + 1e-15;
            } else {
                cell.envelope = kNaN;
                cell.pass = false;
            }
            rep.all_pass = rep.all_pass && cell.pass;
            rep.cells.push_back(cell);
        }
    }
    return rep;
}

TimeContinuityReport time_continuity_audit(const Trajectory& traj, double omega_norm,
                                           const ThetaProfile& theta)
{
    theta.validate();
    if (omega_norm < 0.0)
        throw std::invalid_argument("time continuity: omega_norm must be >= 0");

    TimeContinuityReport rep;
    rep.omega_norm = omega_norm;
    const std::size_t frames = traj.frames();
    for (std::size_t k = 0; k < frames; ++k) {
        rep.times.push_back(traj.time_at(k));
        rep.dist.push_back(sup_distance(traj.frame(k), traj.frame(0), traj.n));
    }

    bool any = false;
    for (double v : rep.dist)
        any = any || v > 0.0;
    if (!any || omega_norm == 0.0) {
        rep.envelope.assign(frames, 0.0);
        rep.pass = !any;
        return rep;
    }

    // seed the envelope from a fixed fraction of the horizon -- anchoring at
    // the first frame would drag the fit with the step size -- with d <= C1
    // |w| t on the early window and the Osgood bound at rate C2 |w| after it
    const double t_anchor = 0.1 * rep.times.back();
    std::size_t k0 = 1;
    while (k0 + 1 < frames && rep.times[k0 + 1] <= t_anchor)
        ++k0;
    double slope = 0.0;
    for (std::size_t k = 1; k <= k0; ++k)
        if (rep.dist[k] > 0.0)
            slope = std::max(slope, rep.dist[k] / rep.times[k]);
    if (slope == 0.0) {
        while (k0 < frames - 1 && rep.dist[k0] <= 0.0)
            ++k0;
        slope = rep.dist[k0] / rep.times[k0];
    }
    const double t_small = rep.times[k0];
    rep.c1 = 1.05 * slope / omega_norm;

    const ModulusKit kit(theta);
    const double seed = rep.c1 * omega_norm * t_small;
    const auto envelope_at = [&](double c2, std::size_t k) {
        if (rep.times[k] <= t_small)
            return rep.c1 * omega_norm * rep.times[k];
        return kit.osgood_envelope(seed, c2 * omega_norm, rep.times[k] - t_small);
    };
    const auto feasible = [&](double c2) {
        for (std::size_t k = 0; k < frames; ++k)
            if (rep.dist[k] > envelope_at(c2, k) * (1.0 + 1e-9) + 1e-15)
                return false;
        return true;
    };

    const double cap = 1e6;
    if (feasible(0.0)) {
        rep.c2 = 0.0;
        rep.pass = true;
    } else if (!feasible(cap)) {
        rep.c2 = kNaN;
        rep.pass = false;
    } else {
        double lo = 0.0, hi = cap;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        rep.c2 = hi;
        rep.pass = true;
    }
    for (std::size_t k = 0; k < frames; ++k)
        rep.envelope.push_back(std::isnan(rep.c2) ? kNaN : envelope_at(rep.c2, k));
    return rep;
}

} // namespace vlab
