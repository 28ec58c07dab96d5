#include "vlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "vlab/summation.hpp"

namespace vlab {
namespace {

constexpr double kDiskEdge = 1.0 - 1e-12;
constexpr double kEscapeTol = 1e-6; // radial overshoot we silently clip

using StageField = std::function<void(double, const std::vector<Vec2>&, std::vector<Vec2>&)>;

struct ClipStats {
    std::size_t projections = 0;
    std::size_t violations = 0;
};

void clip_to_disk(std::vector<Vec2>& pts, ClipStats& stats)
{
    for (auto& p : pts) {
        const double r = norm(p);
        if (r > 1.0) {
            if (r > 1.0 + kEscapeTol)
                ++stats.violations;
            ++stats.projections;
            p *= kDiskEdge / r;
        }
    }
}

Trajectory integrate(const ParticleFlow& base, const SolverConfig& cfg, const StageField& field)
{
    cfg.validate();
    Trajectory out;
    out.base = base;
    out.n = base.size();
    out.steps = cfg.step_count();
    out.dt = cfg.dt;
    out.t_end = cfg.t_end;
    out.data.resize(out.frames() * out.n);

    std::vector<Vec2> x = base.positions;
    std::copy(x.begin(), x.end(), out.frame(0));

    const bool disk = base.domain.kind == DomainKind::Disk;
    ClipStats stats;
    std::vector<Vec2> k1(out.n), k2(out.n), k3(out.n), k4(out.n), stage(out.n);

    for (std::size_t k = 0; k < out.steps; ++k) {
        const double t = cfg.time_at(k);
        const double h = cfg.step_size(k);
        if (cfg.integrator == Integrator::Euler) {
            field(t, x, k1);
            for (std::size_t i = 0; i < out.n; ++i)
                x[i] += h * k1[i];
        } else {
            field(t, x, k1);
            for (std::size_t i = 0; i < out.n; ++i)
                stage[i] = x[i] + 0.5 * h * k1[i];
            field(t + 0.5 * h, stage, k2);
            for (std::size_t i = 0; i < out.n; ++i)
                stage[i] = x[i] + 0.5 * h * k2[i];
            field(t + 0.5 * h, stage, k3);
            for (std::size_t i = 0; i < out.n; ++i)
                stage[i] = x[i] + h * k3[i];
            field(t + h, stage, k4);
            const double w = h / 6.0;
            for (std::size_t i = 0; i < out.n; ++i)
                x[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (disk)
            clip_to_disk(x, stats);
        std::copy(x.begin(), x.end(), out.frame(k + 1));
    }

    if (disk && stats.violations * 1000 > out.n * out.steps)
        throw std::runtime_error("integrate: flow left the disk on more than 0.1% of label steps");
    out.projections = stats.projections;
    return out;
}

// singular self-interaction is dropped for atoms; blob labels keep every term
std::vector<std::size_t> atom_exclusions(const ParticleFlow& flow)
{
    std::vector<std::size_t> ex(flow.size(), kNoExclude);
    for (std::size_t i = 0; i < flow.atom_count; ++i)
        ex[i] = i;
    return ex;
}

double effective_delta(const ParticleFlow& flow, const SolverConfig& cfg)
{
    return cfg.delta >= 0.0 ? cfg.delta : flow.params.delta;
}

// frame index and interpolation weight for time t on the frozen grid
std::pair<std::size_t, double> locate(const Trajectory& tr, double t)
{
    if (tr.steps == 0)
        return {0, 0.0};
    const double q = t / tr.dt;
    std::size_t k = 0;
    if (q > 0.0)
        k = std::min(static_cast<std::size_t>(q), tr.steps - 1);
    const double t0 = tr.time_at(k);
    const double t1 = tr.time_at(k + 1);
    double a = (t - t0) / (t1 - t0);
    a = std::min(1.0, std::max(0.0, a));
    return {k, a};
}

StageField frozen_field(const Trajectory& frozen, double delta,
                        std::vector<double> gamma, std::vector<std::size_t> excl,
                        bool exclude_by_index)
{
    auto sources = std::make_shared<std::vector<Vec2>>(frozen.n);
    return [&frozen, delta, gamma = std::move(gamma), excl = std::move(excl),
            exclude_by_index, sources](double t, const std::vector<Vec2>& pts,
                                       std::vector<Vec2>& vel) {
        const auto [k, a] = locate(frozen, t);
        const Vec2* lo = frozen.frame(k);
        const Vec2* hi = frozen.frame(std::min(k + 1, frozen.steps));
        for (std::size_t j = 0; j < frozen.n; ++j)
            (*sources)[j] = lerp(lo[j], hi[j], a);
        vel.resize(pts.size());
        induced_velocity(frozen.base.domain, delta, sources->data(), gamma.data(),
                         frozen.n, pts.data(),
                         exclude_by_index ? excl.data() : nullptr, pts.size(),
                         vel.data());
    };
}

} // namespace

void SolverConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("solver: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("solver: t_end must be nonnegative");
    if (!(picard_tol > 0.0))
        throw std::invalid_argument("solver: picard_tol must be positive");
    if (picard_max_iter < 1)
        throw std::invalid_argument("solver: picard_max_iter must be at least 1");
}

std::size_t SolverConfig::step_count() const
{
    const std::size_t full = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    const double rem = t_end - static_cast<double>(full) * dt;
    return rem > 1e-9 * dt ? full + 1 : full;
}

double SolverConfig::time_at(std::size_t k) const
{
    return std::min(static_cast<double>(k) * dt, t_end);
}

double SolverConfig::step_size(std::size_t k) const
{
    return time_at(k + 1) - time_at(k);
}

double Trajectory::time_at(std::size_t k) const
{
    return std::min(static_cast<double>(k) * dt, t_end);
}

Trajectory identity_trajectory(const ParticleFlow& flow, const SolverConfig& cfg)
{
    cfg.validate();
    Trajectory out;
    out.base = flow;
    out.n = flow.size();
    out.steps = cfg.step_count();
    out.dt = cfg.dt;
    out.t_end = cfg.t_end;
    out.data.resize(out.frames() * out.n);
    for (std::size_t k = 0; k < out.frames(); ++k)
        std::copy(flow.positions.begin(), flow.positions.end(), out.frame(k));
    return out;
}

Trajectory direct_solve(const ParticleFlow& flow, const SolverConfig& cfg)
{
    const double delta = effective_delta(flow, cfg);
    const std::vector<double> gamma = flow.gammas();
    const std::vector<std::size_t> excl = atom_exclusions(flow);
    const std::size_t n = flow.size();
    const Domain dom = flow.domain;
    StageField field = [&, n](double, const std::vector<Vec2>& pts, std::vector<Vec2>& vel) {
        vel.resize(n);
        induced_velocity(dom, delta, pts.data(), gamma.data(), n, pts.data(),
                         excl.data(), n, vel.data());
    };
    return integrate(flow, cfg, field);
}

Trajectory apply_solution_operator(const Trajectory& frozen, const SolverConfig& cfg)
{
    cfg.validate();
    if (frozen.steps != cfg.step_count() || std::abs(frozen.t_end - cfg.t_end) > 1e-12)
        throw std::invalid_argument("apply_solution_operator: frozen grid does not match config");
    const double delta = effective_delta(frozen.base, cfg);
    return integrate(frozen.base, cfg,
                     frozen_field(frozen, delta, frozen.base.gammas(),
                                  atom_exclusions(frozen.base), true));
}

std::vector<std::vector<Vec2>> apply_operator_to_points(const Trajectory& frozen,
                                                        const SolverConfig& cfg,
                                                        const std::vector<Vec2>& points)
{
    cfg.validate();
    if (frozen.steps != cfg.step_count() || std::abs(frozen.t_end - cfg.t_end) > 1e-12)
        throw std::invalid_argument("apply_operator_to_points: frozen grid does not match config");
    ParticleFlow passive;
    passive.domain = frozen.base.domain;
    passive.params = frozen.base.params;
    passive.labels = points;
    passive.positions = points;
    passive.weights.assign(points.size(), 0.0);
    passive.values.assign(points.size(), 0.0);

    const double delta = effective_delta(frozen.base, cfg);
    const Trajectory tr = integrate(passive, cfg,
                                    frozen_field(frozen, delta, frozen.base.gammas(),
                                                 {}, false));
    std::vector<std::vector<Vec2>> rows(tr.frames());
    for (std::size_t k = 0; k < tr.frames(); ++k)
        rows[k].assign(tr.frame(k), tr.frame(k) + tr.n);
    return rows;
}

PicardResult picard_solve(const ParticleFlow& flow, const SolverConfig& cfg)
{
    cfg.validate();
    PicardResult res;
    Trajectory prev = identity_trajectory(flow, cfg);
    for (int k = 1; k <= cfg.picard_max_iter; ++k) {
        Trajectory next = apply_solution_operator(prev, cfg);
        const double r = trajectory_distance(next, prev);
        res.residuals.push_back(r);
        res.iterations = k;
        prev = std::move(next);
        if (r < cfg.picard_tol) {
            res.converged = true;
            break;
        }
    }
    for (std::size_t i = 1; i < res.residuals.size(); ++i)
        if (res.residuals[i] > res.residuals[i - 1])
            res.monotone = false;
    res.traj = std::move(prev);
    return res;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b)
{
    if (a.n != b.n || a.steps != b.steps)
        throw std::invalid_argument("trajectory_distance: incompatible trajectories");
    double d = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        d = std::max(d, norm(a.data[i] - b.data[i]));
    return d;
}

} // namespace vlab
