#pragma once

#include <cstddef>
#include <vector>

#include "vlab/particles.hpp"

namespace vlab {

enum class Integrator { RK4, Euler };

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double delta = -1.0; // < 0: use the flow's own blob scale
    double picard_tol = 1e-8;
    int picard_max_iter = 40;
    Integrator integrator = Integrator::RK4;

    void validate() const;
    // number of steps; the final one is shortened when dt does not divide t_end
    std::size_t step_count() const;
    double time_at(std::size_t k) const;
    double step_size(std::size_t k) const;
};

// Positions of every label at every step, plus the flow they belong to.
struct Trajectory {
    ParticleFlow base;
    std::vector<Vec2> data; // (steps + 1) frames, row-major
    std::size_t n = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t projections = 0; // boundary clips (disk runs only)

    std::size_t frames() const { return steps + 1; }
    const Vec2* frame(std::size_t k) const { return data.data() + k * n; }
    Vec2* frame(std::size_t k) { return data.data() + k * n; }
    double time_at(std::size_t k) const;
};

Trajectory identity_trajectory(const ParticleFlow& flow, const SolverConfig& cfg);

// integrate the fully coupled dynamics (sources move with the state)
Trajectory direct_solve(const ParticleFlow& flow, const SolverConfig& cfg);

// one fixed-point update: advect every label through the velocity field of a
// frozen trajectory, interpolated linearly between its frames
Trajectory apply_solution_operator(const Trajectory& frozen, const SolverConfig& cfg);

// carry passive points through the frozen field; row k holds them at time_at(k)
std::vector<std::vector<Vec2>> apply_operator_to_points(const Trajectory& frozen,
                                                        const SolverConfig& cfg,
                                                        const std::vector<Vec2>& points);

struct PicardResult {
    Trajectory traj;
    int iterations = 0;
    std::vector<double> residuals; // sup distance between consecutive iterates
    bool converged = false;
    bool monotone = true; // residuals never increased (reported, not enforced)
};

PicardResult picard_solve(const ParticleFlow& flow, const SolverConfig& cfg);

// sup over steps and labels of the pointwise distance (grids must match)
double trajectory_distance(const Trajectory& a, const Trajectory& b);

} // namespace vlab
