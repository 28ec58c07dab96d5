#pragma once

#include <cstdint>
#include <vector>

#include "vlab/modulus.hpp"
#include "vlab/solver.hpp"

namespace vlab {

// Concentric polygon fans carried as passive points; each ring is fanned
// from the advected center so a pure rotation keeps every area exactly.
struct MeshSpec {
    Vec2 center{0.0, 0.0};
    double radius = 0.2;
    int rings = 2;
    int sectors = 8;
};

// max over steps and rings of |area(t)/area(0) - 1|; an inverted cell drives
// the ratio negative, so the result is then >= 1
double measure_distortion(const Trajectory& traj, const SolverConfig& cfg,
                          const MeshSpec& mesh = {});

// - (1/4 pi) sum_{i != j} g_i g_j log |x_i - x_j|
double point_vortex_hamiltonian(const std::vector<Vec2>& pos,
                                const std::vector<double>& gam);

// Pairs of passive points at log-spaced separations, carried by a frozen
// trajectory. alpha(t) is the least-squares slope of log sep(t) against
// log sep(0); fitted_c is the smallest constant closing the two-point
// modulus inequality |M(sep(0)) - M(sep(t))| <= C ||omega|| t.
struct FlowModulusProbe {
    std::vector<double> times;
    std::vector<double> init_sep;
    std::vector<std::vector<double>> sep; // frames x pairs
    std::vector<double> alpha;            // per frame
    double fitted_c = 0.0;
};

// tangential: place each pair as an equal-radius chord about the origin, so
// any purely azimuthal flow preserves the separations exactly (plane and disk
// only; ignored on the torus)
FlowModulusProbe flow_modulus_probe(const Trajectory& traj, const SolverConfig& cfg,
                                    const ModulusKit& kit, double omega_norm,
                                    int pair_count, std::uint64_t seed,
                                    bool tangential = false);

} // namespace vlab
