#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "vlab/kernel.hpp"
#include "vlab/vorticity.hpp"

namespace vlab {

// Weighted particle representation of a vorticity field at one instant.
// Weights and values never change after construction; transport carries them
// along positions. Atoms (point vortices) occupy indices [0, atom_count);
// grid cells follow; zero-weight tracers sit at the tail.
struct ParticleFlow {
    std::vector<Vec2> labels;
    std::vector<Vec2> positions;
    std::vector<double> weights;
    std::vector<double> values;
    std::size_t atom_count = 0;
    double time = 0.0;
    Domain domain = Domain::plane();
    KernelParams params;
    bool empty_support = false;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    double circulation() const;
    double covered_area() const; // sum of weights
    // Appends passive zero-weight labels.
    void add_tracers(const std::vector<Vec2>& pts);
    std::vector<double> gammas() const; // w_i * omega_i
};

// Cell-centered quadrature of the spec over its support box intersected with
// the domain; atoms become unit-weight particles carrying their circulation.
ParticleFlow discretize(const VorticitySpec& spec, int n_per_axis);

// Same cell geometry, dropping, compensation, and blob-scale conventions, but
// sampling an arbitrary density over a caller-chosen box (pass lo == hi to
// skip the grid). Composed fields -- e.g. a spec pushed through a domain map
// -- have no spec of their own, so they enter here.
ParticleFlow discretize_custom(const std::function<double(const Vec2&)>& density,
                               const std::vector<PointVortex>& atoms, Vec2 lo,
                               Vec2 hi, int n_per_axis, const Domain& dom);

// Same cells and weights as `proto`, values re-sampled from `spec`
// (shared-label experiments). Atom circulations follow spec order.
ParticleFlow discretize_like(const ParticleFlow& proto, const VorticitySpec& spec);

// v(y) = sum_j w_j omega_j K(y, X_j), compensated accumulation in label order.
std::vector<Vec2> velocity(const ParticleFlow& state, const std::vector<Vec2>& queries);

} // namespace vlab
