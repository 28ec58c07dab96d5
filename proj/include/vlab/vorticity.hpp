#pragma once

#include <string>
#include <vector>

#include "vlab/domain.hpp"
#include "vlab/geometry.hpp"

namespace vlab {

struct PointVortex {
    Vec2 position{0.0, 0.0};
    double circulation = 0.0;
};

// Initial vorticity: a smooth density plus optional point atoms.
//
// Density kinds:
//   Patch     A on the disk |x-c| <= radius, 0 outside
//   Gaussian  A exp(-|x-c|^2 / width^2)
//   LogSpike  A ln(1/|x-c|) on |x-c| <= cutoff, 0 outside; `smoothing` > 0
//             replaces the core by its heat-kernel regularization at that scale
//   Composite sum of parts (atoms concatenate)
struct VorticitySpec {
    enum class Kind { Patch, Gaussian, PointVortices, LogSpike, Composite };

    Kind kind = Kind::Patch;
    Domain domain = Domain::plane();
    Vec2 center{0.0, 0.0};
    double radius = 0.5;    // patch radius / gaussian width / logspike cutoff
    double amplitude = 1.0;
    double smoothing = 0.0; // logspike core scale; 0 = sharp
    std::vector<PointVortex> vortices;
    std::vector<VorticitySpec> parts;

    static VorticitySpec patch(const Domain& dom, Vec2 c, double r, double a);
    static VorticitySpec gaussian(const Domain& dom, Vec2 c, double w, double a);
    static VorticitySpec point_vortices(const Domain& dom, std::vector<PointVortex> vs);
    static VorticitySpec log_spike(const Domain& dom, Vec2 c, double cutoff, double a = 1.0);
    static VorticitySpec composite(const Domain& dom, std::vector<VorticitySpec> ps);

    // Pointwise density; atoms contribute nothing here.
    double density(const Vec2& x) const;
    // Axis-aligned bounding box of the density support (not the atoms).
    // Returns false when there is no density part to sample.
    bool support_box(Vec2& lo, Vec2& hi) const;
    std::vector<PointVortex> all_atoms() const;
    bool has_density() const;
    // Multiplies all amplitudes and circulations.
    VorticitySpec scaled(double factor) const;
    // Copy with every logspike core smoothed at scale eps.
    VorticitySpec mollified(double eps) const;
    void validate() const;
};

struct VorticityNorms {
    double l1 = 0.0;
    double lp = 0.0;
    double linf = 0.0;
    double p = 4.0;
    // max(l1, lp): the norm used for data differences.
    double l1lp() const { return l1 > lp ? l1 : lp; }
};

// Grid quadrature of the density norms. Atoms add |circulation| to l1 only
// (coalesced by position first, so oppositely-signed atoms at the same spot
// cancel); they have no finite Lp or sup norm.
VorticityNorms vorticity_norms(const VorticitySpec& spec, double p = 4.0, int resolution = 512);

// Named example specs, lexicographically ordered.
std::vector<std::string> builtin_names();
VorticitySpec builtin_vorticity(const std::string& name);
// Passive marker points attached to some builtins (empty for most).
std::vector<Vec2> builtin_tracers(const std::string& name);

} // namespace vlab
