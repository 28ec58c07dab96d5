#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vlab/domain.hpp"
#include "vlab/geometry.hpp"

namespace vlab {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Blob desingularization scale; delta = 0 is the singular point-vortex kernel.
struct KernelParams {
    double delta = 0.0;
    void validate() const {
        if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
    }
};

// Free-space kernel at separation z = x - y: velocity at x of a unit vortex
// at y, (1/2pi) z^perp / (|z|^2 + delta^2).
inline Vec2 plane_kernel(Vec2 z, double delta2 = 0.0) {
    return perp(z) * (1.0 / (two_pi * (norm2(z) + delta2)));
}

// Unit-disk kernel with the reflected image vortex.  The image term is kept in
// polynomial form (x|y|^2 - y over |x|^2|y|^2 - 2 x.y + 1), which is smooth
// through y = 0 and makes boundary tangency an algebraic identity: on |x| = 1
// both denominators coincide, so the normal components cancel exactly -- for
// every delta, since both gain the same +delta^2.
inline Vec2 disk_kernel(Vec2 x, Vec2 y, double delta2 = 0.0) {
    const double y2 = norm2(y);
    const Vec2 img{x.x * y2 - y.x, x.y * y2 - y.y};
    const double den_dir = norm2(x - y) + delta2;
    const double den_img = norm2(x) * y2 - 2.0 * dot(x, y) + 1.0 + delta2;
    return (perp(x - y) * (1.0 / den_dir) - perp(img) * (1.0 / den_img)) * (1.0 / two_pi);
}

// nearest-image reduction to [-L/2, L/2]; ties resolved by round-to-even,
// symmetrically in the sign of t
inline double reduce_periodic(double t, double L) {
    return t - L * std::nearbyint(t / L);
}

// Periodic kernel on the square torus of side L.  The 3x3 block of nearest
// free-space images is evaluated analytically (so the singularity and its
// regularization are exact); everything beyond it -- the far images plus the
// mean-zero background -- is a smooth remainder tabulated once on a padded
// grid and interpolated bicubically.  Antisymmetry is made bit-exact by
// evaluating every separation in a canonical half-plane.
class TorusKernelTable {
public:
    TorusKernelTable(double period, int grid);

    double period() const { return period_; }
    int grid() const { return grid_; }

    // full kernel at separation z (reduced mod L internally); delta applies to
    // the central singular term
    Vec2 eval(Vec2 z, double delta = 0.0) const;

    // interpolated smooth remainder; z must already lie in the padded cell
    Vec2 remainder(Vec2 z) const;

    // raw table access for fused N-body loops: node i,j at (x0 + i h, x0 + j h),
    // value index i*nodes + j
    double node_origin() const { return x0_; }
    double node_spacing() const { return h_; }
    int nodes() const { return n_; }
    const double* ux_data() const { return ux_.data(); }
    const double* uy_data() const { return uy_.data(); }

private:
    double period_;
    int grid_;
    int n_;
    double h_, x0_;
    std::vector<double> ux_, uy_;
};

// process-wide table cache, keyed by (period, grid); built once, then shared
// read-only
const TorusKernelTable& torus_table(const Domain& dom);

// Exact periodic kernel via the first Jacobi theta function (the Fourier
// series of the mean-zero stream function summed in closed form).  Slow;
// reference and table construction only.  z in the padded fundamental cell.
Vec2 torus_theta_eval(Vec2 z, double period);

// theta evaluation minus the central free-space singularity; finite at z = 0
// (this is the function the table stores)
Vec2 torus_theta_residual(Vec2 z, double period);

// Independent slow evaluation: free-space images over the window
// [-M, M]^2 plus a uniform neutralizing background of vorticity -1/L^2 on the
// matching square, which restores the mean-zero gauge.  Converges to the
// periodic kernel as M grows; delta applies to every image.
Vec2 torus_image_sum_eval(Vec2 z, double period, int window, double delta = 0.0);

// velocity at x induced by a unit point vortex at y
Vec2 kernel_eval(const Domain& dom, Vec2 x, Vec2 y, KernelParams params = {});

// Empirical check of the two kernel estimates
//   |K(x,y)| <= C1 / |x-y|
//   |K(x1,y) - K(x2,y)| <= C2 |x1-x2| / (|x1-y| + |x2-y|)^2
// the second over pairs with |x1-x2| <= max(|x1-y|, |x2-y|)/2.  Samples are
// drawn uniformly from the domain (the square [-1,1]^2 stands in for the
// plane); suprema over a prefix of a seeded stream, so C1_fit and C2_fit are
// non-decreasing in n_samples at fixed seed.
struct KernelAuditRow {
    std::uint64_t sample_id;
    double separation;   // |x - y|
    double magnitude;    // |K(x,y)|
    double bound_ratio;  // magnitude * separation / C1_fit
};

struct KernelAuditReport {
    double C1_fit = 0.0;
    double C2_fit = 0.0;
    std::uint64_t violations = 0;   // non-finite evaluations
    std::vector<KernelAuditRow> rows;
};

KernelAuditReport kernel_bound_audit(const Domain& dom, int n_samples, std::uint64_t seed);

} // namespace vlab
