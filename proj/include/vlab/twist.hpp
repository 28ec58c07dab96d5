#pragma once

#include "vlab/domain.hpp"
#include "vlab/geometry.hpp"

namespace vlab {

// Sup norms of the displacement Phi - id and its first two difference
// tensors, measured on a uniform grid covering the domain.
struct TwistNorms {
    double c0 = 0.0; // sup |Phi(x) - x|
    double c1 = 0.0; // sup |grad(Phi - id)|, largest entry
    double c2 = 0.0; // sup |second differences|, largest entry

    double displacement_c2() const { return c0 + c1 + c2; }
    double gradient_c1() const { return c1 + c2; }
};

// Area-preserving self-map of the domain, a linear family in eps with a
// closed-form inverse:
//
//   disk:  (r, th) -> (r, th + eps g(r)), g a smooth bump with g == 0 for
//          r >= 0.9, so the boundary is fixed pointwise
//   torus: (x, y)  -> (x + eps s(y), y) with s(y) = (L/2pi) sin(2pi y / L)
//
// Both have unit Jacobian by construction (rotation at fixed radius /
// unit-diagonal shear).
struct TwistMap {
    enum class Kind { DiskTwist, TorusShear };

    Kind kind = Kind::DiskTwist;
    Domain domain = Domain::disk();
    double eps = 0.0;

    static TwistMap disk_twist(double eps);
    static TwistMap torus_shear(double eps, double period = 1.0);

    // same family at a different amplitude
    TwistMap scaled_to(double new_eps) const;

    Vec2 apply(const Vec2& x) const;
    Vec2 inverse(const Vec2& y) const;

    // determinant of the deformation gradient by fourth-order central
    // differences
    double jacobian_det(const Vec2& x, double h = 1e-3) const;

    // displacement norms by central differences on an n x n grid
    TwistNorms norms(int n = 256) const;
};

} // namespace vlab
