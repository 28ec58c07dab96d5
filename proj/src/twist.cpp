#include "vlab/twist.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vlab {

namespace {

constexpr double kBumpEdge = 0.9;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// smooth bump in the radius, identically zero from kBumpEdge outward
double bump(double r)
{
    const double u = r / kBumpEdge;
    if (u >= 1.0)
        return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

} // namespace

TwistMap TwistMap::disk_twist(double eps)
{
    TwistMap m;
    m.kind = Kind::DiskTwist;
    m.domain = Domain::disk();
    m.eps = eps;
    return m;
}

TwistMap TwistMap::torus_shear(double eps, double period)
{
    if (!(period > 0.0))
        throw std::invalid_argument("torus_shear: period must be positive");
    TwistMap m;
    m.kind = Kind::TorusShear;
    m.domain = Domain::torus(period);
    m.eps = eps;
    return m;
}

TwistMap TwistMap::scaled_to(double new_eps) const
{
    TwistMap m = *this;
    m.eps = new_eps;
    return m;
}

Vec2 TwistMap::apply(const Vec2& x) const
{
    if (kind == Kind::DiskTwist)
        return rotate(x, eps * bump(norm(x)));
    const double L = domain.period;
    return {x.x + eps * (L / kTwoPi) * std::sin(kTwoPi * x.y / L), x.y};
}

Vec2 TwistMap::inverse(const Vec2& y) const
{
    // the disk twist preserves the radius, so the forward angle can be read
    // off the image point
    if (kind == Kind::DiskTwist)
        return rotate(y, -eps * bump(norm(y)));
    const double L = domain.period;
    return {y.x - eps * (L / kTwoPi) * std::sin(kTwoPi * y.y / L), y.y};
}

double TwistMap::jacobian_det(const Vec2& x, double h) const
{
    const auto d = [&](bool along_x, int c) {
        const Vec2 e = along_x ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        const Vec2 p1 = apply(x + (2.0 * h) * e);
        const Vec2 p2 = apply(x + h * e);
        const Vec2 p3 = apply(x + (-h) * e);
        const Vec2 p4 = apply(x + (-2.0 * h) * e);
        const double f1 = c == 0 ? p1.x : p1.y;
        const double f2 = c == 0 ? p2.x : p2.y;
        const double f3 = c == 0 ? p3.x : p3.y;
        const double f4 = c == 0 ? p4.x : p4.y;
        return (-f1 + 8.0 * f2 - 8.0 * f3 + f4) / (12.0 * h);
    };
    const double a11 = d(true, 0), a12 = d(false, 0);
    const double a21 = d(true, 1), a22 = d(false, 1);
    return a11 * a22 - a12 * a21;
}

TwistNorms TwistMap::norms(int n) const
{
    if (n < 16)
        throw std::invalid_argument("twist norms: grid must be at least 16");

    Vec2 lo{-1.0, -1.0}, hi{1.0, 1.0};
    if (kind == Kind::TorusShear) {
        lo = {0.0, 0.0};
        hi = {domain.period, domain.period};
    }
    const double hx = (hi.x - lo.x) / (n - 1);
    const double hy = (hi.y - lo.y) / (n - 1);

    std::vector<Vec2> u(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 x{lo.x + hx * i, lo.y + hy * j};
            u[static_cast<std::size_t>(i) * n + j] = apply(x) - x;
        }
    }
    const auto at = [&](int i, int j) -> const Vec2& {
        return u[static_cast<std::size_t>(i) * n + j];
    };

    TwistNorms out;
    for (const Vec2& v : u)
        out.c0 = std::max(out.c0, norm(v));

    const auto comp_max = [&out](double gx, double gy, bool second) {
        double& slot = second ? out.c2 : out.c1;
        slot = std::max(slot, std::max(std::abs(gx), std::abs(gy)));
    };
    for (int i = 1; i + 1 < n; ++i) {
        for (int j = 1; j + 1 < n; ++j) {
            const Vec2 px = (at(i + 1, j) - at(i - 1, j)) * (0.5 / hx);
            const Vec2 py = (at(i, j + 1) - at(i, j - 1)) * (0.5 / hy);
            comp_max(px.x, px.y, false);
            comp_max(py.x, py.y, false);
            const Vec2 pxx =
                (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) * (1.0 / (hx * hx));
            const Vec2 pyy =
                (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) * (1.0 / (hy * hy));
            const Vec2 pxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) +
                              at(i - 1, j - 1)) *
                             (0.25 / (hx * hy));
            comp_max(pxx.x, pxx.y, true);
            comp_max(pyy.x, pyy.y, true);
            comp_max(pxy.x, pxy.y, true);
        }
    }
    return out;
}

} // namespace vlab
