#include "vlab/summation.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "vlab/kernel.hpp"

namespace vlab {
namespace {

constexpr int kLanes = 8;
constexpr double kInvTwoPi = 1.0 / two_pi;

inline void neumaier(double& s, double& c, double v)
{
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
}

// Branch-free exact error of s + v (TwoSum); keeps the per-lane running
// compensation identical to the branchy form while letting the compiler
// vectorize the lane loop.
inline void twosum(double& s, double& c, double v)
{
    const double t = s + v;
    const double vp = t - s;
    c += (s - (t - vp)) + (v - vp);
    s = t;
}

// Eight independent compensated lanes, merged in a fixed order, so a sum
// depends only on the order of the sources, never on the query batch or
// thread layout.
struct Lanes {
    double s[kLanes] = {};
    double c[kLanes] = {};

    double total() const
    {
        double acc = 0.0, comp = 0.0;
        for (int l = 0; l < kLanes; ++l) {
            neumaier(acc, comp, s[l]);
            neumaier(acc, comp, c[l]);
        }
        return acc + comp;
    }
};

// Sources rearranged into lane-friendly columns, padded with zero-strength
// entries to a multiple of the lane count. A zero-strength pad at the origin
// is inert: the denominators bump away from zero, and adding an exact 0.0
// leaves every lane state untouched.
struct Columns {
    std::vector<double> x, y, g, y2;
    std::size_t n = 0; // padded length

    Columns(const Vec2* src, const double* gamma, std::size_t n_src, bool with_y2)
    {
        n = (n_src + kLanes - 1) / kLanes * kLanes;
        x.assign(n, 0.0);
        y.assign(n, 0.0);
        g.assign(n, 0.0);
        if (with_y2)
            y2.assign(n, 0.0);
        for (std::size_t j = 0; j < n_src; ++j) {
            x[j] = src[j].x;
            y[j] = src[j].y;
            g[j] = gamma[j];
            if (with_y2)
                y2[j] = src[j].x * src[j].x + src[j].y * src[j].y;
        }
    }
};

inline Vec2 plane_pair(const Vec2& q, const Vec2& p, double dd)
{
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    double r2 = dx * dx + dy * dy + dd;
    r2 = (r2 == 0.0) ? 1.0 : r2;
    return {-dy / r2, dx / r2};
}


void plane_query(const Columns& col, const Vec2* src, const double* gamma,
                 double dd, const Vec2& q, std::size_t ex, Vec2& out)
{
    Lanes ax, ay;
    const double qx = q.x, qy = q.y;
    for (std::size_t j = 0; j < col.n; j += kLanes)
        for (int l = 0; l < kLanes; ++l) {
            const double dx = qx - col.x[j + l];
            const double dy = qy - col.y[j + l];
            double r2 = dx * dx + dy * dy + dd;
            r2 = (r2 == 0.0) ? 1.0 : r2;
            const double f = col.g[j + l] / r2;
            twosum(ax.s[l], ax.c[l], -dy * f);
            twosum(ay.s[l], ay.c[l], dx * f);
        }
    double ux = ax.total();
    double uy = ay.total();
    if (ex != kNoExclude) {
        const Vec2 t = plane_pair(q, src[ex], dd);
        ux -= gamma[ex] * t.x;
        uy -= gamma[ex] * t.y;
    }
    out = {ux * kInvTwoPi, uy * kInvTwoPi};
}

void disk_query(const Columns& col, const Vec2* src, const double* gamma,
                double dd, const Vec2& q, std::size_t ex, Vec2& out)
{
    const double qx = q.x, qy = q.y;
    const double q2 = qx * qx + qy * qy;
    Lanes ax, ay;
    for (std::size_t j = 0; j < col.n; j += kLanes)
        for (int l = 0; l < kLanes; ++l) {
            const double px = col.x[j + l];
            const double py = col.y[j + l];
            const double dx = qx - px;
            const double dy = qy - py;
            double den1 = dx * dx + dy * dy + dd;
            den1 = (den1 == 0.0) ? 1.0 : den1;
            const double y2 = col.y2[j + l];
            const double ix = qx * y2 - px;
            const double iy = qy * y2 - py;
            double den2 = q2 * y2 - 2.0 * (qx * px + qy * py) + 1.0 + dd;
            den2 = (den2 == 0.0) ? 1.0 : den2;
            const double g = col.g[j + l];
            twosum(ax.s[l], ax.c[l], g * (-dy / den1 + iy / den2));
            twosum(ay.s[l], ay.c[l], g * (dx / den1 - ix / den2));
        }
    double ux = ax.total();
    double uy = ay.total();
    if (ex != kNoExclude) {
        // excise only the free-space singularity; the label's own boundary
        // image is a regular, physical term and stays in the sum
        const Vec2 t = plane_pair(q, src[ex], dd);
        ux -= gamma[ex] * t.x;
        uy -= gamma[ex] * t.y;
    }
    out = {ux * kInvTwoPi, uy * kInvTwoPi};
}

void torus_query(const TorusKernelTable& tbl, const Vec2* src, const double* gamma,
                 std::size_t n, double delta, const Vec2& q, std::size_t ex, Vec2& out)
{
    const double L = tbl.period();
    Lanes ax, ay;
    for (std::size_t j = 0; j < n; ++j) {
        Vec2 z{reduce_periodic(q.x - src[j].x, L), reduce_periodic(q.y - src[j].y, L)};
        if (z.x == 0.0 && z.y == 0.0 && delta == 0.0)
            continue; // coincident singular source contributes nothing
        const Vec2 k = tbl.eval(q - src[j], delta);
        const int l = static_cast<int>(j % kLanes);
        twosum(ax.s[l], ax.c[l], gamma[j] * k.x);
        twosum(ay.s[l], ay.c[l], gamma[j] * k.y);
    }
    double ux = ax.total();
    double uy = ay.total();
    if (ex != kNoExclude) {
        Vec2 z{reduce_periodic(q.x - src[ex].x, L), reduce_periodic(q.y - src[ex].y, L)};
        if (!(z.x == 0.0 && z.y == 0.0 && delta == 0.0)) {
            const Vec2 k = tbl.eval(q - src[ex], delta);
            ux -= gamma[ex] * k.x;
            uy -= gamma[ex] * k.y;
        }
    }
    out = {ux, uy};
}

} // namespace

void induced_velocity(const Domain& dom, double delta,
                      const Vec2* src, const double* gamma, std::size_t n_src,
                      const Vec2* query, const std::size_t* exclude, std::size_t n_query,
                      Vec2* out)
{
    const double dd = delta * delta;
    switch (dom.kind) {
    case DomainKind::Plane: {
        const Columns col(src, gamma, n_src, false);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_query); ++i)
            plane_query(col, src, gamma, dd, query[i],
                        exclude ? exclude[i] : kNoExclude, out[i]);
        break;
    }
    case DomainKind::Disk: {
        const Columns col(src, gamma, n_src, true);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_query); ++i)
            disk_query(col, src, gamma, dd, query[i],
                       exclude ? exclude[i] : kNoExclude, out[i]);
        break;
    }
    case DomainKind::Torus: {
        const TorusKernelTable& tbl = torus_table(dom);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_query); ++i)
            torus_query(tbl, src, gamma, n_src, delta, query[i],
                        exclude ? exclude[i] : kNoExclude, out[i]);
        break;
    }
    }
}

} // namespace vlab
