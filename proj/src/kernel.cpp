#include "vlab/kernel.hpp"

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "vlab/rng.hpp"

namespace vlab {

namespace {

using cplx = std::complex<double>;

// theta_1(v | tau = i) and its derivative, nome q = exp(-pi).  Six series
// terms reach double precision for |Im v| <= 2.4, which covers the padded
// fundamental cell with a wide margin.
void theta1_pair(cplx v, cplx& th, cplx& dth) {
    th = dth = 0.0;
    for (int n = 0; n < 6; ++n) {
        const double a = (n & 1 ? -2.0 : 2.0) * std::exp(-M_PI * (n + 0.5) * (n + 0.5));
        const double k = 2.0 * n + 1.0;
        th += a * std::sin(k * v);
        dth += (a * k) * std::cos(k * v);
    }
}

// corner primitive of the uniform-square stream integral: for fixed p,
// d/dq [ q ln(p^2+q^2) + 2p atan(q/p) ] = ln(p^2+q^2) + 2 p^2/(p^2+q^2) - 2 + 2
// (the constant parts cancel in the corner-alternating sum)
double corner_primitive(double p, double q) {
    const double r2 = p * p + q * q;
    if (r2 == 0.0) return 0.0;
    double t = q == 0.0 ? 0.0 : q * std::log(r2);
    if (p != 0.0) t += 2.0 * p * std::atan(q / p);
    return t;
}

// velocity at z induced by unit vorticity filling the square [-A, A]^2
Vec2 uniform_square_velocity(Vec2 z, double A) {
    const double p1 = z.x - A, p2 = z.x + A;
    const double q1 = z.y - A, q2 = z.y + A;
    auto corner_sum = [](double (*f)(double, double), double a1, double a2, double b1,
                         double b2) {
        return f(a2, b2) - f(a1, b2) - f(a2, b1) + f(a1, b1);
    };
    const double u2 = corner_sum(corner_primitive, p1, p2, q1, q2);
    // u1 by the p <-> q symmetry of the integrand, with a sign flip
    const double u1 = -corner_sum(corner_primitive, q1, q2, p1, p2);
    return Vec2{u1, u2} * (1.0 / (2.0 * two_pi));
}

} // namespace

Vec2 torus_theta_residual(Vec2 z, double L) {
    if (z.x == 0.0 && z.y == 0.0) return {0.0, 0.0};
    const cplx zeta(z.x, z.y);
    const cplx v = (M_PI / L) * zeta;
    cplx th, dth;
    theta1_pair(v, th, dth);
    // complex velocity derivative of the stream function, central pole removed:
    // (pi/L) theta'/theta (v) has residue-one pole 1/zeta at the origin
    const cplx G = (M_PI / L) * (dth / th - 1.0 / v);
    const double c = 1.0 / two_pi;
    return {c * G.imag() + z.y / (L * L), c * G.real()};
}

Vec2 torus_theta_eval(Vec2 z, double L) {
    return torus_theta_residual(z, L) + plane_kernel(z);
}

Vec2 torus_image_sum_eval(Vec2 z, double L, int window, double delta) {
    if (window < 1) throw std::invalid_argument("image window must be >= 1");
    const double d2 = delta * delta;
    Vec2 u{0.0, 0.0};
    for (int mx = -window; mx <= window; ++mx)
        for (int my = -window; my <= window; ++my)
            u += plane_kernel(z + Vec2{mx * L, my * L}, d2);
    // the (2w+1)^2 unit vortices carry net circulation; a uniform background of
    // vorticity -1/L^2 on the covering square [-A, A]^2, A = (w + 1/2) L,
    // neutralizes it and restores the mean-zero gauge of the periodic kernel
    return u - uniform_square_velocity(z, (window + 0.5) * L) * (1.0 / (L * L));
}

TorusKernelTable::TorusKernelTable(double period, int grid) : period_(period), grid_(grid) {
    if (!(period > 0.0)) throw std::invalid_argument("torus period must be positive");
    if (grid < 64 || (grid & (grid - 1)) != 0)
        throw std::invalid_argument("table grid must be a power of two >= 64");
    h_ = period_ / grid_;
    n_ = grid_ + 7;               // three pad cells each side of [-L/2, L/2]
    x0_ = -0.5 * period_ - 3.0 * h_;
    ux_.resize(std::size_t(n_) * n_);
    uy_.resize(std::size_t(n_) * n_);
    // stored: periodic kernel minus the full 3x3 image block.  Taking out the
    // neighbor images too (not just the central pole) keeps the tabulated
    // function's high derivatives small, which the divergence-freeness of the
    // interpolated field depends on.
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const Vec2 z{x0_ + i * h_, x0_ + j * h_};
            Vec2 r = torus_theta_residual(z, period_);
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my)
                    if (mx || my) r -= plane_kernel(z + Vec2{mx * period_, my * period_});
            ux_[std::size_t(i) * n_ + j] = r.x;
            uy_[std::size_t(i) * n_ + j] = r.y;
        }
}

namespace {
double catmull(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 +
           t * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
           t * (3 * (p1 - p2) + p3 - p0)));
}
} // namespace

Vec2 TorusKernelTable::remainder(Vec2 z) const {
    double fx = (z.x - x0_) / h_;
    double fy = (z.y - x0_) / h_;
    auto cell = [this](double f) {
        double c = std::floor(f);
        if (c < 1) c = 1;
        if (c > double(n_ - 3)) c = double(n_ - 3);
        return c;
    };
    const double cx = cell(fx), cy = cell(fy);
    const int i = int(cx), j = int(cy);
    const double tx = fx - cx, ty = fy - cy;

    double colx[4], coly[4];
    for (int a = 0; a < 4; ++a) {
        const std::size_t base = std::size_t(i - 1 + a) * n_ + (j - 1);
        colx[a] = catmull(ux_[base], ux_[base + 1], ux_[base + 2], ux_[base + 3], ty);
        coly[a] = catmull(uy_[base], uy_[base + 1], uy_[base + 2], uy_[base + 3], ty);
    }
    return {catmull(colx[0], colx[1], colx[2], colx[3], tx),
            catmull(coly[0], coly[1], coly[2], coly[3], tx)};
}

Vec2 TorusKernelTable::eval(Vec2 z, double delta) const {
    Vec2 zr{reduce_periodic(z.x, period_), reduce_periodic(z.y, period_)};
    double sign = 1.0;
    // canonical half-plane: together with the exactly mirrored reduction this
    // makes K(-z) == -K(z) bitwise
    if (zr.y < 0.0 || (zr.y == 0.0 && zr.x < 0.0)) {
        zr = -zr;
        sign = -1.0;
    }
    Vec2 u = remainder(zr);
    const double d2 = delta * delta;
    for (int mx = -1; mx <= 1; ++mx)
        for (int my = -1; my <= 1; ++my) {
            const Vec2 w = zr + Vec2{mx * period_, my * period_};
            const double r2 = norm2(w) + d2;
            if (r2 > 0.0) u += perp(w) * (1.0 / (two_pi * r2));
        }
    return u * sign;
}

const TorusKernelTable& torus_table(const Domain& dom) {
    static std::mutex mtx;
    static std::map<std::pair<double, int>, std::unique_ptr<TorusKernelTable>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[{dom.period, dom.torus_spectral_grid}];
    if (!slot) slot = std::make_unique<TorusKernelTable>(dom.period, dom.torus_spectral_grid);
    return *slot;
}

Vec2 kernel_eval(const Domain& dom, Vec2 x, Vec2 y, KernelParams params) {
    dom.validate();
    params.validate();
    const double d2 = params.delta * params.delta;
    switch (dom.kind) {
    case DomainKind::Plane:
        if (x.x == y.x && x.y == y.y && params.delta == 0.0)
            throw std::domain_error("kernel_eval: coincident points with delta = 0");
        return plane_kernel(x - y, d2);
    case DomainKind::Torus: {
        const Vec2 z{reduce_periodic(x.x - y.x, dom.period),
                     reduce_periodic(x.y - y.y, dom.period)};
        if (z.x == 0.0 && z.y == 0.0 && params.delta == 0.0)
            throw std::domain_error("kernel_eval: coincident points with delta = 0");
        return torus_table(dom).eval(x - y, params.delta);
    }
    default: {
        if (norm2(x) > 1.0 + 1e-10 || norm2(y) > 1.0 + 1e-10)
            throw std::domain_error("kernel_eval: point outside the unit disk");
        if (x.x == y.x && x.y == y.y && params.delta == 0.0)
            throw std::domain_error("kernel_eval: coincident points with delta = 0");
        return disk_kernel(x, y, d2);
    }
    }
}

namespace {

Vec2 sample_point(const Domain& dom, Rng& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (dom.kind) {
    case DomainKind::Plane: return {2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0};
    case DomainKind::Torus: return {dom.period * U(rng), dom.period * U(rng)};
    default: {
        const double r = std::sqrt(U(rng));
        const double a = two_pi * U(rng);
        return {r * std::cos(a), r * std::sin(a)};
    }
    }
}

double separation(const Domain& dom, Vec2 x, Vec2 y) {
    if (dom.kind == DomainKind::Torus)
        return norm(Vec2{reduce_periodic(x.x - y.x, dom.period),
                         reduce_periodic(x.y - y.y, dom.period)});
    return norm(x - y);
}

} // namespace

KernelAuditReport kernel_bound_audit(const Domain& dom, int n_samples, std::uint64_t seed) {
    dom.validate();
    if (n_samples < 100)
        throw std::invalid_argument("kernel_bound_audit: n_samples must be >= 100");

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    KernelAuditReport rep;
    rep.rows.reserve(std::size_t(n_samples));

    for (int i = 0; i < n_samples; ++i) {
        const Vec2 y = sample_point(dom, rng);
        const Vec2 x1 = sample_point(dom, rng);
        const double ang = two_pi * U(rng);
        const double frac = U(rng);

        const double r1 = separation(dom, x1, y);
        if (r1 == 0.0) continue;
        const Vec2 k1 = kernel_eval(dom, x1, y);
        const double mag = norm(k1);
        if (!std::isfinite(mag)) {
            ++rep.violations;
            continue;
        }
        if (mag * r1 > rep.C1_fit) rep.C1_fit = mag * r1;
        rep.rows.push_back({std::uint64_t(i), r1, mag, 0.0});

        // difference estimate: step from x1 by at most half the distance to y,
        // which keeps the pair inside the far-field condition automatically
        const double step = 0.5 * r1 * frac;
        const Vec2 x2 = x1 + Vec2{step * std::cos(ang), step * std::sin(ang)};
        if (step == 0.0) continue;
        if (dom.kind == DomainKind::Disk && norm2(x2) > 1.0) continue;
        const double r2 = separation(dom, x2, y);
        if (r2 == 0.0 || step > 0.5 * std::max(r1, r2)) continue;
        const Vec2 k2 = kernel_eval(dom, x2, y);
        if (!std::isfinite(k2.x) || !std::isfinite(k2.y)) {
            ++rep.violations;
            continue;
        }
        const double s = r1 + r2;
        const double cand = norm(k1 - k2) * s * s / step;
        if (std::isfinite(cand) && cand > rep.C2_fit) rep.C2_fit = cand;
    }

    if (rep.C1_fit > 0.0)
        for (auto& row : rep.rows) row.bound_ratio = row.magnitude * row.separation / rep.C1_fit;
    return rep;
}

} // namespace vlab
