#include "vlab/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace vlab {
namespace {

constexpr double kDropTol = 1e-14;

// Heat-kernel smoothed ln(1/r): e^{tL} ln(1/|x|) = ln(1/r) - E1(r^2/4t)/2
// with t = eps^2/2. Stable at r -> 0 via the E1 small-argument expansion.
double smoothed_log(double r, double eps)
{
    const double x = r * r / (2.0 * eps * eps);
    if (x < 1e-8) {
        constexpr double half_gamma = 0.288607832450766; // Euler-Mascheroni / 2
        return half_gamma - 0.5 * std::log(2.0 * eps * eps) - 0.5 * x;
    }
    if (x > 700.0)
        return std::log(1.0 / r);
    return std::log(1.0 / r) + 0.5 * std::expint(-x);
}

void grow_box(Vec2& lo, Vec2& hi, const Vec2& c, double r)
{
    lo.x = std::min(lo.x, c.x - r);
    lo.y = std::min(lo.y, c.y - r);
    hi.x = std::max(hi.x, c.x + r);
    hi.y = std::max(hi.y, c.y + r);
}

double gaussian_reach(double width, double amplitude)
{
    const double a = std::abs(amplitude);
    if (a <= kDropTol)
        return 0.0;
    return width * std::sqrt(std::log(a / kDropTol));
}

} // namespace

VorticitySpec VorticitySpec::patch(const Domain& dom, Vec2 c, double r, double a)
{
    VorticitySpec s;
    s.kind = Kind::Patch;
    s.domain = dom;
    s.center = c;
    s.radius = r;
    s.amplitude = a;
    return s;
}

VorticitySpec VorticitySpec::gaussian(const Domain& dom, Vec2 c, double w, double a)
{
    VorticitySpec s;
    s.kind = Kind::Gaussian;
    s.domain = dom;
    s.center = c;
    s.radius = w;
    s.amplitude = a;
    return s;
}

VorticitySpec VorticitySpec::point_vortices(const Domain& dom, std::vector<PointVortex> vs)
{
    VorticitySpec s;
    s.kind = Kind::PointVortices;
    s.domain = dom;
    s.vortices = std::move(vs);
    return s;
}

VorticitySpec VorticitySpec::log_spike(const Domain& dom, Vec2 c, double cutoff, double a)
{
    VorticitySpec s;
    s.kind = Kind::LogSpike;
    s.domain = dom;
    s.center = c;
    s.radius = cutoff;
    s.amplitude = a;
    return s;
}

VorticitySpec VorticitySpec::composite(const Domain& dom, std::vector<VorticitySpec> ps)
{
    VorticitySpec s;
    s.kind = Kind::Composite;
    s.domain = dom;
    for (auto& p : ps)
        p.domain = dom;
    s.parts = std::move(ps);
    return s;
}

double VorticitySpec::density(const Vec2& x) const
{
    switch (kind) {
    case Kind::Patch:
        return norm2(x - center) <= radius * radius ? amplitude : 0.0;
    case Kind::Gaussian:
        return amplitude * std::exp(-norm2(x - center) / (radius * radius));
    case Kind::PointVortices:
        return 0.0;
    case Kind::LogSpike: {
        const double r = norm(x - center);
        if (r > radius)
            return 0.0;
        if (smoothing > 0.0)
            return amplitude * smoothed_log(r, smoothing);
        if (r == 0.0)
            return std::numeric_limits<double>::infinity() * (amplitude >= 0 ? 1.0 : -1.0);
        return amplitude * std::log(1.0 / r);
    }
    case Kind::Composite: {
        double s = 0.0;
        for (const auto& p : parts)
            s += p.density(x);
        return s;
    }
    }
    return 0.0;
}

bool VorticitySpec::support_box(Vec2& lo, Vec2& hi) const
{
    lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    bool any = false;
    switch (kind) {
    case Kind::Patch:
    case Kind::LogSpike:
        // a vanishing amplitude still owns its geometry; sampling it just
        // produces an empty flow
        if (radius > 0.0) {
            grow_box(lo, hi, center, radius);
            any = true;
        }
        break;
    case Kind::Gaussian: {
        const double reach =
            amplitude == 0.0 ? radius : gaussian_reach(radius, amplitude);
        if (reach > 0.0) {
            grow_box(lo, hi, center, reach);
            any = true;
        }
        break;
    }
    case Kind::PointVortices:
        break;
    case Kind::Composite:
        for (const auto& p : parts) {
            Vec2 plo, phi;
            if (p.support_box(plo, phi)) {
                lo.x = std::min(lo.x, plo.x);
                lo.y = std::min(lo.y, plo.y);
                hi.x = std::max(hi.x, phi.x);
                hi.y = std::max(hi.y, phi.y);
                any = true;
            }
        }
        break;
    }
    return any;
}

std::vector<PointVortex> VorticitySpec::all_atoms() const
{
    std::vector<PointVortex> out;
    if (kind == Kind::PointVortices)
        out = vortices;
    else if (kind == Kind::Composite)
        for (const auto& p : parts) {
            auto sub = p.all_atoms();
            out.insert(out.end(), sub.begin(), sub.end());
        }
    return out;
}

bool VorticitySpec::has_density() const
{
    switch (kind) {
    case Kind::PointVortices:
        return false;
    case Kind::Composite:
        return std::any_of(parts.begin(), parts.end(),
                           [](const VorticitySpec& p) { return p.has_density(); });
    default:
        return true;
    }
}

VorticitySpec VorticitySpec::scaled(double factor) const
{
    VorticitySpec s = *this;
    s.amplitude *= factor;
    for (auto& v : s.vortices)
        v.circulation *= factor;
    for (auto& p : s.parts)
        p = p.scaled(factor);
    return s;
}

VorticitySpec VorticitySpec::mollified(double eps) const
{
    VorticitySpec s = *this;
    if (s.kind == Kind::LogSpike)
        s.smoothing = eps;
    for (auto& p : s.parts)
        p = p.mollified(eps);
    return s;
}

void VorticitySpec::validate() const
{
    domain.validate();
    if (kind == Kind::Composite) {
        if (parts.empty() && vortices.empty())
            throw std::invalid_argument("vorticity: composite with no parts has empty support");
        for (const auto& p : parts) {
            if (p.domain.kind != domain.kind)
                throw std::invalid_argument("vorticity: composite parts must share the domain");
            p.validate();
        }
        return;
    }
    if (kind != Kind::PointVortices && !(radius > 0.0))
        throw std::invalid_argument("vorticity: nonpositive length scale");
    if (domain.kind == DomainKind::Disk) {
        switch (kind) {
        case Kind::Patch:
        case Kind::LogSpike:
            if (norm(center) + radius > 1.0 + 1e-9)
                throw std::invalid_argument("vorticity: support leaves the unit disk");
            break;
        case Kind::Gaussian:
            if (norm(center) >= 1.0)
                throw std::invalid_argument("vorticity: gaussian center outside the unit disk");
            break;
        default:
            break;
        }
        for (const auto& v : vortices)
            if (norm(v.position) >= 1.0)
                throw std::invalid_argument("vorticity: vortex outside the unit disk");
    } else if (domain.kind == DomainKind::Torus) {
        if (kind != Kind::PointVortices && 2.0 * radius > domain.period + 1e-12)
            throw std::invalid_argument("vorticity: support wider than the periodic cell");
    }
}

VorticityNorms vorticity_norms(const VorticitySpec& spec, double p, int resolution)
{
    spec.validate();
    if (!(p >= 1.0))
        throw std::invalid_argument("vorticity_norms: p must be >= 1");
    if (resolution < 4)
        throw std::invalid_argument("vorticity_norms: resolution too small");

    VorticityNorms out;
    out.p = p;

    Vec2 lo, hi;
    bool have_box = spec.support_box(lo, hi);
    if (spec.domain.kind == DomainKind::Torus) {
        lo = {0.0, 0.0};
        hi = {spec.domain.period, spec.domain.period};
        have_box = spec.has_density();
    } else if (have_box && spec.domain.kind == DomainKind::Disk) {
        lo.x = std::max(lo.x, -1.0);
        lo.y = std::max(lo.y, -1.0);
        hi.x = std::min(hi.x, 1.0);
        hi.y = std::min(hi.y, 1.0);
    }

    if (have_box && hi.x > lo.x && hi.y > lo.y) {
        const double hx = (hi.x - lo.x) / resolution;
        const double hy = (hi.y - lo.y) / resolution;
        const double w = hx * hy;
        double sum1 = 0.0, sump = 0.0;
        for (int i = 0; i < resolution; ++i) {
            const double x = lo.x + hx * (i + 0.5);
            for (int j = 0; j < resolution; ++j) {
                const Vec2 c{x, lo.y + hy * (j + 0.5)};
                if (spec.domain.kind == DomainKind::Disk && norm2(c) >= 1.0)
                    continue;
                const double v = std::abs(spec.density(c));
                if (v < kDropTol)
                    continue;
                sum1 += w * v;
                sump += w * std::pow(v, p);
                out.linf = std::max(out.linf, v);
            }
        }
        out.l1 = sum1;
        out.lp = std::pow(sump, 1.0 / p);
    }

    // Atoms: net mass per location enters L1.
    std::map<std::pair<double, double>, double> net;
    for (const auto& v : spec.all_atoms())
        net[{v.position.x, v.position.y}] += v.circulation;
    for (const auto& [pos, g] : net)
        out.l1 += std::abs(g);
    return out;
}

namespace {

VorticitySpec make_builtin(const std::string& name)
{
    const Domain plane = Domain::plane();
    const Domain disk = Domain::disk();
    if (name == "corotating-pair")
        return VorticitySpec::point_vortices(
            plane, {{{-0.5, 0.0}, 1.0}, {{0.5, 0.0}, 1.0}});
    if (name == "gaussian")
        return VorticitySpec::gaussian(disk, {0.0, 0.0}, 0.2, 1.0);
    if (name == "logspike")
        return VorticitySpec::log_spike(disk, {0.0, 0.0}, 1.0, 1.0);
    if (name == "offset-patch")
        return VorticitySpec::patch(disk, {0.25, 0.0}, 0.5, 1.0);
    if (name == "patch")
        return VorticitySpec::patch(plane, {0.0, 0.0}, 0.5, 1.0);
    if (name == "perturbation-patch")
        return VorticitySpec::patch(plane, {0.2, 0.1}, 0.25, 1.0);
    if (name == "rigid-rotation")
        return VorticitySpec::point_vortices(disk, {{{0.0, 0.0}, 2.0 * 3.14159265358979323846}});
    if (name == "single-vortex-tracers")
        return VorticitySpec::point_vortices(plane, {{{0.0, 0.0}, 1.0}});
    if (name == "three-vortex")
        return VorticitySpec::point_vortices(
            plane, {{{0.0, 0.0}, 1.0}, {{0.7, 0.0}, 0.8}, {{0.2, 0.55}, 1.2}});
    if (name == "zero")
        return VorticitySpec::patch(plane, {0.0, 0.0}, 0.5, 0.0);
    throw std::invalid_argument("unknown builtin vorticity: " + name);
}

} // namespace

std::vector<std::string> builtin_names()
{
    return {"corotating-pair", "gaussian",       "logspike",
            "offset-patch",    "patch",          "perturbation-patch",
            "rigid-rotation",  "single-vortex-tracers", "three-vortex",
            "zero"};
}

VorticitySpec builtin_vorticity(const std::string& name)
{
    return make_builtin(name);
}

std::vector<Vec2> builtin_tracers(const std::string& name)
{
    std::vector<Vec2> pts;
    if (name == "single-vortex-tracers" || name == "rigid-rotation") {
        const int m = 16;
        for (int k = 0; k < m; ++k) {
            const double a = 2.0 * 3.14159265358979323846 * k / m;
            pts.push_back({0.5 * std::cos(a), 0.5 * std::sin(a)});
        }
    } else {
        make_builtin(name); // validates the name
    }
    return pts;
}

} // namespace vlab
