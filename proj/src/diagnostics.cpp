#include "vlab/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "vlab/kernel.hpp"
#include "vlab/rng.hpp"

namespace vlab {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Vec2> mesh_vertices(const MeshSpec& mesh)
{
    std::vector<Vec2> v;
    v.push_back(mesh.center);
    for (int j = 1; j <= mesh.rings; ++j) {
        const double r = mesh.radius * j / mesh.rings;
        for (int s = 0; s < mesh.sectors; ++s) {
            const double a = 2.0 * kPi * s / mesh.sectors;
            v.push_back(mesh.center + r * Vec2{std::cos(a), std::sin(a)});
        }
    }
    return v;
}

// signed area of the fan polygon of ring j, apex at the advected center
double ring_area(const std::vector<Vec2>& pts, int ring, int sectors)
{
    const Vec2& c = pts[0];
    const std::size_t base = 1 + static_cast<std::size_t>(ring) * sectors;
    double a = 0.0;
    for (int s = 0; s < sectors; ++s) {
        const Vec2& u = pts[base + s];
        const Vec2& v = pts[base + (s + 1) % sectors];
        a += cross(u - c, v - c);
    }
    return 0.5 * a;
}

} // namespace

double measure_distortion(const Trajectory& traj, const SolverConfig& cfg,
                          const MeshSpec& mesh)
{
    if (mesh.rings < 1 || mesh.sectors < 3 || !(mesh.radius > 0.0))
        throw std::invalid_argument("measure_distortion: degenerate mesh");

    const auto rows = apply_operator_to_points(traj, cfg, mesh_vertices(mesh));

    std::vector<double> area0(mesh.rings);
    for (int j = 0; j < mesh.rings; ++j)
        area0[j] = ring_area(rows[0], j, mesh.sectors);

    double worst = 0.0;
    for (const auto& row : rows)
        for (int j = 0; j < mesh.rings; ++j)
            worst = std::max(worst, std::abs(ring_area(row, j, mesh.sectors) / area0[j] - 1.0));
    return worst;
}

double point_vortex_hamiltonian(const std::vector<Vec2>& pos, const std::vector<double>& gam)
{
    if (pos.size() != gam.size())
        throw std::invalid_argument("point_vortex_hamiltonian: size mismatch");
    double h = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j)
            h += gam[i] * gam[j] * std::log(norm(pos[i] - pos[j]));
    return -h / (2.0 * kPi);
}

FlowModulusProbe flow_modulus_probe(const Trajectory& traj, const SolverConfig& cfg,
                                    const ModulusKit& kit, double omega_norm,
                                    int pair_count, std::uint64_t seed,
                                    bool tangential)
{
    if (pair_count < 2)
        throw std::invalid_argument("flow_modulus_probe: need at least two pairs");
    if (!(omega_norm > 0.0))
        throw std::invalid_argument("flow_modulus_probe: omega_norm must be positive");

    auto rng = make_rng(seed);
    const Domain dom = traj.base.domain;
    if (dom.kind == DomainKind::Torus)
        tangential = false;

    auto draw_base = [&]() -> Vec2 {
        switch (dom.kind) {
        case DomainKind::Disk:
            for (;;) {
                const Vec2 p{uniform(rng, -0.7, 0.7), uniform(rng, -0.7, 0.7)};
                if (norm(p) <= 0.7)
                    return p;
            }
        case DomainKind::Torus:
            return {uniform(rng, 0.0, dom.period), uniform(rng, 0.0, dom.period)};
        case DomainKind::Plane:
        default: {
            Vec2 lo{-0.5, -0.5}, hi{0.5, 0.5};
            for (const auto& p : traj.base.positions) {
                lo.x = std::min(lo.x, p.x);
                lo.y = std::min(lo.y, p.y);
                hi.x = std::max(hi.x, p.x);
                hi.y = std::max(hi.y, p.y);
            }
            return {uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y)};
        }
        }
    };

    FlowModulusProbe out;
    std::vector<Vec2> pts;
    for (int i = 0; i < pair_count; ++i) {
        const double sep = 1e-6 * std::pow(1e5, double(i) / (pair_count - 1));
        Vec2 a, b;
        if (tangential) {
            const double r = uniform(rng, 0.2, 0.7);
            const double ang = uniform(rng, 0.0, 2.0 * kPi);
            a = r * Vec2{std::cos(ang), std::sin(ang)};
            b = rotate(a, 2.0 * std::asin(0.5 * sep / r));
        } else {
            const double phi = uniform(rng, 0.0, 2.0 * kPi);
            a = draw_base();
            b = a + sep * Vec2{std::cos(phi), std::sin(phi)};
        }
        pts.push_back(a);
        pts.push_back(b);
        out.init_sep.push_back(sep);
    }

    const auto rows = apply_operator_to_points(traj, cfg, pts);

    auto separation = [&](const Vec2& a, const Vec2& b) {
        if (dom.kind == DomainKind::Torus)
            return norm(Vec2{reduce_periodic(a.x - b.x, dom.period),
                             reduce_periodic(a.y - b.y, dom.period)});
        return norm(a - b);
    };

    std::vector<double> lx(pair_count);
    for (int i = 0; i < pair_count; ++i)
        lx[i] = std::log(separation(rows[0][2 * i], rows[0][2 * i + 1]));
    double mx = 0.0;
    for (double v : lx)
        mx += v;
    mx /= pair_count;

    const double r_floor = kit.r_min();
    std::vector<double> ly(pair_count);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double t = traj.time_at(k);
        out.times.push_back(t);
        std::vector<double> sk(pair_count);
        double my = 0.0;
        for (int i = 0; i < pair_count; ++i) {
            sk[i] = separation(rows[k][2 * i], rows[k][2 * i + 1]);
            ly[i] = std::log(sk[i]);
            my += ly[i];
        }
        my /= pair_count;
        // one fused pass so the identical-data frame yields a slope of
        // exactly one: both reductions see the same terms in the same order
        double sxx = 0.0, sxy = 0.0;
        for (int i = 0; i < pair_count; ++i) {
            const double dx = lx[i] - mx;
            const double dy = ly[i] - my;
            sxx += dx * dx;
            sxy += dx * dy;
        }
        out.alpha.push_back(sxy / sxx);
        if (k > 0)
            for (int i = 0; i < pair_count; ++i) {
                const double gap = std::abs(kit.big_m_extended(std::max(out.sep[0][i], r_floor)) -
                                            kit.big_m_extended(std::max(sk[i], r_floor)));
                out.fitted_c = std::max(out.fitted_c, gap / (omega_norm * t));
            }
        out.sep.push_back(std::move(sk));
    }
    return out;
}

} // namespace vlab
