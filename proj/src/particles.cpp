#include "vlab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlab/summation.hpp"

namespace vlab {

namespace {
constexpr double kDropTol = 1e-14;
}

double ParticleFlow::circulation() const
{
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double v = weights[i] * values[i];
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    return s + c;
}

double ParticleFlow::covered_area() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

void ParticleFlow::add_tracers(const std::vector<Vec2>& pts)
{
    for (const Vec2& p : pts) {
        labels.push_back(p);
        positions.push_back(p);
        weights.push_back(0.0);
        values.push_back(0.0);
    }
}

std::vector<double> ParticleFlow::gammas() const
{
    std::vector<double> g(size());
    for (std::size_t i = 0; i < size(); ++i)
        g[i] = weights[i] * values[i];
    return g;
}

ParticleFlow discretize(const VorticitySpec& spec, int n_per_axis)
{
    spec.validate();
    if (n_per_axis < 4)
        throw std::invalid_argument("discretize: n_per_axis must be >= 4");

    ParticleFlow flow;
    flow.domain = spec.domain;

    const auto atoms = spec.all_atoms();
    for (const auto& a : atoms) {
        flow.labels.push_back(a.position);
        flow.positions.push_back(a.position);
        flow.weights.push_back(1.0);
        flow.values.push_back(a.circulation);
    }
    flow.atom_count = atoms.size();

    const bool torus = spec.domain.kind == DomainKind::Torus;
    Vec2 lo{0.0, 0.0}, hi{0.0, 0.0};
    bool have_box = spec.support_box(lo, hi);
    double atom_mass = 0.0;
    for (const auto& a : atoms)
        atom_mass += a.circulation;

    if (torus) {
        // The compensating background lives on the whole periodic cell.
        lo = {0.0, 0.0};
        hi = {spec.domain.period, spec.domain.period};
        have_box = spec.has_density() || std::abs(atom_mass) > 1e-12;
    } else if (have_box && spec.domain.kind == DomainKind::Disk) {
        lo.x = std::max(lo.x, -1.0);
        lo.y = std::max(lo.y, -1.0);
        hi.x = std::min(hi.x, 1.0);
        hi.y = std::min(hi.y, 1.0);
    }

    if (!have_box && atoms.empty())
        throw std::invalid_argument("discretize: spec has empty support");

    double spacing = 0.0;
    if (have_box && hi.x > lo.x && hi.y > lo.y) {
        const double hx = (hi.x - lo.x) / n_per_axis;
        const double hy = (hi.y - lo.y) / n_per_axis;
        const double w = hx * hy;
        spacing = std::sqrt(w);

        std::vector<Vec2> cells;
        std::vector<double> vals;
        for (int i = 0; i < n_per_axis; ++i) {
            const double x = lo.x + hx * (i + 0.5);
            for (int j = 0; j < n_per_axis; ++j) {
                const Vec2 c{x, lo.y + hy * (j + 0.5)};
                if (spec.domain.kind == DomainKind::Disk && norm2(c) >= 1.0)
                    continue;
                cells.push_back(c);
                vals.push_back(spec.density(c));
            }
        }

        bool compensated = false;
        if (torus) {
            double total = atom_mass;
            for (std::size_t k = 0; k < cells.size(); ++k)
                total += w * vals[k];
            const double area = spec.domain.period * spec.domain.period;
            if (total != 0.0) {
                const double shift = total / area;
                for (double& v : vals)
                    v -= shift;
                compensated = std::abs(shift) > kDropTol;
            }
        }

        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!compensated && std::abs(vals[k]) < kDropTol)
                continue;
            flow.labels.push_back(cells[k]);
            flow.positions.push_back(cells[k]);
            flow.weights.push_back(w);
            flow.values.push_back(vals[k]);
        }
    }

    if (flow.empty())
        flow.empty_support = true;

    // Blob scale: atoms stay singular, grids smooth at half a spacing.
    flow.params.delta = (flow.size() == flow.atom_count) ? 0.0 : 0.5 * spacing;
    return flow;
}

ParticleFlow discretize_custom(const std::function<double(const Vec2&)>& density,
                               const std::vector<PointVortex>& atoms, Vec2 lo,
                               Vec2 hi, int n_per_axis, const Domain& dom)
{
    dom.validate();
    if (n_per_axis < 4)
        throw std::invalid_argument("discretize: n_per_axis must be >= 4");

    ParticleFlow flow;
    flow.domain = dom;
    for (const auto& a : atoms) {
        flow.labels.push_back(a.position);
        flow.positions.push_back(a.position);
        flow.weights.push_back(1.0);
        flow.values.push_back(a.circulation);
    }
    flow.atom_count = atoms.size();

    double atom_mass = 0.0;
    for (const auto& a : atoms)
        atom_mass += a.circulation;

    const bool torus = dom.kind == DomainKind::Torus;
    if (torus) {
        lo = {0.0, 0.0};
        hi = {dom.period, dom.period};
    } else if (dom.kind == DomainKind::Disk) {
        lo.x = std::max(lo.x, -1.0);
        lo.y = std::max(lo.y, -1.0);
        hi.x = std::min(hi.x, 1.0);
        hi.y = std::min(hi.y, 1.0);
    }

    double spacing = 0.0;
    if (hi.x > lo.x && hi.y > lo.y) {
        const double hx = (hi.x - lo.x) / n_per_axis;
        const double hy = (hi.y - lo.y) / n_per_axis;
        const double w = hx * hy;
        spacing = std::sqrt(w);

        std::vector<Vec2> cells;
        std::vector<double> vals;
        for (int i = 0; i < n_per_axis; ++i) {
            const double x = lo.x + hx * (i + 0.5);
            for (int j = 0; j < n_per_axis; ++j) {
                const Vec2 c{x, lo.y + hy * (j + 0.5)};
                if (dom.kind == DomainKind::Disk && norm2(c) >= 1.0)
                    continue;
                cells.push_back(c);
                vals.push_back(density(c));
            }
        }

        bool compensated = false;
        if (torus) {
            double total = atom_mass;
            for (std::size_t k = 0; k < cells.size(); ++k)
                total += w * vals[k];
            const double area = dom.period * dom.period;
            if (total != 0.0) {
                const double shift = total / area;
                for (double& v : vals)
                    v -= shift;
                compensated = std::abs(shift) > kDropTol;
            }
        }

        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!compensated && std::abs(vals[k]) < kDropTol)
                continue;
            flow.labels.push_back(cells[k]);
            flow.positions.push_back(cells[k]);
            flow.weights.push_back(w);
            flow.values.push_back(vals[k]);
        }
    }

    if (flow.empty())
        flow.empty_support = true;
    flow.params.delta = (flow.size() == flow.atom_count) ? 0.0 : 0.5 * spacing;
    return flow;
}

ParticleFlow discretize_like(const ParticleFlow& proto, const VorticitySpec& spec)
{
    spec.validate();
    if (spec.domain.kind != proto.domain.kind)
        throw std::invalid_argument("discretize_like: domain mismatch");

    ParticleFlow flow = proto;
    const auto atoms = spec.all_atoms();
    if (atoms.size() != proto.atom_count)
        throw std::invalid_argument("discretize_like: atom count mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i)
        flow.values[i] = atoms[i].circulation;
    for (std::size_t i = atoms.size(); i < flow.size(); ++i)
        flow.values[i] = flow.weights[i] > 0.0 ? spec.density(flow.labels[i]) : 0.0;

    if (spec.domain.kind == DomainKind::Torus) {
        double total = 0.0;
        for (std::size_t i = 0; i < flow.size(); ++i)
            total += flow.weights[i] * flow.values[i];
        const double area = spec.domain.period * spec.domain.period;
        if (total != 0.0) {
            const double shift = total / area;
            for (std::size_t i = atoms.size(); i < flow.size(); ++i)
                if (flow.weights[i] > 0.0)
                    flow.values[i] -= shift;
        }
    }
    return flow;
}

std::vector<Vec2> velocity(const ParticleFlow& state, const std::vector<Vec2>& queries)
{
    std::vector<Vec2> out(queries.size());
    if (state.empty() || queries.empty())
        return out;
    const auto gamma = state.gammas();
    induced_velocity(state.domain, state.params.delta,
                     state.positions.data(), gamma.data(), state.size(),
                     queries.data(), nullptr, queries.size(), out.data());
    return out;
}

} // namespace vlab
