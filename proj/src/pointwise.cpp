#include "vlab/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "vlab/modulus.hpp"
#include "vlab/particles.hpp"

namespace vlab {

std::vector<double> default_p_grid(const ThetaProfile& theta)
{
    const double lo = theta.log_c0();
    const double hi = 300.0;
    const int n = 60;
    std::vector<double> grid(n);
    for (int k = 0; k < n; ++k) {
        const double s = static_cast<double>(k + 1) / n;
        grid[k] = lo * std::pow(hi / lo, s);
    }
    return grid;
}

double ynorm(const std::vector<double>& values, const std::vector<double>& weights,
             const ThetaProfile& theta, std::vector<double> p_grid)
{
    theta.validate();
    if (values.empty())
        throw std::invalid_argument("ynorm: empty sample set");
    if (values.size() != weights.size())
        throw std::invalid_argument("ynorm: size mismatch");
    if (p_grid.empty())
        p_grid = default_p_grid(theta);

    // log w_i and log|omega_i| for the log-sum-exp evaluation
    std::vector<double> lw, lv;
    lw.reserve(values.size());
    lv.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("ynorm: weights must be positive");
        const double a = std::abs(values[i]);
        if (a == 0.0)
            continue;
        lw.push_back(std::log(weights[i]));
        lv.push_back(std::log(a));
    }
    if (lv.empty())
        return 0.0;

    double best = 0.0;
    for (double p : p_grid) {
        if (!(p > theta.log_c0()))
            throw std::invalid_argument("ynorm: p_grid entries must exceed log c0");
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lv.size(); ++i)
            m = std::max(m, lw[i] + p * lv[i]);
        double s = 0.0;
        for (std::size_t i = 0; i < lv.size(); ++i)
            s += std::exp(lw[i] + p * lv[i] - m);
        const double log_lp = (m + std::log(s)) / p;
        best = std::max(best, std::exp(log_lp) / theta(p));
    }
    return best;
}

namespace {

// Simpson rule on a uniform grid with an even panel count.
double simpson(const std::function<double(double)>& f, double a, double b, int panels)
{
    if (panels % 2)
        ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        s += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

struct Rearrangement {
    std::string name;
    std::function<Vec2(const Vec2&)> inverse;
};

std::vector<Rearrangement> rearrangement_library(const Domain& dom)
{
    std::vector<Rearrangement> lib;
    lib.push_back({"identity", [](const Vec2& y) { return y; }});
    // Rotation about the origin (maps the disk and the plane onto themselves).
    const double a = 1.0;
    lib.push_back({"rotation", [a](const Vec2& y) { return rotate(y, -a); }});
    if (dom.kind != DomainKind::Torus) {
        // Radial twist: angle shifted by a compactly supported profile of r.
        lib.push_back({"twist", [](const Vec2& y) {
                           const double r = norm(y);
                           double g = 0.0;
                           const double u = r / 0.9;
                           if (u < 1.0)
                               g = std::exp(-1.0 / (1.0 - u * u));
                           return rotate(y, -0.5 * g);
                       }});
    }
    return lib;
}

} // namespace

PointwiseAuditReport pointwise_scaling_audit(const Domain& dom, const VorticitySpec& omega,
                                             const ThetaProfile& theta,
                                             const std::vector<double>& m_list,
                                             double ratio_cap)
{
    for (std::size_t i = 0; i + 1 < m_list.size(); ++i)
        if (!(m_list[i] > m_list[i + 1]))
            throw std::invalid_argument("pointwise audit: m_list must decrease");
    for (double m : m_list)
        if (!(m > 0.0 && m < 1.0))
            throw std::invalid_argument("pointwise audit: m_list entries must lie in (0,1)");

    PointwiseAuditReport rep;
    rep.ratio_cap = ratio_cap;

    // Sample-based norms for the bound's denominator.
    {
        ParticleFlow flow = discretize(omega, 256);
        std::vector<double> vals, wts;
        for (std::size_t i = flow.atom_count; i < flow.size(); ++i)
            if (flow.weights[i] > 0.0) {
                vals.push_back(flow.values[i]);
                wts.push_back(flow.weights[i]);
            }
        rep.ynorm_value = vals.empty() ? 0.0 : ynorm(vals, wts, theta);
    }
    const VorticityNorms norms = vorticity_norms(omega);
    rep.l1 = norms.l1;

    // Radius of a ball containing the support, for the outer integral.
    double r_max = 1.0;
    {
        Vec2 lo, hi;
        if (omega.support_box(lo, hi))
            r_max = std::max({std::abs(lo.x), std::abs(lo.y), std::abs(hi.x), std::abs(hi.y)});
        r_max *= std::sqrt(2.0);
    }

    const double c0 = theta.c0;
    const int theta_nodes = 512;

    for (const auto& map : rearrangement_library(dom)) {
        // Angular average of omega pulled back through the rearrangement:
        // g(r) = sum_theta omega(Z^-1(r e^{i theta})).
        auto ring_mean = [&](double r) {
            double s = 0.0;
            for (int k = 0; k < theta_nodes; ++k) {
                const double ang = two_pi * k / theta_nodes;
                const Vec2 y{r * std::cos(ang), r * std::sin(ang)};
                if (dom.kind == DomainKind::Disk && norm2(y) > 1.0)
                    continue;
                s += omega.density(map.inverse(y));
            }
            return s * (two_pi / theta_nodes);
        };

        if (map.name == "identity") {
            rep.first_integral = r_max > 1.0
                ? simpson([&](double r) { return std::abs(ring_mean(r)); }, 1.0, r_max, 400)
                : 0.0;
            rep.first_ratio = rep.first_integral == 0.0
                ? 0.0
                : rep.first_integral / rep.l1;
        }

        for (double m : m_list) {
            const double bound = c0 * mu(m / c0, theta) * rep.ynorm_value;

            // sum over m <= |Z| <= 1 of m/|Z|^2, radially in log r
            const double third = m * simpson([&](double u) { return ring_mean(std::exp(u)); },
                                             std::log(m), 0.0, 1200);
            // sum over |Z| <= m of 1/|Z|; the lower limit dodges an evaluation
            // at r = 0 where unbounded cores are singular
            const double fourth = simpson([&](double r) { return ring_mean(r); }, 1e-12, m, 400);

            for (int kind = 3; kind <= 4; ++kind) {
                PointwiseAuditRow row;
                row.map = map.name;
                row.integral_kind = kind;
                row.m = m;
                row.integral = std::abs(kind == 3 ? third : fourth);
                row.bound = bound;
                row.ratio = row.integral == 0.0
                    ? 0.0
                    : (bound > 0.0 ? row.integral / bound
                                   : std::numeric_limits<double>::infinity());
                rep.max_ratio = std::max(rep.max_ratio, row.ratio);
                rep.rows.push_back(row);
            }
        }
    }

    rep.pass = rep.max_ratio <= ratio_cap && rep.first_ratio <= 1.0 + 1e-9;
    return rep;
}

} // namespace vlab
