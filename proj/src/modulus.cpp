#include "vlab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlab/quadrature.hpp"

namespace vlab {

double mu(double r, const ThetaProfile& theta) {
    if (r < 0.0) throw std::invalid_argument("mu: r must be >= 0");
    if (r == 0.0) return 0.0;
    const double knee = 1.0 / theta.c0;
    const double rr = std::min(r, knee);
    const double L = std::log(1.0 / rr);
    return rr * L * theta(L);
}

double mu_star(const ThetaProfile& theta) {
    return mu(1.0 / theta.c0, theta);
}

namespace {

// integral_{r}^{min(upper, 1/c0)} ds / mu(s), via u = ln(1/s):
// ds/(s L Theta(L)) -> du/(u Theta(u)) on [ln c0, ln(1/r)]
double singular_piece(double r, double u_hi, const ThetaProfile& theta, double rel_tol) {
    const double u_lo = theta.log_c0();
    if (u_hi <= u_lo) return 0.0;
    return integrate_rel([&](double u) { return 1.0 / (u * theta(u)); }, u_lo, u_hi, rel_tol);
}

} // namespace

double big_m(double r, const ThetaProfile& theta, double rel_tol) {
    const double ms = mu_star(theta);
    if (!(r > 0.0) || r > ms * (1.0 + 1e-12))
        throw std::domain_error("big_m: r must lie in (0, mu(1/c0)]");
    r = std::min(r, ms);
    const double knee = 1.0 / theta.c0;
    // capped branch: integrand is exactly 1/mu_star
    const double flat = (ms - std::max(r, knee)) / ms;
    if (r >= knee) return flat;
    return flat + singular_piece(r, std::log(1.0 / r), theta, rel_tol);
}

double nu(double r, const ThetaProfile& theta) {
    return std::exp(-big_m(r, theta));
}

ModulusKit::ModulusKit(ThetaProfile theta, std::size_t nodes, double r_min)
    : theta_(theta), r_min_(r_min) {
    theta_.validate();
    mu_star_ = vlab::mu_star(theta_);
    if (!(r_min > 0.0) || r_min >= mu_star_)
        throw std::invalid_argument("modulus kit: r_min must lie in (0, mu_star)");
    if (nodes < 16)
        throw std::invalid_argument("modulus kit: too few nodes");

    // log-spaced nodes, with the branch knee pinned to a node so the
    // interpolation error stays local to each smooth piece
    std::vector<double> logr(nodes);
    const double lo = std::log(r_min), hi = std::log(mu_star_);
    for (std::size_t i = 0; i < nodes; ++i)
        logr[i] = lo + (hi - lo) * double(i) / double(nodes - 1);
    const double knee = std::log(1.0 / theta_.c0);
    if (knee > lo && knee < hi) {
        auto it = std::lower_bound(logr.begin(), logr.end(), knee);
        if (it != logr.end() && std::abs(*it - knee) > 1e-14) {
            if (it != logr.begin() && std::abs(*(it - 1) - knee) > 1e-14)
                logr.insert(it, knee);
            else if (it != logr.begin())
                *(it - 1) = knee;
        }
    }

    // incremental quadrature from the top node (where big_m = 0) downward:
    // strictly monotone by construction, total abs error ~ nodes * piece_tol
    const std::size_t n = logr.size();
    std::vector<double> m(n, 0.0);
    for (std::size_t k = n - 1; k-- > 0;) {
        const double ra = std::exp(logr[k]);
        const double rb = std::exp(logr[k + 1]);
        double piece;
        const double knee_r = 1.0 / theta_.c0;
        if (ra >= knee_r) {
            piece = (rb - ra) / mu_star_;
        } else if (rb <= knee_r * (1.0 + 1e-14)) {
            piece = integrate([&](double u) { return 1.0 / (u * theta_(u)); },
                              std::log(1.0 / rb), std::log(1.0 / ra), 1e-13);
        } else {
            piece = (rb - knee_r) / mu_star_ +
                    integrate([&](double u) { return 1.0 / (u * theta_(u)); },
                              theta_.log_c0(), std::log(1.0 / ra), 1e-13);
        }
        m[k] = m[k + 1] + piece;
    }
    m_max_ = m.front();

    m_of_logr_ = PchipInterp(logr, m);
    std::vector<double> m_rev(m.rbegin(), m.rend());
    std::vector<double> logr_rev(logr.rbegin(), logr.rend());
    logr_of_m_ = PchipInterp(std::move(m_rev), std::move(logr_rev));
}

double ModulusKit::big_m(double r) const {
    if (!(r > 0.0)) throw std::domain_error("big_m: r must be positive");
    const double lr = std::log(std::clamp(r, r_min_, mu_star_));
    const double v = m_of_logr_(lr);
    return std::max(v, 0.0);
}

double ModulusKit::big_m_extended(double r) const {
    if (r >= 1.0 / theta_.c0)
        return (mu_star_ - r) / mu_star_;
    return big_m(r);
}

double ModulusKit::nu(double r) const {
    if (r <= 0.0) return 0.0;
    return std::exp(-big_m_extended(std::max(r, r_min_)));
}

double ModulusKit::inverse(double m) const {
    if (m <= 0.0) return mu_star_;
    if (m >= m_max_) return r_min_;
    return std::exp(logr_of_m_(m));
}

double ModulusKit::osgood_envelope(double c, double gamma_bar, double t) const {
    if (gamma_bar < 0.0 || t < 0.0)
        throw std::invalid_argument("osgood envelope: gamma_bar and t must be >= 0");
    if (c == 0.0) return 0.0;
    if (!(c > 0.0)) throw std::domain_error("osgood envelope: c must be >= 0");
    const double arg = big_m_extended(std::max(c, r_min_)) - gamma_bar * t;
    if (arg <= 0.0) return mu_star_; // forcing has exhausted the modulus budget
    return inverse(arg);
}

} // namespace vlab
