#pragma once

#include <cstddef>
#include <vector>

#include "vlab/interp.hpp"
#include "vlab/theta.hpp"

namespace vlab {

// Modulus of continuity induced by a growth profile:
//
//   mu(r)    = r ln(1/r) Theta(ln(1/r))   for 0 < r <= 1/c0,
//              capped at its 1/c0 value for r >= 1/c0, mu(0) = 0.
//   big_m(r) = integral_r^{mu(1/c0)} ds / mu(s)   (strictly decreasing, -> inf
//              iff Theta is Osgood-admissible)
//   nu(r)    = exp(-big_m(r))             (increasing, (0,1])
//
// big_m is evaluated by adaptive quadrature with the substitution u = ln(1/s)
// on the singular branch; the capped branch integrates exactly.

double mu(double r, const ThetaProfile& theta);

// top of the mu range: mu(1/c0), also the right end of big_m's domain
double mu_star(const ThetaProfile& theta);

double big_m(double r, const ThetaProfile& theta, double rel_tol = 1e-9);

double nu(double r, const ThetaProfile& theta);

// Tabulated modulus toolkit: log-spaced nodes on [r_min, mu_star], monotone
// cubic interpolation, inverse for envelope evaluation.  Immutable after
// construction and safe to share.
class ModulusKit {
public:
    explicit ModulusKit(ThetaProfile theta, std::size_t nodes = 2048, double r_min = 1e-16);

    const ThetaProfile& theta() const { return theta_; }

    double mu(double r) const { return vlab::mu(r, theta_); }

    // table lookup, domain [r_min, mu_star]; clamps to the table range
    double big_m(double r) const;

    // linear continuation (mu_star - r)/mu_star for r >= 1/c0; negative past
    // mu_star.  Needed by envelope checks on distances beyond the cap.
    double big_m_extended(double r) const;

    // exp(-big_m_extended); 0 at r <= 0
    double nu(double r) const;

    // big_m^{-1} on [0, m_max] -> [r_min, mu_star]
    double inverse(double m) const;

    // rho_max(t) = big_m^{-1}(max(0, big_m(c) - gamma_bar t)); 0 when c = 0;
    // returns the table maximum once the argument falls below zero.
    double osgood_envelope(double c, double gamma_bar, double t) const;

    double mu_star() const { return mu_star_; }
    double r_min() const { return r_min_; }
    double m_max() const { return m_max_; }
    bool osgood() const { return theta_.osgood(); }

private:
    ThetaProfile theta_;
    double r_min_;
    double mu_star_;
    double m_max_;
    PchipInterp m_of_logr_;   // ln r -> big_m
    PchipInterp logr_of_m_;   // big_m -> ln r (inverse table)
};

} // namespace vlab
