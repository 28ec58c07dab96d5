#pragma once

#include <vector>

#include "vlab/modulus.hpp"
#include "vlab/solver.hpp"
#include "vlab/twist.hpp"
#include "vlab/vorticity.hpp"

namespace vlab {

// |w|_{L1 cap Y}: the norm entering every envelope exponent. Atoms count as
// unit-weight samples of the discrete Y-norm.
double flow_norm_l1y(const ParticleFlow& flow, const ThetaProfile& theta);

// One (time, eps) cell of a stability experiment.
struct StabilityCell {
    double t = 0.0;
    double eps = 0.0;
    double d = 0.0;        // sup-label distance between the two runs
    double nu_d = 0.0;     // nu(d)
    double envelope = 0.0; // fitted bound evaluated at this cell
    bool pass = false;
};

// Slope of ln d against ln eps at one time, restricted to cells on the
// singular branch of the modulus (d below the knee); the capped branch
// destroys the power law.
struct AlphaFit {
    double t = 0.0;
    double alpha = 0.0;
    double se = 0.0; // standard error of the slope
    int points = 0;  // cells used; alpha is meaningless below 2
};

struct StabilityReport {
    std::vector<double> times; // kept frame times
    std::vector<double> eps_list;
    std::vector<std::vector<double>> d; // [time][eps]
    std::vector<AlphaFit> alpha;        // aligned with times; t = 0 row excluded

    // single fitted constant for the data-dependence envelope
    //   nu(d(t; eps)) <= exp(C t |w0|) nu(C eps |pert|)
    // or the leading constant C1 of the domain-dependence forced envelope
    //   rho' = C1 |w0| mu(rho) + C2 eta_eps
    double envelope_c = 0.0;
    bool envelope_found = false;
    double envelope_cap = 0.0; // top of the admissible search window
    double forcing_c = 0.0;    // C2 (domain dependence only)

    std::vector<StabilityCell> cells; // time-major, then eps
    bool all_pass = false;
    bool converged = true; // every Picard run converged; false aborts early

    // norms entering the envelope (both families reported)
    double base_norm = 0.0;      // |w0|_{L1 cap Y}
    double base_norm_linf = 0.0;
    double pert_norm = 0.0;      // |perturbation|_{L1 cap Lp}, unit amplitude
    double pert_norm_linf = 0.0;
    double p = 4.0;
    int grid_n = 0;

    // domain dependence: measured map sizes per eps
    std::vector<double> forcing;    // |grad Phi_eps - I|_{C1}
    std::vector<double> forcing_c2; // |Phi_eps - id|_{C2}
};

struct StabilityConfig {
    SolverConfig solver;
    int grid_n = 24;
    double p = 4.0;        // exponent of the data-difference norm
    int report_stride = 1; // keep every k-th frame (the last is always kept)
    void validate() const;
};

// Runs the base spec and spec + eps * perturbation on a shared label grid for
// every eps, records sup-label distances, fits the Holder exponent per time,
// and searches for the single envelope constant across all (t, eps) cells.
StabilityReport data_dependence_experiment(const VorticitySpec& spec,
                                           const VorticitySpec& perturbation,
                                           const std::vector<double>& eps_list,
                                           const StabilityConfig& cfg,
                                           const ThetaProfile& theta);

// Finite-difference check of the two-flow contraction estimate
//   d'(out) <= C ( |w0 - w1| + |w0| ( mu(d_in) + mu(d_out) ) )
// where out = one solution-operator application to each input trajectory.
struct QuasiLipschitzReport {
    std::vector<double> times;    // interval midpoints
    std::vector<double> d_in;     // per frame: input trajectory distance
    std::vector<double> d_out;    // per frame: output trajectory distance
    std::vector<double> deriv;    // per interval: FD derivative of d_out
    std::vector<double> rhs_unit; // per interval: bracket at the midpoint
    std::vector<double> ratio;    // deriv / rhs_unit (0 when both vanish)
    double fitted_c = 0.0;        // max ratio, floored at 0
    double median_ratio = 0.0;
    bool all_singular = true; // every distance stayed below the modulus knee
    double diff_norm = 0.0;   // |w0 - w1|_{L1 cap Lp}
    double base_norm = 0.0;   // |w0|_{L1 cap Y}
};

QuasiLipschitzReport quasi_lipschitz_probe(const Trajectory& x, const Trajectory& y,
                                           const ParticleFlow& omega0,
                                           const ParticleFlow& omega1,
                                           const ThetaProfile& theta,
                                           const SolverConfig& cfg, double p = 4.0);

// Compares the flow of w0 with the conjugated flow of w0 composed with the
// inverse twist: X1 against Phi^{-1} o X2 o Phi, per eps. The twist maps the
// domain onto itself, so both runs share one Green's function. Checks the
// Osgood envelope with forcing proportional to the measured map size and fits
// the Holder-in-eps exponent per time.
StabilityReport domain_dependence_experiment(const VorticitySpec& spec,
                                             const TwistMap& twist,
                                             const std::vector<double>& eps_list,
                                             const StabilityConfig& cfg,
                                             const ThetaProfile& theta);

// Checks d(X(t), id) against the bounding solution of
//   rho' = C1 |w0| + C2 |w0| mu(rho), rho(0) = 0
// for fitted C1 (early-time slope) and minimal C2.
struct TimeContinuityReport {
    std::vector<double> times;
    std::vector<double> dist;     // d(X(t), id)
    std::vector<double> envelope; // fitted rho(t)
    double c1 = 0.0;
    double c2 = 0.0;
    double omega_norm = 0.0;
    bool pass = false;
};

TimeContinuityReport time_continuity_audit(const Trajectory& traj, double omega_norm,
                                           const ThetaProfile& theta);

} // namespace vlab
