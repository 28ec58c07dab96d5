#pragma once

#include <string>
#include <vector>

#include "vlab/theta.hpp"
#include "vlab/vorticity.hpp"

namespace vlab {

// 60 log-spaced exponents in (log c0, 300].
std::vector<double> default_p_grid(const ThetaProfile& theta);

// max over p of (sum_i w_i |omega_i|^p)^(1/p) / Theta(p), evaluated in log
// space so large p cannot overflow. Weights must be positive.
double ynorm(const std::vector<double>& values, const std::vector<double>& weights,
             const ThetaProfile& theta, std::vector<double> p_grid = {});

struct PointwiseAuditRow {
    std::string map;   // rearrangement name
    int integral_kind; // 3 or 4
    double m;
    double integral;
    double bound;
    double ratio;
};

struct PointwiseAuditReport {
    std::vector<PointwiseAuditRow> rows;
    double ynorm_value = 0.0;
    double l1 = 0.0;
    double first_integral = 0.0; // over |z| >= 1, identity map
    double first_ratio = 0.0;    // against the L1 norm
    double max_ratio = 0.0;
    double ratio_cap = 20.0;
    bool pass = false;
};

// Evaluates the truncated-kernel integrals sum_{m <= |Z| <= 1} m/|Z|^2 and
// sum_{|Z| <= m} 1/|Z| of the initial vorticity pushed through a small library
// of measure-preserving rearrangements Z, and compares each against
// c0 * mu(m/c0) * ynorm. Report-only: pass means all ratios stay below the cap.
PointwiseAuditReport pointwise_scaling_audit(const Domain& dom, const VorticitySpec& omega,
                                             const ThetaProfile& theta,
                                             const std::vector<double>& m_list,
                                             double ratio_cap = 20.0);

} // namespace vlab
