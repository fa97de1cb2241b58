#pragma once

#include <vector>

#include "isoyamabe/integrate.hpp"
#include "isoyamabe/problem.hpp"

namespace isoyamabe {

/// Rescaled limit Cauchy problem near a singular endpoint:
///   v'' + (H0/r) v' + |v|^{p-1} v = 0,  v(0) = 1, v'(0) = 0.
struct LimitConfig {
    double H0 = 0.0;  ///< coefficient at the singularity (= m1 for the left endpoint)
    double p = 2.0;
    double K = 100.0; ///< integration horizon

    void validate() const;
};

/// Subcriticality (H0+1)/2 < (p+1)/(p-1), strictly. Under it the limit
/// solution oscillates with infinitely many zeroes; the equality case is
/// critical and excluded.
bool subcritical_check(double H0, double p);

/// Integrates the limit problem on [0, K]. The returned trajectory starts
/// with the exact sample (0, 1, 0); integration starts from the even series
/// with curvature v''(0) = -1/(1 + H0).
Trajectory solve_limit(const LimitConfig& cfg,
                       const IntegratorConfig& iconfig = IntegratorConfig{1e-5, 1e-12, 1e-14,
                                                                          1e-2, 1e-12});

struct RescaledTrajectory {
    Trajectory traj;       ///< z on [0, min(K, dscaled * a0 * sqrt(lambda))]
    bool truncated = false;  ///< true when the source domain ends before K
};

/// Rescales a forward trajectory of the main equation,
///   z(r) = dscaled^{-2/(p-1)} w(r / (dscaled sqrt(lambda))),
/// so that z(0) = 1, z'(0) = 0. The source must have been shot with
/// d = dscaled^{2/(p-1)}. The -dscaled^{-2} z perturbation stays inside the
/// source; it is not modelled separately.
RescaledTrajectory rescale_z(const ProblemSpec& spec, const IntegratorConfig& config,
                             double dscaled, const Trajectory& traj_of_w, double K);

/// C^1 distance max_{grid} |z - v0| + |z' - v0'| over a 1000-point uniform
/// grid on [0, K], via dense output.
double convergence_gap(const Trajectory& z, const Trajectory& v0, double K);

/// Zero counts of w_d in (0, eps) along the given ladder of d values.
std::vector<int> zero_growth_check(const ProblemSpec& spec, const IntegratorConfig& config,
                                   double eps, const std::vector<double>& d_ladder);

}  // namespace isoyamabe
