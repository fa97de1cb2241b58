#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "isoyamabe/problem.hpp"

namespace isoyamabe {

/// State of the scalar second-order equation at one radius.
struct ODEState {
    double r = 0.0;
    double w = 0.0;
    double wp = 0.0;
};

enum class Side { forward, backward, merged };

struct IntegratorConfig {
    double eps0 = 1e-4;      ///< series-start offset from the singular endpoint
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 1e-2;
    double zero_tol = 1e-12; ///< refinement tolerance for zeroes and extrema

    void validate(double a0) const;  // throws InvalidArgumentError
};

/// Dense integrated solution path. Samples are the accepted integrator steps,
/// strictly increasing in r; between samples the path is evaluated by the
/// cubic Hermite interpolant of (w, w').
///
/// forward:  r in [eps, a0],      end_state at a0.
/// backward: r in [a0, pi - eps], already mapped through r -> pi - r, so the
///           samples solve the original equation; end_state at a0.
/// merged:   r in [0, pi], produced by the matcher.
struct Trajectory {
    Side side = Side::forward;
    double shoot_param = 0.0;  ///< d (forward) or c (backward)
    std::vector<ODEState> samples;
    std::vector<double> zeroes;                      ///< refined, increasing
    std::vector<std::pair<double, double>> extrema;  ///< refined (r, w)
    ODEState end_state;                              ///< state at the matching point
    double zero_tol = 1e-12;

    double r_front() const { return samples.front().r; }
    double r_back() const { return samples.back().r; }

    /// Hermite dense output; r clamped to the sample range.
    double eval_w(double r) const;
    /// Slope of the w-interpolant (so extrema of eval_w match eval_wp roots).
    double eval_wp(double r) const;

  private:
    std::size_t segment_index(double r) const;
};

/// Series start at the left singularity: state at r = eps0 of the even local
/// expansion w = d + (1/2) w''(0) r^2 with w''(0) = -f(d)/(1 + m1).
/// Truncation is O(eps0^4) since the expansion is even to this order.
ODEState series_start_left(const ProblemSpec& spec, double d, double eps0);

/// Same for the reflected problem at the right singularity; the curvature is
/// -f(c)/(1 + m2) because the reflected coefficient has h~(0) = m2.
ODEState series_start_right(const ProblemSpec& spec, double c, double eps0);

/// Integrates the forward problem w(0) = d, w'(0) = 0 on [eps, a0].
/// For large |d| the start offset shrinks below eps0 automatically so the
/// quadratic series stays within its validity scale.
Trajectory integrate_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d);

/// Integrates the reflected problem from the right endpoint and maps it back
/// to [a0, pi]; end_state = (a0, w(a0), w'(a0)) with w'(a0) = -omega'(pi-a0).
Trajectory integrate_backward(const ProblemSpec& spec, const IntegratorConfig& config, double c);

/// E(r) = w'^2/2 + G(w) at every sample. Nonincreasing in r on [0, a0],
/// nondecreasing on [a0, pi].
std::vector<std::pair<double, double>> energy_profile(const ProblemSpec& spec,
                                                      const Trajectory& traj);

/// Refines a zero of w inside `bracket` (which must contain a sign change)
/// to zero_tol, by bisection on the cubic Hermite interpolant.
double refine_zero(const Trajectory& traj, std::pair<double, double> bracket);

/// Max over interior samples of |w''_fd + (h/sin r) w' + f(w)|, with w''_fd
/// a centered second difference of the dense output on a locally uniform
/// stencil. An integration health check, not an error bound.
double ode_defect(const ProblemSpec& spec, const Trajectory& traj);

/// Writes `r,w,wp` rows, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Number of zeroes of w_d in (0, r_end), counted in a streaming pass
/// (no sample storage); zeroes within zero_tol of r_end are excluded.
int count_zeroes_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d,
                         double r_end);

}  // namespace isoyamabe
