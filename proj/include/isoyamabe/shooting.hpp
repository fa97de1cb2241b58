#pragma once

#include <vector>

#include "isoyamabe/integrate.hpp"
#include "isoyamabe/problem.hpp"

namespace isoyamabe {

/// Phase-space point (w(a0), w'(a0)) with polar data. theta is the lifted
/// (continuous) argument, placed by the zero count of the trajectory.
struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    double theta = 0.0;
};

/// One endpoint shot: phase point at a0, the half-open zero count on the
/// shot's own side, and the trajectory it came from.
struct ShotResult {
    PhasePoint point;
    int zero_count = 0;
    Trajectory traj;
};

/// Lifted argument of (x, y) != (0, 0). Picks theta = alpha + 2 pi j inside
/// the window [pi/2 - (n+2) pi, pi/2 - n pi) determined by the zero count n;
/// the upper half of the window is the d > 0 branch, the lower half is the
/// d < 0 branch (theta(-d) = theta(d) - pi).
double theta_lift(double x, double y, int zero_count);

/// Inverts the lift: -floor((theta - pi/2)/pi) - 1, with a half-ulp guard so
/// angles sitting exactly on the closed window bottom resolve to the window
/// they start.
int zero_count_from_theta(double theta);

/// Forward shot: I(d) = (w_d(a0), w_d'(a0)) with theta attached.
/// Throws LiftError if the lift lands on the branch inconsistent with
/// sign(d) (zero-count/quadrant mismatch near a boundary case).
ShotResult shoot_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d);

/// Backward shot: J(c) = (w~_c(a0), w~_c'(a0)), vartheta = -theta of the
/// reflected trajectory.
ShotResult shoot_backward(const ProblemSpec& spec, const IntegratorConfig& config, double c);

PhasePoint I_map(const ProblemSpec& spec, const IntegratorConfig& config, double d);
PhasePoint J_map(const ProblemSpec& spec, const IntegratorConfig& config, double c);

/// Zeroes of w~_c in (a0, pi), counted directly and cross-checked against
/// the floor formula N(c) = -floor((-vartheta - pi/2)/pi) - 1.
/// Throws CountMismatchError if the two disagree.
int zero_count_right(const ProblemSpec& spec, const IntegratorConfig& config, double c);

enum class CurveSide { R, S };

/// Sampled shooting curve d -> (theta(d), |I(d)|) (side R) or
/// c -> (vartheta(c), |J(c)|) (side S), refined until consecutive lifted
/// angles differ by less than pi/2.
struct CurveScan {
    CurveSide side = CurveSide::R;
    std::vector<double> params;       ///< increasing, params.front() == 1
    std::vector<PhasePoint> points;
    std::vector<int> zero_counts;
    ProblemSpec spec;                 ///< provenance, used by exit_times
    IntegratorConfig config;
};

/// Scans one side over `param_grid` (increasing, starting at 1), inserting
/// geometric midpoints until every consecutive |delta theta| < pi/2.
/// Throws ScanBudgetError when refinement would exceed `budget` points.
CurveScan scan_curve(const ProblemSpec& spec, const IntegratorConfig& config, CurveSide side,
                     std::vector<double> param_grid, int budget = 20000);

/// Exit times d_i = max{d >= 1 in scan range : theta(d) = -i pi} for
/// i = 0..count (side S: vartheta(c) = +i pi), refined by bisection on the
/// parameter, with the diagnostic radii x_i = |I(d_i)|.
struct ExitTimes {
    CurveSide side = CurveSide::R;
    std::vector<double> params;
    std::vector<double> radii;
};

/// Throws ScanRangeError (with the attained angle range) if the scan never
/// reaches the requested winding angle.
ExitTimes exit_times(const CurveScan& scan, int count);

/// Writes `param,x,y,radius,theta,zeros` rows, 17 significant digits.
void write_scan_csv(std::ostream& os, const CurveScan& scan);
void write_scan_csv(const std::string& path, const CurveScan& scan);

}  // namespace isoyamabe
