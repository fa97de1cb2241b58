#include "isoyamabe/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace isoyamabe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Zeroes within zero_tol of the matching point are attributed to the other
// side; the count is over the half-open interval ending at a0.
int count_forward_zeroes(const Trajectory& traj, double a0, double zero_tol) {
    int n = 0;
    for (double z : traj.zeroes)
        if (z < a0 - zero_tol) ++n;
    return n;
}

int count_backward_zeroes(const Trajectory& traj, double a0, double zero_tol) {
    int n = 0;
    for (double z : traj.zeroes)
        if (z > a0 + zero_tol) ++n;
    return n;
}

}  // namespace

double theta_lift(double x, double y, int zero_count) {
    if (x == 0.0 && y == 0.0) throw LiftError("phase point at the origin has no argument");
    const double alpha = std::atan2(y, x);  // principal angle in (-pi, pi]
    const double hi = 0.5 * kPi - zero_count * kPi;
    double theta = alpha + 2.0 * kPi * std::floor((hi - alpha) / (2.0 * kPi));
    if (theta == hi) theta -= 2.0 * kPi;  // window is open at the top
    if (!(theta >= hi - 2.0 * kPi && theta < hi))
        throw LiftError("no admissible lift for the given zero count");
    return theta;
}

int zero_count_from_theta(double theta) {
    return -static_cast<int>(std::floor((theta - 0.5 * kPi) / kPi + 1e-12)) - 1;
}

namespace {

// Lift with the boundary convention made numerical: when w(a0) vanishes to
// within zero_tol (relative to the slope), the zero is attributed to
// [a0, pi) and the angle sits exactly on the closed bottom of the window.
double lifted_angle(double x, double y, int zero_count, double sign_param, double zero_tol) {
    double theta;
    if (std::fabs(x) <= zero_tol * std::fabs(y)) {
        theta = -0.5 * kPi - zero_count * kPi;
        if (sign_param < 0.0) theta -= kPi;
        return theta;
    }
    theta = theta_lift(x, y, zero_count);
    const double lo_pos = 0.5 * kPi - (zero_count + 1) * kPi;
    if ((theta >= lo_pos) != (sign_param > 0.0))
        throw LiftError("lift branch inconsistent with sign of the shoot parameter");
    return theta;
}

}  // namespace

ShotResult shoot_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d) {
    if (d == 0.0) throw InvalidArgumentError("I(d) requires d != 0");
    ShotResult shot;
    shot.traj = integrate_forward(spec, config, d);
    shot.zero_count = count_forward_zeroes(shot.traj, spec.a0, config.zero_tol);

    const ODEState& e = shot.traj.end_state;
    shot.point.x = e.w;
    shot.point.y = e.wp;
    shot.point.radius = std::hypot(e.w, e.wp);
    shot.point.theta = lifted_angle(e.w, e.wp, shot.zero_count, d, config.zero_tol);
    return shot;
}

ShotResult shoot_backward(const ProblemSpec& spec, const IntegratorConfig& config, double c) {
    if (c == 0.0) throw InvalidArgumentError("J(c) requires c != 0");
    ShotResult shot;
    shot.traj = integrate_backward(spec, config, c);
    shot.zero_count = count_backward_zeroes(shot.traj, spec.a0, config.zero_tol);

    // vartheta = -theta of the reflected trajectory; the reflected end state
    // is (w(a0), -w'(a0)), so the lift is taken there and negated
    const ODEState& e = shot.traj.end_state;
    shot.point.x = e.w;
    shot.point.y = e.wp;
    shot.point.radius = std::hypot(e.w, e.wp);
    shot.point.theta = -lifted_angle(e.w, -e.wp, shot.zero_count, c, config.zero_tol);
    return shot;
}

PhasePoint I_map(const ProblemSpec& spec, const IntegratorConfig& config, double d) {
    return shoot_forward(spec, config, d).point;
}

PhasePoint J_map(const ProblemSpec& spec, const IntegratorConfig& config, double c) {
    return shoot_backward(spec, config, c).point;
}

int zero_count_right(const ProblemSpec& spec, const IntegratorConfig& config, double c) {
    const ShotResult shot = shoot_backward(spec, config, c);
    const int formula = zero_count_from_theta(-shot.point.theta);
    if (formula != shot.zero_count)
        throw CountMismatchError("direct zero count " + std::to_string(shot.zero_count) +
                                 " disagrees with floor-formula count " + std::to_string(formula));
    return shot.zero_count;
}

CurveScan scan_curve(const ProblemSpec& spec, const IntegratorConfig& config, CurveSide side,
                     std::vector<double> param_grid, int budget) {
    if (param_grid.empty() || std::fabs(param_grid.front() - 1.0) > 1e-12)
        throw InvalidArgumentError("scan grid must start at 1");
    if (!std::is_sorted(param_grid.begin(), param_grid.end()))
        throw InvalidArgumentError("scan grid must be increasing");
    param_grid.front() = 1.0;

    CurveScan scan;
    scan.side = side;
    scan.spec = spec;
    scan.config = config;

    auto eval = [&](double v) {
        return side == CurveSide::R ? shoot_forward(spec, config, v)
                                    : shoot_backward(spec, config, v);
    };

    for (double v : param_grid) {
        const ShotResult s = eval(v);
        scan.params.push_back(v);
        scan.points.push_back(s.point);
        scan.zero_counts.push_back(s.zero_count);
    }

    // insert geometric midpoints until the lift is unambiguous everywhere
    std::size_t i = 0;
    while (i + 1 < scan.params.size()) {
        if (std::fabs(scan.points[i + 1].theta - scan.points[i].theta) < 0.5 * kPi) {
            ++i;
            continue;
        }
        if (static_cast<int>(scan.params.size()) >= budget)
            throw ScanBudgetError("curve scan would exceed its sample budget of " +
                                  std::to_string(budget) + " points");
        const double mid = std::sqrt(scan.params[i] * scan.params[i + 1]);
        if (mid <= scan.params[i] || mid >= scan.params[i + 1])
            throw ScanBudgetError("scan refinement interval collapsed at param " +
                                  std::to_string(scan.params[i]));
        const ShotResult s = eval(mid);
        scan.params.insert(scan.params.begin() + i + 1, mid);
        scan.points.insert(scan.points.begin() + i + 1, s.point);
        scan.zero_counts.insert(scan.zero_counts.begin() + i + 1, s.zero_count);
    }
    return scan;
}

ExitTimes exit_times(const CurveScan& scan, int count) {
    const double sgn = scan.side == CurveSide::R ? -1.0 : 1.0;
    auto theta_of = [&](double v) {
        return scan.side == CurveSide::R ? shoot_forward(scan.spec, scan.config, v).point.theta
                                         : shoot_backward(scan.spec, scan.config, v).point.theta;
    };

    ExitTimes out;
    out.side = scan.side;
    for (int i = 0; i <= count; ++i) {
        const double target = sgn * i * kPi;
        // last grid bracket containing the level
        std::ptrdiff_t found = -1;
        for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(scan.params.size()) - 2; j >= 0; --j) {
            const double f0 = scan.points[j].theta - target;
            const double f1 = scan.points[j + 1].theta - target;
            if (f0 == 0.0 || f0 * f1 < 0.0) {
                found = j;
                break;
            }
        }
        if (found < 0 && !scan.points.empty() && scan.points.back().theta == target)
            found = static_cast<std::ptrdiff_t>(scan.params.size()) - 1;
        if (found < 0) {
            double lo = scan.points.front().theta, hi = lo;
            for (const PhasePoint& p : scan.points) {
                lo = std::min(lo, p.theta);
                hi = std::max(hi, p.theta);
            }
            throw ScanRangeError("scan never attains winding angle " + std::to_string(target) +
                                     "; widen the scan range",
                                 lo, hi);
        }

        double vl = scan.params[found];
        double v;
        if (scan.points[found].theta == target) {
            v = vl;
        } else {
            double vh = scan.params[found + 1];
            double fl = scan.points[found].theta - target;
            for (int it = 0; it < 80 && vh - vl > 1e-11 * vh; ++it) {
                const double vm = 0.5 * (vl + vh);
                const double fm = theta_of(vm) - target;
                if (fm == 0.0) {
                    vl = vh = vm;
                    break;
                }
                if ((fl < 0.0) != (fm < 0.0)) {
                    vh = vm;
                } else {
                    vl = vm;
                    fl = fm;
                }
            }
            v = 0.5 * (vl + vh);
        }
        out.params.push_back(v);
        const PhasePoint p = scan.side == CurveSide::R ? I_map(scan.spec, scan.config, v)
                                                       : J_map(scan.spec, scan.config, v);
        out.radii.push_back(p.radius);
    }
    return out;
}

void write_scan_csv(std::ostream& os, const CurveScan& scan) {
    os << "param,x,y,radius,theta,zeros\n";
    char buf[160];
    for (std::size_t i = 0; i < scan.params.size(); ++i) {
        const PhasePoint& p = scan.points[i];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", scan.params[i], p.x,
                      p.y, p.radius, p.theta, scan.zero_counts[i]);
        os << buf;
    }
}

void write_scan_csv(const std::string& path, const CurveScan& scan) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_scan_csv(os, scan);
}

}  // namespace isoyamabe
