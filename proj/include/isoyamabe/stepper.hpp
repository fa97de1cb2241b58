#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "isoyamabe/errors.hpp"

namespace isoyamabe {

using Eigen::Vector2d;

/// Tolerances and limits for the embedded 5(4) integrator.
struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 1e-2;
    double blowup = 1e12;          // abort if any state component exceeds this
    long max_steps = 100000000;    // hard cap on accepted+rejected steps
};

/// One accepted step with derivative data at both ends (enough for cubic
/// Hermite dense output of either state component).
struct StepSegment {
    double r0, r1;
    Vector2d y0, y1;
    Vector2d f0, f1;
};

/// Value of the cubic Hermite interpolant through (x0,v0,s0), (x1,v1,s1) at x.
inline double hermite_value(double x0, double v0, double s0, double x1, double v1, double s1,
                            double x) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * s0 +
           (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * s1;
}

/// Derivative of the same interpolant at x.
inline double hermite_slope(double x0, double v0, double s0, double x1, double v1, double s1,
                            double x) {
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * h * s0 + (-6 * t2 + 6 * t) * v1 +
            (3 * t2 - 2 * t) * h * s1) /
           h;
}

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(r, y) from r0 to
/// r_end > r0, PI step-size control, FSAL. Calls on_step(segment) after each
/// accepted step. Returns the state at r_end (final step clamped exactly).
///
/// Throws IntegrationError on step-size underflow, step-count exhaustion or
/// a blow-up (values this large cannot occur for true solutions, so they
/// signal a mis-integration).
template <class Rhs, class OnStep>
Vector2d integrate_dopri5(Rhs&& rhs, double r0, Vector2d y0, double r_end, const StepControl& ctl,
                          OnStep&& on_step) {
    // clang-format off
    constexpr double c2 = 1.0/5, c3 = 3.0/10, c4 = 4.0/5, c5 = 8.0/9;
    constexpr double a21 = 1.0/5;
    constexpr double a31 = 3.0/40,       a32 = 9.0/40;
    constexpr double a41 = 44.0/45,      a42 = -56.0/15,      a43 = 32.0/9;
    constexpr double a51 = 19372.0/6561, a52 = -25360.0/2187, a53 = 64448.0/6561, a54 = -212.0/729;
    constexpr double a61 = 9017.0/3168,  a62 = -355.0/33,     a63 = 46732.0/5247, a64 = 49.0/176,
                     a65 = -5103.0/18656;
    constexpr double b1 = 35.0/384, b3 = 500.0/1113, b4 = 125.0/192, b5 = -2187.0/6784,
                     b6 = 11.0/84;
    constexpr double e1 = 71.0/57600, e3 = -71.0/16695, e4 = 71.0/1920, e5 = -17253.0/339200,
                     e6 = 22.0/525, e7 = -1.0/40;
    // clang-format on

    double r = r0;
    Vector2d y = y0;
    Vector2d k1 = rhs(r, y);

    // initial step from the scaled magnitudes of y and y'
    double h;
    {
        const double sc0 = ctl.atol + ctl.rtol * std::fabs(y[0]);
        const double sc1 = ctl.atol + ctl.rtol * std::fabs(y[1]);
        const double d0 = std::sqrt(0.5 * (y[0] / sc0 * (y[0] / sc0) + y[1] / sc1 * (y[1] / sc1)));
        const double d1 = std::sqrt(0.5 * (k1[0] / sc0 * (k1[0] / sc0) + k1[1] / sc1 * (k1[1] / sc1)));
        h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min({h, ctl.max_step, r_end - r0});
    }

    double err_prev = 1.0;
    long nsteps = 0;
    while (r < r_end) {
        if (++nsteps > ctl.max_steps)
            throw IntegrationError("step budget exhausted", r, y[0], y[1]);
        bool last = false;
        if (r + h >= r_end) {
            h = r_end - r;
            last = true;
        }
        const Vector2d k2 = rhs(r + c2 * h, y + h * (a21 * k1));
        const Vector2d k3 = rhs(r + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Vector2d k4 = rhs(r + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector2d k5 = rhs(r + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector2d k6 =
            rhs(r + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector2d ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vector2d k7 = rhs(r + h, ynew);  // FSAL
        const Vector2d ev = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = ctl.atol + ctl.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (ev[i] / sc) * (ev[i] / sc);
        }
        err = std::sqrt(0.5 * err);

        if (!std::isfinite(err) || !ynew.allFinite())
            throw IntegrationError("non-finite state", r, y[0], y[1]);

        if (err <= 1.0) {
            const double r1 = last ? r_end : r + h;  // land on r_end exactly
            StepSegment seg{r, r1, y, ynew, k1, k7};
            r = r1;
            y = ynew;
            k1 = k7;
            on_step(seg);
            if (std::fabs(y[0]) > ctl.blowup || std::fabs(y[1]) > ctl.blowup)
                throw IntegrationError("blow-up guard tripped", r, y[0], y[1]);
            if (last) break;
            const double fac =
                std::clamp(0.9 * std::pow(err, -0.17) * std::pow(err_prev, 0.04), 0.2, 5.0);
            err_prev = std::max(err, 1e-4);
            h = std::min(h * fac, ctl.max_step);
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(r), 1e-30))
            throw IntegrationError("step-size underflow", r, y[0], y[1]);
    }
    return y;
}

}  // namespace isoyamabe
