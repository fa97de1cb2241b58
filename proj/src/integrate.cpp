#include "isoyamabe/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "isoyamabe/stepper.hpp"

namespace isoyamabe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Right-hand side of w'' + (coef(r)/sin r) w' + f(w) = 0 as a first-order
// system in (w, w').
struct MainRhs {
    const ProblemSpec* spec;
    Nonlinearity nl;
    bool reflected;

    Vector2d operator()(double r, const Vector2d& y) const {
        const double coef = reflected ? h_tilde_eval(*spec, r) : h_eval(*spec, r);
        return Vector2d(y[1], -coef / std::sin(r) * y[1] - f_eval(nl, y[0]));
    }
};

// Start offset for the even series: eps0 shrunk so the truncated (omega*eps)^4
// term stays negligible, where omega is the local oscillation frequency at
// amplitude |val|. Without this the quadratic start is invalid for large |d|.
double eps_effective(const Nonlinearity& nl, double val, double eps0) {
    const double amp = std::max(1.0, std::fabs(val));
    const double omega =
        std::sqrt(nl.lambda * (nl.p * std::pow(amp, nl.p - 1.0) + 1.0));
    return std::min(eps0, 0.01 / omega);
}

StepControl make_control(const IntegratorConfig& config) {
    StepControl ctl;
    ctl.rtol = config.rtol;
    ctl.atol = config.atol;
    ctl.max_step = config.max_step;
    return ctl;
}

// Bisection root of the w-component Hermite cubic inside [lo, hi] of a
// sign-changing segment of dense data.
double bisect_root(double lo, double hi, double tol, const auto& eval) {
    double flo = eval(lo);
    const double fhi = eval(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at round-off
        const double fm = eval(mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Refines zeroes (sign changes of w) and extrema (sign changes of w') over
// the stored samples.
void detect_events(Trajectory& traj) {
    const auto& s = traj.samples;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].w == 0.0 && (traj.zeroes.empty() || traj.zeroes.back() != s[i].r))
            traj.zeroes.push_back(s[i].r);
        if (s[i].w * s[i + 1].w < 0.0) {
            traj.zeroes.push_back(refine_zero(traj, {s[i].r, s[i + 1].r}));
        }
        if (s[i].wp * s[i + 1].wp < 0.0) {
            const double re = bisect_root(s[i].r, s[i + 1].r, traj.zero_tol,
                                          [&](double r) { return traj.eval_wp(r); });
            traj.extrema.emplace_back(re, traj.eval_w(re));
        }
    }
    if (!s.empty() && s.back().w == 0.0) traj.zeroes.push_back(s.back().r);
}

}  // namespace

void IntegratorConfig::validate(double a0) const {
    if (!(eps0 > 0 && rtol > 0 && atol > 0 && max_step > 0 && zero_tol > 0))
        throw InvalidArgumentError("integrator tolerances must all be positive");
    if (!(eps0 < a0 / 10.0))
        throw InvalidArgumentError("eps0 must satisfy eps0 < a0/10");
}

std::size_t Trajectory::segment_index(double r) const {
    if (samples.size() < 2) throw InvalidArgumentError("trajectory has no segments");
    // first sample with samples[i].r >= r, then step back one segment
    const auto it = std::lower_bound(samples.begin(), samples.end(), r,
                                     [](const ODEState& s, double v) { return s.r < v; });
    std::size_t i = static_cast<std::size_t>(it - samples.begin());
    if (i > 0) --i;
    if (i + 1 >= samples.size()) i = samples.size() - 2;
    return i;
}

double Trajectory::eval_w(double r) const {
    const std::size_t i = segment_index(r);
    const ODEState &a = samples[i], &b = samples[i + 1];
    return hermite_value(a.r, a.w, a.wp, b.r, b.w, b.wp, r);
}

double Trajectory::eval_wp(double r) const {
    const std::size_t i = segment_index(r);
    const ODEState &a = samples[i], &b = samples[i + 1];
    return hermite_slope(a.r, a.w, a.wp, b.r, b.w, b.wp, r);
}

ODEState series_start_left(const ProblemSpec& spec, double d, double eps0) {
    const double wpp0 = -f_eval(spec.nonlinearity(), d) / (1.0 + spec.m1);
    return ODEState{eps0, d + 0.5 * wpp0 * eps0 * eps0, wpp0 * eps0};
}

ODEState series_start_right(const ProblemSpec& spec, double c, double eps0) {
    const double wpp0 = -f_eval(spec.nonlinearity(), c) / (1.0 + spec.m2);
    return ODEState{eps0, c + 0.5 * wpp0 * eps0 * eps0, wpp0 * eps0};
}

namespace {

// Shared integration body for both sides: runs the reflected or plain
// problem on [eps, r_end] collecting every accepted step.
Trajectory integrate_raw(const ProblemSpec& spec, const IntegratorConfig& config, double value,
                         bool reflected, double r_end) {
    if (!std::isfinite(value)) throw InvalidArgumentError("shoot parameter must be finite");
    config.validate(spec.a0);

    const Nonlinearity nl = spec.nonlinearity();
    const double eps = eps_effective(nl, value, config.eps0);
    const ODEState start = reflected ? series_start_right(spec, value, eps)
                                     : series_start_left(spec, value, eps);

    Trajectory traj;
    traj.side = reflected ? Side::backward : Side::forward;
    traj.shoot_param = value;
    traj.zero_tol = config.zero_tol;
    traj.samples.push_back(start);

    MainRhs rhs{&spec, nl, reflected};
    integrate_dopri5(rhs, start.r, Vector2d(start.w, start.wp), r_end, make_control(config),
                     [&](const StepSegment& seg) {
                         traj.samples.push_back(ODEState{seg.r1, seg.y1[0], seg.y1[1]});
                     });
    return traj;
}

}  // namespace

Trajectory integrate_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d) {
    Trajectory traj = integrate_raw(spec, config, d, false, spec.a0);
    detect_events(traj);
    traj.end_state = traj.samples.back();
    return traj;
}

Trajectory integrate_backward(const ProblemSpec& spec, const IntegratorConfig& config, double c) {
    const double len = kPi - spec.a0;
    Trajectory refl = integrate_raw(spec, config, c, true, len);

    // map omega(rho) on [eps, pi-a0] to w(r) = omega(pi - r) on [a0, pi-eps]
    Trajectory traj;
    traj.side = Side::backward;
    traj.shoot_param = c;
    traj.zero_tol = config.zero_tol;
    traj.samples.reserve(refl.samples.size());
    for (auto it = refl.samples.rbegin(); it != refl.samples.rend(); ++it)
        traj.samples.push_back(ODEState{kPi - it->r, it->w, -it->wp});
    traj.samples.front().r = spec.a0;  // exact landing, pi - (pi - a0) is off by round-off
    detect_events(traj);
    traj.end_state = traj.samples.front();
    return traj;
}

std::vector<std::pair<double, double>> energy_profile(const ProblemSpec& spec,
                                                      const Trajectory& traj) {
    const Nonlinearity nl = spec.nonlinearity();
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.samples.size());
    for (const ODEState& s : traj.samples)
        out.emplace_back(s.r, 0.5 * s.wp * s.wp + G_eval(nl, s.w));
    return out;
}

double refine_zero(const Trajectory& traj, std::pair<double, double> bracket) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo < hi)) throw BracketError("empty bracket");
    const double wl = traj.eval_w(lo), wh = traj.eval_w(hi);
    if (wl == 0.0) return lo;
    if (wh == 0.0) return hi;
    if (wl * wh > 0.0) throw BracketError("no sign change of w across bracket");
    return bisect_root(lo, hi, traj.zero_tol, [&](double r) { return traj.eval_w(r); });
}

double ode_defect(const ProblemSpec& spec, const Trajectory& traj) {
    if (traj.samples.size() < 5)
        throw InvalidArgumentError("ode_defect needs at least 5 samples");
    const Nonlinearity nl = spec.nonlinearity();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const ODEState& s = traj.samples[i];
        const double hl = s.r - traj.samples[i - 1].r;
        const double hr = traj.samples[i + 1].r - s.r;
        const double h = std::min({hl, hr, 1e-3});
        auto d2 = [&](double hh) {
            return (traj.eval_w(s.r - hh) - 2.0 * s.w + traj.eval_w(s.r + hh)) / (hh * hh);
        };
        // plain and Richardson-extrapolated second differences carry opposite
        // discretization terms (FD truncation vs interpolant error); the
        // tighter one still converges to the true residual
        const double plain = d2(h);
        const double rich = (4.0 * d2(0.5 * h) - plain) / 3.0;
        const double q = h_eval(spec, s.r) / std::sin(s.r);
        const double rhs = q * s.wp + f_eval(nl, s.w);
        worst = std::max(worst, std::min(std::fabs(plain + rhs), std::fabs(rich + rhs)));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "r,w,wp\n";
    char buf[96];
    for (const ODEState& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.r, s.w, s.wp);
        os << buf;
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_trajectory_csv(os, traj);
}

int count_zeroes_forward(const ProblemSpec& spec, const IntegratorConfig& config, double d,
                         double r_end) {
    config.validate(spec.a0);
    if (!(r_end > 0.0) || r_end > spec.a0)
        throw InvalidArgumentError("r_end must lie in (0, a0]");

    const Nonlinearity nl = spec.nonlinearity();
    const double eps = eps_effective(nl, d, config.eps0);
    if (r_end <= 2.0 * eps)
        throw InvalidArgumentError("counting horizon lies inside the series-start offset");
    const ODEState start = series_start_left(spec, d, eps);
    MainRhs rhs{&spec, nl, false};

    int count = 0;
    const double cutoff = r_end - config.zero_tol;
    integrate_dopri5(rhs, start.r, Vector2d(start.w, start.wp), r_end, make_control(config),
                     [&](const StepSegment& seg) {
                         if (seg.y0[0] * seg.y1[0] < 0.0) {
                             const double root =
                                 bisect_root(seg.r0, seg.r1, config.zero_tol, [&](double r) {
                                     return hermite_value(seg.r0, seg.y0[0], seg.y0[1], seg.r1,
                                                          seg.y1[0], seg.y1[1], r);
                                 });
                             if (root < cutoff) ++count;
                         } else if (seg.y1[0] == 0.0 && seg.r1 < cutoff) {
                             ++count;
                         }
                     });
    return count;
}

}  // namespace isoyamabe
