#include "isoyamabe/limit.hpp"

#include <algorithm>
#include <cmath>

#include "isoyamabe/stepper.hpp"

namespace isoyamabe {

namespace {

// pure power |v|^{p-1} v, no linear term
struct LimitRhs {
    double H0, p;
    Vector2d operator()(double r, const Vector2d& y) const {
        const double powered = std::copysign(std::pow(std::fabs(y[0]), p), y[0]);
        return Vector2d(y[1], -H0 / r * y[1] - powered);
    }
};

}  // namespace

void LimitConfig::validate() const {
    if (!(H0 >= 0.0)) throw InvalidArgumentError("limit problem requires H0 >= 0");
    if (!(p > 1.0)) throw InvalidArgumentError("limit problem requires p > 1");
    if (!(K > 0.0)) throw InvalidArgumentError("limit problem requires K > 0");
}

bool subcritical_check(double H0, double p) {
    if (!(p > 1.0)) throw InvalidArgumentError("subcriticality is defined for p > 1");
    return 0.5 * (H0 + 1.0) < (p + 1.0) / (p - 1.0);
}

Trajectory solve_limit(const LimitConfig& cfg, const IntegratorConfig& iconfig) {
    cfg.validate();
    const double eps = iconfig.eps0;
    if (!(eps > 0.0) || eps >= cfg.K / 10.0)
        throw InvalidArgumentError("limit start offset must satisfy 0 < eps0 < K/10");

    const double vpp0 = -1.0 / (1.0 + cfg.H0);
    Trajectory traj;
    traj.side = Side::forward;
    traj.shoot_param = 1.0;
    traj.zero_tol = iconfig.zero_tol;
    traj.samples.push_back(ODEState{0.0, 1.0, 0.0});
    traj.samples.push_back(ODEState{eps, 1.0 + 0.5 * vpp0 * eps * eps, vpp0 * eps});

    StepControl ctl;
    ctl.rtol = iconfig.rtol;
    ctl.atol = iconfig.atol;
    ctl.max_step = iconfig.max_step;

    LimitRhs rhs{cfg.H0, cfg.p};
    const ODEState& s1 = traj.samples.back();
    integrate_dopri5(rhs, s1.r, Vector2d(s1.w, s1.wp), cfg.K, ctl, [&](const StepSegment& seg) {
        traj.samples.push_back(ODEState{seg.r1, seg.y1[0], seg.y1[1]});
    });
    traj.end_state = traj.samples.back();

    // zero refinement over the stored samples
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const ODEState &a = traj.samples[i], &b = traj.samples[i + 1];
        if (a.w * b.w < 0.0) traj.zeroes.push_back(refine_zero(traj, {a.r, b.r}));
        if (a.wp * b.wp < 0.0 && i > 0) {
            // extrema located by the sign change of the stored derivative
            double lo = a.r, hi = b.r;
            double fl = a.wp;
            while (hi - lo > traj.zero_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double fm = traj.eval_wp(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if ((fl < 0.0) != (fm < 0.0)) hi = mid;
                else { lo = mid; fl = fm; }
            }
            const double re = 0.5 * (lo + hi);
            traj.extrema.emplace_back(re, traj.eval_w(re));
        }
    }
    return traj;
}

RescaledTrajectory rescale_z(const ProblemSpec& spec, const IntegratorConfig& config,
                             double dscaled, const Trajectory& traj_of_w, double K) {
    if (!(dscaled > 0.0)) throw InvalidArgumentError("rescale_z requires dscaled > 0");
    if (traj_of_w.side != Side::forward)
        throw InvalidArgumentError("rescale_z needs a forward trajectory");
    const double expected_d = std::pow(dscaled, 2.0 / (spec.p - 1.0));
    if (std::fabs(traj_of_w.shoot_param - expected_d) > 1e-9 * expected_d)
        throw InvalidArgumentError("source trajectory was not shot with d = dscaled^{2/(p-1)}");

    const double scale = dscaled * std::sqrt(spec.lambda);   // r_z = scale * r_w
    const double amp = std::pow(dscaled, -2.0 / (spec.p - 1.0));
    RescaledTrajectory out;
    out.truncated = traj_of_w.r_back() * scale < K;
    const double r_hi = std::min(K, traj_of_w.r_back() * scale);

    Trajectory& z = out.traj;
    z.side = Side::forward;
    z.shoot_param = 1.0;
    z.zero_tol = config.zero_tol;
    z.samples.push_back(ODEState{0.0, 1.0, 0.0});
    for (const ODEState& s : traj_of_w.samples) {
        const double rz = s.r * scale;
        if (rz > r_hi) break;
        z.samples.push_back(ODEState{rz, amp * s.w, amp * s.wp / scale});
    }
    if (z.samples.back().r < r_hi) {
        // land exactly on the horizon so the result covers [0, r_hi]
        const double rw = r_hi / scale;
        z.samples.push_back(
            ODEState{r_hi, amp * traj_of_w.eval_w(rw), amp * traj_of_w.eval_wp(rw) / scale});
    }
    for (double zr : traj_of_w.zeroes)
        if (zr * scale <= r_hi) z.zeroes.push_back(zr * scale);
    for (const auto& ex : traj_of_w.extrema)
        if (ex.first * scale <= r_hi) z.extrema.emplace_back(ex.first * scale, amp * ex.second);
    z.end_state = z.samples.back();
    return out;
}

double convergence_gap(const Trajectory& z, const Trajectory& v0, double K) {
    if (z.r_back() < K - 1e-9 || v0.r_back() < K - 1e-9)
        throw InvalidArgumentError("both trajectories must cover [0, K]");
    double gap = 0.0;
    const int npts = 1000;
    for (int i = 0; i < npts; ++i) {
        const double r = K * i / (npts - 1.0);
        gap = std::max(gap, std::fabs(z.eval_w(r) - v0.eval_w(r)) +
                                std::fabs(z.eval_wp(r) - v0.eval_wp(r)));
    }
    return gap;
}

std::vector<int> zero_growth_check(const ProblemSpec& spec, const IntegratorConfig& config,
                                   double eps, const std::vector<double>& d_ladder) {
    if (!(eps > 0.0) || !(eps < spec.a0))
        throw InvalidArgumentError("zero_growth_check requires eps in (0, a0)");
    if (!std::is_sorted(d_ladder.begin(), d_ladder.end()))
        throw InvalidArgumentError("d ladder must be increasing");
    std::vector<int> counts;
    counts.reserve(d_ladder.size());
    for (double d : d_ladder) counts.push_back(count_zeroes_forward(spec, config, d, eps));
    return counts;
}

}  // namespace isoyamabe
