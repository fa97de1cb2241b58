#include "isoyamabe/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isoyamabe/energy.hpp"

namespace isoyamabe {

namespace {

constexpr double kPi = 3.14159265358979323846;

double parity_of(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

struct Residual {
    Eigen::Vector2d value;
    double radius;  // |I(d)|, sets the acceptance scale
};

Residual eval_residual(const ProblemSpec& spec, const IntegratorConfig& config, double d, double c,
                       double parity) {
    const PhasePoint I = I_map(spec, config, d);
    const PhasePoint J = J_map(spec, config, c);
    return Residual{Eigen::Vector2d(I.x - parity * J.x, I.y - parity * J.y), I.radius};
}

// Geometric interpolation between scan parameters (the grids are geometric).
double geo_interp(double a, double b, double t) { return a * std::pow(b / a, t); }

std::vector<double> geometric_grid(double hi, int npts) {
    std::vector<double> g(npts);
    for (int i = 0; i < npts; ++i) g[i] = std::pow(hi, i / (npts - 1.0));
    g.front() = 1.0;
    return g;
}

// Merged zero list for matched (d, c): forward zeroes strictly left of a0,
// one zero at a0 when w passes through it there, backward zeroes strictly
// right. parity scales the backward side but does not move its zeroes.
std::vector<double> merge_zeroes(const ProblemSpec& spec, const IntegratorConfig& config,
                                 const Trajectory& fwd, const Trajectory& bwd) {
    const double tol = config.zero_tol;
    std::vector<double> out;
    bool band = false;  // a zero within zero_tol of a0, counted once at a0
    for (double z : fwd.zeroes) {
        if (z < spec.a0 - tol)
            out.push_back(z);
        else
            band = true;
    }
    const ODEState& e = fwd.end_state;
    band = band || std::fabs(e.w) <= tol * std::fabs(e.wp);
    std::vector<double> right;
    for (double z : bwd.zeroes) {
        if (z > spec.a0 + tol)
            right.push_back(z);
        else
            band = true;
    }
    if (band) out.push_back(spec.a0);
    out.insert(out.end(), right.begin(), right.end());
    return out;
}

NodalSolution assemble(const ProblemSpec& spec, const IntegratorConfig& config, int k, double d,
                       double c, double residual_norm) {
    const double parity = parity_of(k);
    const Trajectory fwd = integrate_forward(spec, config, d);
    const Trajectory bwd = integrate_backward(spec, config, c);

    NodalSolution sol;
    sol.spec = spec;
    sol.k = k;
    sol.d = d;
    sol.c = c;
    sol.parity_sign = static_cast<int>(parity);
    sol.match_residual = residual_norm;
    sol.config = config;
    sol.zeroes = merge_zeroes(spec, config, fwd, bwd);

    Trajectory& prof = sol.profile;
    prof.side = Side::merged;
    prof.shoot_param = d;
    prof.zero_tol = config.zero_tol;
    prof.samples.reserve(fwd.samples.size() + bwd.samples.size() + 2);
    prof.samples.push_back(ODEState{0.0, d, 0.0});
    prof.samples.insert(prof.samples.end(), fwd.samples.begin(), fwd.samples.end());
    for (std::size_t i = 1; i < bwd.samples.size(); ++i) {  // skip duplicate a0 sample
        const ODEState& s = bwd.samples[i];
        prof.samples.push_back(ODEState{s.r, parity * s.w, parity * s.wp});
    }
    prof.samples.push_back(ODEState{kPi, parity * c, 0.0});
    prof.zeroes = sol.zeroes;
    prof.extrema = fwd.extrema;
    if (std::fabs(fwd.end_state.wp) <= config.zero_tol * std::max(1.0, std::fabs(fwd.end_state.w)))
        prof.extrema.emplace_back(spec.a0, fwd.end_state.w);
    for (const auto& ex : bwd.extrema) prof.extrema.emplace_back(ex.first, parity * ex.second);
    prof.end_state = fwd.end_state;

    if (spec.ell == 2) {
        sol.energy = solution_energy(spec, spec.m2 + 1, spec.m1 + 1, prof);
        sol.yamabe_value = yamabe_value(spec.n, sol.energy);
    } else {
        sol.energy = std::numeric_limits<double>::quiet_NaN();
        sol.yamabe_value = std::numeric_limits<double>::quiet_NaN();
    }
    return sol;
}

// Finds v in [lo, hi] with theta(v) = target by bisection; theta is
// continuous and the endpoints straddle the level.
double param_at_angle(const ProblemSpec& spec, const IntegratorConfig& config, CurveSide side,
                      double lo, double hi, double th_lo, double target) {
    auto theta_of = [&](double v) {
        return side == CurveSide::R ? shoot_forward(spec, config, v).point.theta
                                    : shoot_backward(spec, config, v).point.theta;
    };
    double fl = th_lo - target;
    if (fl == 0.0) return lo;
    for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = theta_of(mid) - target;
        if (fm == 0.0) return mid;
        if ((fl < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            fl = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Eigen::Vector2d match_residual(const ProblemSpec& spec, const IntegratorConfig& config, double d,
                               double c, int k) {
    if (d == 0.0 || c == 0.0) throw InvalidArgumentError("match_residual requires d, c != 0");
    return eval_residual(spec, config, d, c, parity_of(k)).value;
}

std::vector<Seed> seed_candidates(const ProblemSpec& spec, const IntegratorConfig& config, int k,
                                  const CurveScan& scan_R, const CurveScan& scan_S) {
    (void)spec;
    (void)config;
    if (scan_R.side != CurveSide::R || scan_S.side != CurveSide::S)
        throw InvalidArgumentError("seed_candidates needs an R scan and an S scan");

    double thR_min = 0.0, thS_max = 0.0;
    for (const PhasePoint& p : scan_R.points) thR_min = std::min(thR_min, p.theta);
    for (const PhasePoint& p : scan_S.points) thS_max = std::max(thS_max, p.theta);
    if (thR_min > -k * kPi || thS_max < k * kPi)
        throw ScanRangeError("scans too narrow: need theta <= " + std::to_string(-k * kPi) +
                                 " and vartheta >= " + std::to_string(k * kPi),
                             thR_min, thS_max);

    const double shift = k * kPi;
    std::vector<Seed> seeds;
    for (std::size_t i = 0; i + 1 < scan_R.params.size(); ++i) {
        const double p0x = scan_R.points[i].theta, p0y = std::log(scan_R.points[i].radius);
        const double p1x = scan_R.points[i + 1].theta, p1y = std::log(scan_R.points[i + 1].radius);
        for (std::size_t j = 0; j + 1 < scan_S.params.size(); ++j) {
            const double q0x = scan_S.points[j].theta - shift,
                         q0y = std::log(scan_S.points[j].radius);
            const double q1x = scan_S.points[j + 1].theta - shift,
                         q1y = std::log(scan_S.points[j + 1].radius);
            const double d1x = p1x - p0x, d1y = p1y - p0y;
            const double d2x = q1x - q0x, d2y = q1y - q0y;
            const double den = d1x * d2y - d1y * d2x;
            if (den == 0.0) continue;
            const double rx = q0x - p0x, ry = q0y - p0y;
            const double t = (rx * d2y - ry * d2x) / den;
            const double u = (rx * d1y - ry * d1x) / den;
            if (t < -1e-9 || t > 1 + 1e-9 || u < -1e-9 || u > 1 + 1e-9) continue;
            Seed s;
            s.d_lo = scan_R.params[i];
            s.d_hi = scan_R.params[i + 1];
            s.c_lo = scan_S.params[j];
            s.c_hi = scan_S.params[j + 1];
            s.d = geo_interp(s.d_lo, s.d_hi, std::clamp(t, 0.0, 1.0));
            s.c = geo_interp(s.c_lo, s.c_hi, std::clamp(u, 0.0, 1.0));
            seeds.push_back(s);
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.d < b.d; });
    seeds.erase(std::unique(seeds.begin(), seeds.end(),
                            [](const Seed& a, const Seed& b) {
                                return std::fabs(a.d - b.d) <= 1e-9 * std::max(a.d, b.d) &&
                                       std::fabs(a.c - b.c) <= 1e-9 * std::max(a.c, b.c);
                            }),
                seeds.end());
    return seeds;
}

int merged_zero_count(const ProblemSpec& spec, const IntegratorConfig& config, double d, double c,
                      int /*parity_sign*/) {
    const Trajectory fwd = integrate_forward(spec, config, d);
    const Trajectory bwd = integrate_backward(spec, config, c);
    return static_cast<int>(merge_zeroes(spec, config, fwd, bwd).size());
}

NodalSolution refine_match(const ProblemSpec& spec, const IntegratorConfig& config,
                           const Seed& seed, int k) {
    const double parity = parity_of(k);
    double d = seed.d, c = seed.c;

    Residual res = eval_residual(spec, config, d, c, parity);
    const auto accept_tol = [](const Residual& r) { return 1e-8 * (1.0 + r.radius); };
    const auto target_tol = [](const Residual& r) { return 1e-12 * (1.0 + r.radius); };

    bool converged = res.value.norm() <= target_tol(res);
    for (int it = 0; it < 60 && !converged; ++it) {
        const double hd = 1e-6 * std::max(1.0, std::fabs(d));
        const double hc = 1e-6 * std::max(1.0, std::fabs(c));
        Eigen::Matrix2d Jm;
        Jm.col(0) = (eval_residual(spec, config, d + hd, c, parity).value - res.value) / hd;
        Jm.col(1) = (eval_residual(spec, config, d, c + hc, parity).value - res.value) / hc;
        const double det = Jm.determinant();
        if (det == 0.0 || !std::isfinite(det)) break;
        const Eigen::Vector2d step = Jm.partialPivLu().solve(-res.value);

        double damp = 1.0;
        Residual next = res;
        bool improved = false;
        for (int half = 0; half < 8; ++half) {
            next = eval_residual(spec, config, d + damp * step[0], c + damp * step[1], parity);
            if (next.value.norm() < res.value.norm()) {
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) break;
        d += damp * step[0];
        c += damp * step[1];
        res = next;
        converged = res.value.norm() <= target_tol(res);
    }

    if (res.value.norm() > accept_tol(res) && seed.d_lo > 0.0 && seed.c_lo > 0.0) {
        // fallback: bisection along the crossing bracket in (theta, log radius).
        // For angle t on the R bracket and t + k pi on the S bracket, the two
        // radii cross; bisect the log-radius difference in t.
        const PhasePoint Rlo = I_map(spec, config, seed.d_lo);
        const PhasePoint Rhi = I_map(spec, config, seed.d_hi);
        const PhasePoint Slo = J_map(spec, config, seed.c_lo);
        const PhasePoint Shi = J_map(spec, config, seed.c_hi);
        double tlo = std::max(std::min(Rlo.theta, Rhi.theta), std::min(Slo.theta, Shi.theta) - k * kPi);
        double thi = std::min(std::max(Rlo.theta, Rhi.theta), std::max(Slo.theta, Shi.theta) - k * kPi);
        if (tlo < thi) {
            auto gap_at = [&](double t) {
                const double dd = param_at_angle(spec, config, CurveSide::R, seed.d_lo, seed.d_hi,
                                                 Rlo.theta, t);
                const double cc = param_at_angle(spec, config, CurveSide::S, seed.c_lo, seed.c_hi,
                                                 Slo.theta, t + k * kPi);
                const PhasePoint I = I_map(spec, config, dd);
                const PhasePoint J = J_map(spec, config, cc);
                return std::make_tuple(std::log(I.radius) - std::log(J.radius), dd, cc);
            };
            auto [glo, dlo_, clo_] = gap_at(tlo);
            auto [ghi, dhi_, chi_] = gap_at(thi);
            if (glo * ghi <= 0.0) {
                for (int it = 0; it < 60 && thi - tlo > 1e-13 * (1.0 + std::fabs(thi)); ++it) {
                    const double tm = 0.5 * (tlo + thi);
                    auto [gm, dm, cm] = gap_at(tm);
                    d = dm;
                    c = cm;
                    if (gm == 0.0) break;
                    if ((glo < 0.0) != (gm < 0.0)) {
                        thi = tm;
                    } else {
                        tlo = tm;
                        glo = gm;
                    }
                }
                res = eval_residual(spec, config, d, c, parity);
            }
        }
    }

    if (res.value.norm() > accept_tol(res))
        throw SeedRejectedError("seed (" + std::to_string(seed.d) + ", " + std::to_string(seed.c) +
                                ") stagnated at residual " + std::to_string(res.value.norm()));

    const int found = merged_zero_count(spec, config, d, c, static_cast<int>(parity));
    if (found != k)
        throw WrongBranchError("refined match carries " + std::to_string(found) +
                               " zeroes, expected " + std::to_string(k));

    return assemble(spec, config, k, d, c, res.value.norm());
}

namespace {

std::vector<NodalSolution> solve_nodal(const ProblemSpec& spec, const IntegratorConfig& config,
                                       int k, double scan_max, bool all_seeds) {
    if (k < 0) throw InvalidArgumentError("zero count k must be nonnegative");
    if (!spec.nodal_mode())
        throw InvalidSpecError(
            "sign-changing solutions require m1 < n-1 and m2 < n-1 (the radial geometry has "
            "positive solutions only)");

    std::string attempts;
    for (double D = 8.0; D <= scan_max * 4.0; D *= 4.0) {
        D = std::min(D, scan_max);
        const int npts = std::max(17, static_cast<int>(48.0 * std::log10(D)) | 1);
        CurveScan scan_R, scan_S;
        scan_R = scan_curve(spec, config, CurveSide::R, geometric_grid(D, npts));
        scan_S = scan_curve(spec, config, CurveSide::S, geometric_grid(D, npts));

        std::vector<Seed> seeds;
        try {
            seeds = seed_candidates(spec, config, k, scan_R, scan_S);
        } catch (const ScanRangeError& e) {
            attempts += " [D=" + std::to_string(D) + ": " + e.what() + "]";
            if (D >= scan_max) break;
            continue;
        }

        std::vector<NodalSolution> found;
        for (const Seed& s : seeds) {
            try {
                found.push_back(refine_match(spec, config, s, k));
                if (!all_seeds) return found;
            } catch (const Error& e) {
                attempts += " [seed d=" + std::to_string(s.d) + ": " + e.what() + "]";
            }
        }
        if (!found.empty()) return found;
        if (D >= scan_max) break;
    }
    throw NotFoundError("no verified k=" + std::to_string(k) +
                        " solution within scan range [1, " + std::to_string(scan_max) +
                        "]; attempts:" + attempts);
}

}  // namespace

NodalSolution find_nodal(const ProblemSpec& spec, const IntegratorConfig& config, int k,
                         double scan_max) {
    return solve_nodal(spec, config, k, scan_max, false).front();
}

std::vector<NodalSolution> find_all_nodal(const ProblemSpec& spec, const IntegratorConfig& config,
                                          int k, double scan_max) {
    return solve_nodal(spec, config, k, scan_max, true);
}

}  // namespace isoyamabe
