#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isoyamabe/integrate.hpp"
#include "isoyamabe/problem.hpp"
#include "isoyamabe/shooting.hpp"

namespace isoyamabe {

/// A matched sign-changing solution on [0, pi] with exactly k zeroes.
struct NodalSolution {
    ProblemSpec spec;
    int k = 0;
    double d = 0.0;
    double c = 0.0;
    int parity_sign = 1;          ///< +1 for even k, -1 for odd k
    Trajectory profile;           ///< merged trajectory on [0, pi]
    std::vector<double> zeroes;   ///< exactly k, strictly increasing
    double match_residual = 0.0;  ///< |I(d) - parity * J(c)|_2
    double energy = 0.0;          ///< NaN when ell != 2
    double yamabe_value = 0.0;    ///< NaN when ell != 2
    IntegratorConfig config;
};

/// I(d) - (-1)^k J(c) as a 2-vector.
Eigen::Vector2d match_residual(const ProblemSpec& spec, const IntegratorConfig& config, double d,
                               double c, int k);

/// A candidate crossing of R with S - (k pi, 0) in (theta, log radius)
/// coordinates, with the bracketing scan parameters.
struct Seed {
    double d = 0.0, c = 0.0;
    double d_lo = 0.0, d_hi = 0.0;
    double c_lo = 0.0, c_hi = 0.0;
};

/// All crossings of the two scanned polylines, mapped back to (d, c) and
/// ordered by d. Throws ScanRangeError when the scans do not reach winding
/// angles -k pi (side R) and +k pi (side S).
std::vector<Seed> seed_candidates(const ProblemSpec& spec, const IntegratorConfig& config, int k,
                                  const CurveScan& scan_R, const CurveScan& scan_S);

/// Refines one seed by a damped quasi-Newton iteration (finite-difference
/// Jacobian, relative step 1e-6, at most 60 iterations) with a nested
/// bisection fallback along the crossing bracket, then assembles and
/// verifies the solution. Throws SeedRejectedError when the residual cannot
/// be brought below 1e-8 (1 + |I(d)|), WrongBranchError when the merged
/// profile does not carry exactly k zeroes.
NodalSolution refine_match(const ProblemSpec& spec, const IntegratorConfig& config,
                           const Seed& seed, int k);

/// Zero count of the merged profile for (d, c) with the given parity,
/// using the half-open attribution at a0 (a zero within zero_tol of a0 is
/// counted once, at a0).
int merged_zero_count(const ProblemSpec& spec, const IntegratorConfig& config, double d, double c,
                      int parity_sign);

/// Scan -> seeds -> refine. Returns the solution from the smallest-d seed
/// that verifies; deterministic given the config. Scans widen geometrically
/// up to scan_max before giving up with NotFoundError.
NodalSolution find_nodal(const ProblemSpec& spec, const IntegratorConfig& config, int k,
                         double scan_max = 20000.0);

/// Every refined solution over the final scan (ordered by seed d).
std::vector<NodalSolution> find_all_nodal(const ProblemSpec& spec, const IntegratorConfig& config,
                                          int k, double scan_max = 20000.0);

}  // namespace isoyamabe
