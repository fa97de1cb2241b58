#pragma once

#include <cmath>

#include "isoyamabe/errors.hpp"

namespace isoyamabe {

/// Nonlinearity f(w) = lambda * (|w|^{p-1} w - w) and its potential G.
///
/// |w|^{p-1} w is evaluated as sign(w)*|w|^p so it stays defined and
/// continuous for non-integer p (even n gives fractional exponents).
struct Nonlinearity {
    double lambda = 0.0;
    double p = 0.0;
    int p_int = 0;  // p when p is an exact integer, else 0 (fast path)
};

/// Parameters of the reduced equation
///   w'' + (h(r)/sin r) w' + lambda (|w|^{p-1} w - w) = 0   on [0, pi],
/// derived from isoparametric data (n, ell, m1, m2) on the round n-sphere.
struct ProblemSpec {
    int n = 0;     ///< sphere dimension, >= 3
    int ell = 0;   ///< number of distinct principal curvatures, in {1,2,3,4,6}
    int m1 = 0;    ///< multiplicity at r = 0 (h(0) = m1)
    int m2 = 0;    ///< multiplicity at r = pi (h(pi) = -m2)
    double lambda = 0.0;  ///< n(n-2) / (4 ell^2)
    double p = 0.0;       ///< critical exponent (n+2)/(n-2)
    double a0 = 0.0;      ///< unique zero of h in (0, pi)

    /// True iff both endpoint multiplicities are subcritical (m1, m2 < n-1),
    /// the regime where sign-changing solutions exist.
    bool nodal_mode() const { return m1 < n - 1 && m2 < n - 1; }

    Nonlinearity nonlinearity() const;
};

/// Validates (n, ell, m1, m2) and computes the derived constants.
///
/// Requires positivity, the Muenzner relation ell*(m1+m2) = 2(n-1), and
/// m1 = m2 for odd ell. With `strict_geometry` the classically realizable
/// families are additionally enforced where the classification is settled
/// (ell = 1, 2, 3, 6); for ell = 4 infinitely many families exist and only
/// the relation is checked.
ProblemSpec make_problem(int n, int ell, int m1, int m2, bool strict_geometry = false);

/// h(r) = ((m1+m2)/2) cos r - (m2-m1)/2.
double h_eval(const ProblemSpec& spec, double r);

/// Reflected coefficient h~(r) = -h(pi - r); equals h with m1, m2 swapped.
double h_tilde_eval(const ProblemSpec& spec, double r);

/// f(w) = lambda (sign(w) |w|^p - w). Odd, with f(-1) = f(0) = f(1) = 0.
double f_eval(const Nonlinearity& nl, double w);

/// Potential G(t) = lambda (|t|^{p+1}/(p+1) - t^2/2); G' = f.
double G_eval(const Nonlinearity& nl, double t);

}  // namespace isoyamabe
