#include "isoyamabe/problem.hpp"

#include <cmath>
#include <string>

namespace isoyamabe {

namespace {

double ipow(double base, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= base;
    return out;
}

// Classically settled multiplicity lists. For ell = 4 the FKM construction
// gives infinitely many pairs, so strict mode only enforces the relation.
bool classical_pair_ok(int ell, int n, int m1, int m2) {
    switch (ell) {
        case 1:
            return m1 == n - 1 && m2 == n - 1;
        case 2:
            return true;  // every split of n-1 arises from O(m) x O(k)
        case 3:
            return m1 == m2 && (m1 == 1 || m1 == 2 || m1 == 4 || m1 == 8);
        case 4:
            return true;
        case 6:
            return m1 == m2 && (m1 == 1 || m1 == 2);
        default:
            return false;
    }
}

}  // namespace

Nonlinearity ProblemSpec::nonlinearity() const {
    Nonlinearity nl;
    nl.lambda = lambda;
    nl.p = p;
    const double pr = std::round(p);
    nl.p_int = (pr == p && pr > 0 && pr < 64) ? static_cast<int>(pr) : 0;
    return nl;
}

ProblemSpec make_problem(int n, int ell, int m1, int m2, bool strict_geometry) {
    if (n < 3)
        throw InvalidSpecError("sphere dimension must satisfy n >= 3, got n = " + std::to_string(n));
    if (ell != 1 && ell != 2 && ell != 3 && ell != 4 && ell != 6)
        throw InvalidSpecError("number of principal curvatures must lie in {1,2,3,4,6}, got ell = " +
                               std::to_string(ell));
    if (m1 < 1 || m2 < 1)
        throw InvalidSpecError("multiplicities must be positive, got m1 = " + std::to_string(m1) +
                               ", m2 = " + std::to_string(m2));
    if (ell * (m1 + m2) != 2 * (n - 1))
        throw InvalidSpecError("Muenzner relation ell*(m1+m2) = 2(n-1) violated: " +
                               std::to_string(ell) + "*(" + std::to_string(m1) + "+" +
                               std::to_string(m2) + ") != 2*(" + std::to_string(n) + "-1)");
    if (ell % 2 == 1 && m1 != m2)
        throw InvalidSpecError("odd ell requires equal multiplicities, got m1 = " +
                               std::to_string(m1) + ", m2 = " + std::to_string(m2));
    if (strict_geometry && !classical_pair_ok(ell, n, m1, m2))
        throw InvalidSpecError("(m1, m2) = (" + std::to_string(m1) + ", " + std::to_string(m2) +
                               ") is not a classically realizable pair for ell = " +
                               std::to_string(ell));

    ProblemSpec spec;
    spec.n = n;
    spec.ell = ell;
    spec.m1 = m1;
    spec.m2 = m2;
    spec.lambda = static_cast<double>(n) * (n - 2) / (4.0 * ell * ell);
    spec.p = static_cast<double>(n + 2) / (n - 2);
    spec.a0 = std::acos(static_cast<double>(m2 - m1) / (m1 + m2));
    return spec;
}

double h_eval(const ProblemSpec& spec, double r) {
    return 0.5 * (spec.m1 + spec.m2) * std::cos(r) - 0.5 * (spec.m2 - spec.m1);
}

double h_tilde_eval(const ProblemSpec& spec, double r) {
    return 0.5 * (spec.m1 + spec.m2) * std::cos(r) + 0.5 * (spec.m2 - spec.m1);
}

double f_eval(const Nonlinearity& nl, double w) {
    double powered;
    if (nl.p_int > 0) {
        powered = std::copysign(ipow(std::fabs(w), nl.p_int), w);
    } else {
        powered = std::copysign(std::pow(std::fabs(w), nl.p), w);
    }
    return nl.lambda * (powered - w);
}

double G_eval(const Nonlinearity& nl, double t) {
    const double a = std::fabs(t);
    double powered;
    if (nl.p_int > 0) {
        powered = ipow(a, nl.p_int + 1);
    } else {
        powered = std::pow(a, nl.p + 1.0);
    }
    return nl.lambda * (powered / (nl.p + 1.0) - 0.5 * t * t);
}

}  // namespace isoyamabe
