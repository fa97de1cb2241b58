#include <doctest.h>

#include <cmath>
#include <random>

#include "isoyamabe/problem.hpp"

using namespace isoyamabe;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("make_problem derives the constants") {
    const ProblemSpec s3 = make_problem(3, 2, 1, 1);
    CHECK(s3.lambda == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(s3.p == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s3.a0 == doctest::Approx(kPi / 2).epsilon(1e-15));

    const ProblemSpec s5 = make_problem(5, 2, 3, 1);
    CHECK(s5.a0 == doctest::Approx(2.0 * kPi / 3.0).epsilon(1e-14));

    const ProblemSpec s4 = make_problem(4, 2, 1, 2);
    CHECK(s4.lambda == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s4.p == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("make_problem rejects broken data") {
    CHECK_THROWS_AS(make_problem(4, 2, 1, 3), InvalidSpecError);  // relation 2*4 != 2*3
    CHECK_THROWS_AS(make_problem(3, 2, 0, 2), InvalidSpecError);
    CHECK_THROWS_AS(make_problem(2, 1, 1, 1), InvalidSpecError);
    CHECK_THROWS_AS(make_problem(7, 3, 1, 3), InvalidSpecError);  // odd ell, m1 != m2
    CHECK_THROWS_AS(make_problem(3, 5, 1, 1), InvalidSpecError);
}

TEST_CASE("exhaustive validation sweep") {
    for (int n = 3; n <= 10; ++n)
        for (int ell : {1, 2, 3, 4, 6})
            for (int m1 = 1; m1 <= 9; ++m1)
                for (int m2 = 1; m2 <= 9; ++m2) {
                    const bool valid =
                        ell * (m1 + m2) == 2 * (n - 1) && (ell % 2 == 0 || m1 == m2);
                    if (valid) {
                        const ProblemSpec s = make_problem(n, ell, m1, m2);
                        CHECK(s.lambda > 0.0);
                        CHECK(s.p > 1.0);
                        CHECK(std::fabs(h_eval(s, s.a0)) <= 1e-14);
                    } else {
                        CHECK_THROWS_AS(make_problem(n, ell, m1, m2), InvalidSpecError);
                    }
                }
}

TEST_CASE("strict geometry restricts settled classifications") {
    CHECK_NOTHROW(make_problem(4, 3, 1, 1, true));
    CHECK_NOTHROW(make_problem(7, 3, 2, 2, true));
    CHECK_THROWS_AS(make_problem(10, 3, 3, 3, true), InvalidSpecError);
    CHECK_NOTHROW(make_problem(10, 3, 3, 3, false));
    CHECK_NOTHROW(make_problem(7, 6, 1, 1, true));
    CHECK_THROWS_AS(make_problem(19, 6, 3, 3, true), InvalidSpecError);
    CHECK_NOTHROW(make_problem(9, 4, 1, 3, true));  // ell=4 keeps only the relation
}

TEST_CASE("coefficient h and its reflection") {
    const ProblemSpec s = make_problem(4, 2, 1, 2);
    CHECK(h_eval(s, 0.0) == doctest::Approx(s.m1).epsilon(1e-15));
    CHECK(h_eval(s, kPi) == doctest::Approx(-s.m2).epsilon(1e-15));
    CHECK(std::fabs(h_eval(s, s.a0)) <= 1e-14);
    CHECK(h_tilde_eval(s, 0.0) == doctest::Approx(s.m2).epsilon(1e-15));
    CHECK(std::fabs(h_tilde_eval(s, kPi - s.a0)) <= 1e-14);

    // h(r) + h~(pi - r) = 0 and the sign pattern around a0
    for (int i = 0; i <= 200; ++i) {
        const double r = kPi * i / 200.0;
        CHECK(std::fabs(h_eval(s, r) + h_tilde_eval(s, kPi - r)) <= 1e-14);
        if (r < s.a0 - 1e-12) CHECK(h_eval(s, r) > 0.0);
        if (r > s.a0 + 1e-12) CHECK(h_eval(s, r) < 0.0);
    }

    // strictly decreasing
    double prev = h_eval(s, 0.0);
    for (int i = 1; i <= 100; ++i) {
        const double cur = h_eval(s, kPi * i / 100.0);
        CHECK(cur < prev);
        prev = cur;
    }

    const ProblemSpec sym = make_problem(3, 2, 1, 1);
    for (int i = 0; i <= 50; ++i) {
        const double r = kPi * i / 50.0;
        CHECK(h_eval(sym, r) == h_tilde_eval(sym, r));
    }
}

TEST_CASE("nonlinearity f and potential G") {
    const ProblemSpec s3 = make_problem(3, 2, 1, 1);
    const Nonlinearity nl = s3.nonlinearity();
    CHECK(f_eval(nl, 0.0) == 0.0);
    CHECK(f_eval(nl, 1.0) == 0.0);
    CHECK(f_eval(nl, -1.0) == 0.0);
    CHECK(f_eval(nl, 2.0) == doctest::Approx(5.625).epsilon(1e-15));
    CHECK(f_eval(nl, -0.37) == -f_eval(nl, 0.37));  // exactly odd

    CHECK(G_eval(nl, 0.0) == 0.0);
    CHECK(G_eval(nl, 1.0) == doctest::Approx(nl.lambda * (1.0 / (nl.p + 1) - 0.5)).epsilon(1e-15));
    CHECK(G_eval(nl, 1.0) < 0.0);
    CHECK(G_eval(nl, 10.0) > 0.0);
    CHECK(G_eval(nl, -2.2) == G_eval(nl, 2.2));
    CHECK(G_eval(nl, 1.0) < G_eval(nl, 0.9));
    CHECK(G_eval(nl, 1.0) < G_eval(nl, 1.1));

    // non-integer exponent branch (n = 5 gives p = 7/3)
    const Nonlinearity nl5 = make_problem(5, 2, 2, 2).nonlinearity();
    CHECK(nl5.p_int == 0);
    CHECK(f_eval(nl5, -1.7) == -f_eval(nl5, 1.7));
}

TEST_CASE("G' matches f by central differences") {
    std::mt19937 rng(7041);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (const ProblemSpec& s : {make_problem(3, 2, 1, 1), make_problem(5, 2, 1, 3)}) {
        const Nonlinearity nl = s.nonlinearity();
        for (int i = 0; i < 100; ++i) {
            const double t = U(rng);
            const double dh = 1e-6 * std::max(1.0, std::fabs(t));
            const double fd = (G_eval(nl, t + dh) - G_eval(nl, t - dh)) / (2 * dh);
            const double scale = std::max(1e-6, std::fabs(f_eval(nl, t)));
            CHECK(std::fabs(fd - f_eval(nl, t)) / scale <= 1e-6);
        }
    }
}
