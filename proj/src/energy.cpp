#include "isoyamabe/energy.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace isoyamabe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlx[10] = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472,
    -0.1488743389816312, 0.1488743389816312,  0.4333953941292472,  0.6794095682990244,
    0.8650633666889845,  0.9739065285171717};
constexpr double kGlw[10] = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963,
    0.2955242247147529, 0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
    0.1494513491505806, 0.0666713443086881};

}  // namespace

double sphere_volume(int j) {
    if (j < 0) throw InvalidArgumentError("sphere dimension must be nonnegative");
    return 2.0 * std::pow(kPi, 0.5 * (j + 1)) / std::tgamma(0.5 * (j + 1));
}

double c_n_value(int n) {
    if (n < 3) throw InvalidArgumentError("c_n is defined for n >= 3");
    return sphere_volume(n);
}

double yamabe_value(int n, double energy) {
    if (!(energy > 0.0)) throw InvalidArgumentError("yamabe_value requires energy > 0");
    return 0.25 * n * (n - 2) * std::pow(energy, 2.0 / n);
}

double solution_energy(const ProblemSpec& spec, int m, int kdim, const Trajectory& profile) {
    if (spec.ell != 2)
        throw UnsupportedGeometryError(
            "solution energies are available only for ell = 2 (product-sphere volume element); "
            "got ell = " + std::to_string(spec.ell));
    if (m + kdim != spec.n + 1 || m < 2 || kdim < 2)
        throw InvalidArgumentError("split must satisfy m + kdim = n + 1 with m, kdim >= 2");
    if (m != spec.m2 + 1 || kdim != spec.m1 + 1)
        throw InvalidArgumentError(
            "split inconsistent with the multiplicities: need m = m2 + 1 and kdim = m1 + 1");
    if (profile.r_front() > 1e-12 || profile.r_back() < kPi - 1e-12)
        throw InvalidArgumentError("profile must span [0, pi]");

    const double pw = spec.p + 1.0;
    auto integrand = [&](double r) {
        const double w = profile.eval_w(r);
        return std::pow(std::fabs(w), pw) * std::pow(std::sin(0.5 * r), kdim - 1) *
               std::pow(std::cos(0.5 * r), m - 1);
    };

    auto composite = [&](int panels) {
        double sum = 0.0;
        const double hp = kPi / panels;
        for (int i = 0; i < panels; ++i) {
            const double mid = (i + 0.5) * hp;
            double local = 0.0;
            for (int q = 0; q < 10; ++q) local += kGlw[q] * integrand(mid + 0.5 * hp * kGlx[q]);
            sum += 0.5 * hp * local;
        }
        return sum;
    };

    double prev = composite(16);
    for (int panels = 32; panels <= (1 << 15); panels *= 2) {
        const double cur = composite(panels);
        if (std::fabs(cur - prev) <= 1e-9 * std::fabs(cur) + 1e-300) {
            prev = cur;
            return 0.5 * sphere_volume(kdim - 1) * sphere_volume(m - 1) * prev;
        }
        prev = cur;
    }
    throw Error("energy quadrature did not converge to relative 1e-9");
}

EnergyReport make_energy_report(int n, double energy) {
    EnergyReport rep;
    rep.energy = energy;
    rep.c_n = c_n_value(n);
    rep.ratio = energy / rep.c_n;
    rep.yamabe = yamabe_value(n, energy);
    return rep;
}

}  // namespace isoyamabe
