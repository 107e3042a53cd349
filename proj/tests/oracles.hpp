#pragma once

// Independent oracles shared by the unit tests and the acceptance gate. They
// rely on Boost special functions only, never on the library's own Bessel
// evaluations.

#include <cmath>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "nfqed/fiber_modes.hpp"
#include "nfqed/units.hpp"

namespace oracle {

using nfqed::FiberSpec;
namespace bm = boost::math;

inline FiberSpec fiber(double radius_nm, double n)
{
    return {nfqed::units::length_from_nm(radius_nm, 780.0), n * n};
}

// Hybrid-mode eigenvalue equation in its textbook (pole-carrying) form,
//   (J'/UJ + K'/WK)(J'/UJ + K'/(n^2 WK)) = (k/n)^2 (1/U^2 + 1/W^2)^2,
// with derivatives taken from Boost.
inline double textbook_residual(const FiberSpec& f, double omega, double k)
{
    const double n2 = f.permittivity;
    const double u = f.radius * std::sqrt(n2 * omega * omega - k * k);
    const double w = f.radius * std::sqrt(k * k - omega * omega);
    const double jj = bm::cyl_bessel_j_prime(1, u) / (u * bm::cyl_bessel_j(1, u));
    const double kk = bm::cyl_bessel_k_prime(1, w) / (w * bm::cyl_bessel_k(1, w));
    const double rhs = (k * k / (n2 * omega * omega)) * std::pow(1.0 / (u * u) + 1.0 / (w * w), 2);
    return (jj + kk) * (jj + kk / n2) - rhs;
}

// Dense scan plus bisection; sign changes across poles of 1/J1 are rejected by
// requiring J1(U) to stay away from zero at the bracketed point.
inline std::vector<double> roots(const FiberSpec& f, double omega)
{
    const int samples = 100000;
    const double lo = omega * (1.0 + 1e-9);
    const double hi = omega * std::sqrt(f.permittivity) * (1.0 - 1e-9);
    std::vector<double> roots;
    double k_prev = lo;
    double f_prev = textbook_residual(f, omega, lo);
    for (int i = 1; i <= samples; ++i) {
        const double k = lo + (hi - lo) * i / samples;
        const double fk = textbook_residual(f, omega, k);
        if (std::signbit(fk) != std::signbit(f_prev)) {
            double a = k_prev;
            double b = k;
            double fa = f_prev;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = textbook_residual(f, omega, m);
                if (std::signbit(fm) == std::signbit(fa)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            const double u = f.radius * std::sqrt(f.permittivity * omega * omega - root * root);
            if (std::abs(bm::cyl_bessel_j(1, u)) > 1e-6) {
                roots.push_back(root);
            }
        }
        k_prev = k;
        f_prev = fk;
    }
    return roots;
}

// Simpson rule with `n` (even) panels.
template <class F>
double simpson(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return s * h / 3.0;
}

}  // namespace oracle
