#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace nfqed {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cdouble kI{0.0, 1.0};

// Point in the fiber frame: z along the fiber axis.
struct CylPoint {
    double rho = 0.0;
    double phi = 0.0;
    double z = 0.0;

    Vec3 cartesian() const { return {rho * std::cos(phi), rho * std::sin(phi), z}; }
};

// Spherical unit vectors with Condon-Shortley phases: e_{+1} = -(x + iy)/sqrt2,
// e_{-1} = (x - iy)/sqrt2, e_0 = z.
inline CVec3 spherical_unit(int q)
{
    const double s = 1.0 / std::sqrt(2.0);
    switch (q) {
    case 1: return CVec3(-s, -s * kI, 0.0);
    case -1: return CVec3(s, -s * kI, 0.0);
    default: return CVec3(0.0, 0.0, 1.0);
    }
}

// Circular transverse polarization carried by the paraxial part of a sigma mode.
inline CVec3 circular_vector(int sigma)
{
    const double s = 1.0 / std::sqrt(2.0);
    return CVec3(s, s * static_cast<double>(sigma) * kI, 0.0);
}

}  // namespace nfqed
