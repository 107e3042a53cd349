#include "nfqed/greens.hpp"

#include <array>

#include "nfqed/error.hpp"

namespace nfqed {

namespace {

constexpr std::array<int, 2> kSigmas{1, -1};

void require_outside(const GuidedMode& mode, const CylPoint& p)
{
    if (!(p.rho > mode.fiber().radius)) {
        throw Error(ErrorCode::InsideFiber, "field point at rho = " + std::to_string(p.rho) +
                                                " is not outside the fiber");
    }
}

bool same_point(const CylPoint& a, const CylPoint& b)
{
    return (a.cartesian() - b.cartesian()).norm() == 0.0;
}

// Directions contributing at longitudinal offset dz, each with its weight.
template <typename Fn>
void for_each_direction(double dz, Fn&& fn)
{
    if (dz > 0.0) {
        fn(Direction::Forward, 1.0);
    } else if (dz < 0.0) {
        fn(Direction::Backward, 1.0);
    } else {
        fn(Direction::Forward, 0.5);
        fn(Direction::Backward, 0.5);
    }
}

}  // namespace

cdouble spherical_hankel1(int order, double x)
{
    const cdouble e = std::exp(kI * x) / x;
    switch (order) {
    case 0: return -kI * e;
    case 1: return -e * (1.0 + kI / x);
    case 2: return kI * e * (1.0 + 3.0 * kI / x - 3.0 / (x * x));
    default: throw Error(ErrorCode::InvalidArgument, "spherical_hankel1: order must be 0, 1 or 2");
    }
}

GreensTensor vacuum_green(const Vec3& r, const Vec3& r_prime, double omega)
{
    const Vec3 d = r - r_prime;
    const double dist = d.norm();
    if (dist == 0.0) {
        throw Error(ErrorCode::CoincidentPoints, "vacuum_green needs distinct points");
    }
    const double x = omega * dist;
    const Vec3 n = d / dist;
    const cdouble iso = kI * (2.0 / 3.0) * spherical_hankel1(0, x);
    const cdouble aniso = kI * spherical_hankel1(2, x);
    const Eigen::Matrix3d nn = n * n.transpose();
    const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
    const double w3 = omega * omega * omega;
    return -w3 * (iso * id.cast<cdouble>() + aniso * (nn - id / 3.0).cast<cdouble>());
}

GreensTensor vacuum_green_imag_coincident(double omega)
{
    return GreensTensor::Identity() * (-kI * (2.0 / 3.0) * omega * omega * omega);
}

GreensTensor waveguide_green(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime, double omega)
{
    require_outside(mode, r);
    require_outside(mode, r_prime);
    const double dz = r.z - r_prime.z;
    GreensTensor sum = GreensTensor::Zero();
    for_each_direction(dz, [&](Direction dir, double weight) {
        for (int sigma : kSigmas) {
            const CVec3 e = mode_field_transverse_frame(mode, sigma, dir, r.rho, r.phi);
            const CVec3 ep = mode_field_transverse_frame(mode, sigma, dir, r_prime.rho, r_prime.phi);
            sum += weight * (e * ep.adjoint());
        }
    });
    const cdouble phase = std::exp(kI * (mode.wavenumber() * std::abs(dz)));
    return (-2.0 * kPi * kI * omega / mode.group_velocity()) * phase * sum;
}

GreensTensor paraxial_subtraction(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime,
                                  double omega)
{
    require_outside(mode, r);
    require_outside(mode, r_prime);
    const double dz = r.z - r_prime.z;
    GreensTensor sum = GreensTensor::Zero();
    for_each_direction(dz, [&](Direction dir, double weight) {
        for (int sigma : kSigmas) {
            const CVec3 e = mode_field_transverse_frame(mode, sigma, dir, r.rho, r.phi);
            const CVec3 ep = mode_field_transverse_frame(mode, sigma, dir, r_prime.rho, r_prime.phi);
            const CVec3 e_perp = project_transverse(e, sigma);
            const CVec3 ep_perp = project_transverse(ep, sigma);
            sum += (0.5 * weight) * (e * ep_perp.adjoint() + e_perp * ep.adjoint());
        }
    });
    const cdouble phase = std::exp(kI * (omega * std::abs(dz)));
    return (-2.0 * kPi * kI * omega) * phase * sum;
}

GreensTensor total_green(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime, double omega,
                         const GreenTerms& terms)
{
    require_outside(mode, r);
    require_outside(mode, r_prime);
    GreensTensor d = GreensTensor::Zero();
    if (terms.guided) {
        d += waveguide_green(mode, r, r_prime, omega);
    }
    if (terms.vacuum) {
        d += same_point(r, r_prime) ? vacuum_green_imag_coincident(omega)
                                    : vacuum_green(r.cartesian(), r_prime.cartesian(), omega);
    }
    if (terms.subtraction) {
        d -= paraxial_subtraction(mode, r, r_prime, omega);
    }
    return d;
}

}  // namespace nfqed
