#pragma once

// Electric-field Green's tensor near a nanofiber: free-space part, guided-mode
// pole part and the paraxial subtraction that removes the double-counted
// free-space modes. Internal units, hbar = c = 1.
//
// Sign convention: D is the retarded response, so -Im D is positive
// semidefinite at coincident points and the decay rate of a dipole d is
// -2 Im(d . D . d*).

#include "nfqed/fiber_modes.hpp"
#include "nfqed/geometry.hpp"

namespace nfqed {

using GreensTensor = CMat3;

// Spherical Hankel function of the first kind, orders 0..2, closed form.
cdouble spherical_hankel1(int order, double x);

// Free-space tensor at separation r - r'. Throws CoincidentPoints if r == r'.
GreensTensor vacuum_green(const Vec3& r, const Vec3& r_prime, double omega);

// Finite (imaginary) part of the free-space tensor at r == r':
// -(2/3) i omega^3 times the identity.
GreensTensor vacuum_green_imag_coincident(double omega);

// Guided-mode pole contribution
//   -(2 pi i omega / v_g) sum_sigma E_{sigma,s}(r) E_{sigma,s}(r')^dagger e^{ik|z-z'|},
// s = sign(z - z'); at z == z' both directions are averaged. Mode quantities
// come from `mode` (its own frequency); omega scales the prefactor.
// Throws InsideFiber unless rho, rho' > a.
GreensTensor waveguide_green(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime, double omega);

// Free-space modes that coincide with the guided ones in the paraxial limit,
// evaluated with vacuum dispersion: pole weight 1/c, phase e^{i omega|z-z'|},
// one of the two mode vectors replaced by its circular transverse projection.
// Symmetrized over which side is projected so that the tensor is reciprocal.
// Throws InsideFiber.
GreensTensor paraxial_subtraction(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime,
                                  double omega);

struct GreenTerms {
    bool vacuum = true;
    bool guided = true;
    bool subtraction = true;
};

// waveguide_green + vacuum - paraxial_subtraction. For coincident points the
// vacuum term is replaced by vacuum_green_imag_coincident.
GreensTensor total_green(const GuidedMode& mode, const CylPoint& r, const CylPoint& r_prime, double omega,
                         const GreenTerms& terms = {});

}  // namespace nfqed
