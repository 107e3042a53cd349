#pragma once

// F0 = 1 -> F = 0 transition, its dipole matrix elements and atom arrays along
// the fiber.

#include <cstdint>
#include <vector>

#include "nfqed/geometry.hpp"

namespace nfqed {

struct AtomicTransition {
    double omega0 = 1.0;
    double gamma_nat = 0.0;  // natural decay rate, units of omega0
    double d0_sq = 0.0;      // set by calibrate_d0

    // Transition with d0_sq fixed by the free-space calibration.
    static AtomicTransition calibrated(double gamma_nat, double omega0 = 1.0);
};

// d0^2 such that -2 d0^2 Im tr D_vac(r, r; omega0) = gamma_nat, i.e.
// gamma_nat / (4 omega0^3). Throws InvalidArgument unless gamma_nat > 0.
double calibrate_d0(double gamma_nat, double omega0 = 1.0);

// <F=0, 0| d |F0=1, m0> in Cartesian components: d0 conj(e_{-m0}).
CVec3 dipole_vector(int m0, double d0_sq);

struct AtomArray {
    std::vector<CylPoint> positions;  // z strictly increasing
    std::vector<int> initial_zeeman;  // m0 per atom
    AtomicTransition transition;

    std::size_t size() const { return positions.size(); }
};

// Atoms at z_j = j * spacing on a common line (rho, phi), all in m0 = +1.
// Throws InvalidGeometry if rho <= fiber_radius, spacing <= 0 or n < 1.
AtomArray build_ordered_array(int n, double spacing, double rho, double phi, double fiber_radius,
                              const AtomicTransition& transition);

struct DisorderOptions {
    double min_separation = 2.0 * kPi * 1e-3;  // 1e-3 lambda0 in internal units
    int max_attempts = 10000;
};

// z drawn i.i.d. uniform on [0, n * mean_spacing) with a seeded mt19937_64,
// sorted; whole draws are rejected until every gap is >= min_separation.
// Throws ResampleExhausted after max_attempts, InvalidGeometry as above.
AtomArray sample_disordered_array(int n, double mean_spacing, double rho, double phi, double fiber_radius,
                                  const AtomicTransition& transition, std::uint64_t seed,
                                  const DisorderOptions& options = {});

}  // namespace nfqed
