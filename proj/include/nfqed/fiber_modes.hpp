#pragma once

// HE11 guided mode of a step-index cylindrical nanofiber.
//
// All quantities are in internal units (hbar = c = 1). The radial profile
// functions follow the per-unit-length convention: the azimuthal 1/sqrt(2 pi)
// and the longitudinal 1/sqrt(L) of a full mode function are not part of
// RadialProfile; mode_field_cartesian() puts the 1/sqrt(2 pi) back.

#include <optional>
#include <vector>

#include "nfqed/geometry.hpp"

namespace nfqed {

struct FiberSpec {
    double radius = 0.0;        // a
    double permittivity = 0.0;  // epsilon = n^2

    double index() const { return std::sqrt(permittivity); }
    // Throws InvalidArgument unless radius > 0 and permittivity > 1.
    void validate() const;
};

enum class Direction { Forward = 1, Backward = -1 };

inline int sign(Direction d) { return static_cast<int>(d); }

// (E_rho, E_phi, E_z) of the sigma = +1, forward mode at one radius.
struct RadialProfile {
    cdouble e_rho;
    cdouble e_phi;
    cdouble e_z;

    double intensity() const { return std::norm(e_rho) + std::norm(e_phi) + std::norm(e_z); }
};

class GuidedMode {
public:
    // Solves the dispersion relation and the group velocity at omega. The
    // returned mode is not normalized yet (see normalize_mode).
    static GuidedMode solve(const FiberSpec& fiber, double omega);

    const FiberSpec& fiber() const { return fiber_; }
    double frequency() const { return omega_; }
    double wavenumber() const { return k_; }
    double group_velocity() const { return group_velocity_; }
    double u_param() const { return u_; }
    double kappa_in() const { return kappa_in_; }
    // |kappa_out|; kappa_out itself is i * kappa_out_abs().
    double kappa_out_abs() const { return kappa_out_; }

    bool normalized() const { return norm_const_.has_value(); }
    // Throws NotNormalized if unset.
    double norm_const() const;
    GuidedMode with_norm_const(double c) const;

    // Sign fixing -i E_rho(a+) > 0; absorbed into every profile evaluation.
    double phase_sign() const { return phase_sign_; }

private:
    FiberSpec fiber_;
    double omega_ = 0.0;
    double k_ = 0.0;
    double group_velocity_ = 0.0;
    double u_ = 0.0;
    double kappa_in_ = 0.0;
    double kappa_out_ = 0.0;
    double phase_sign_ = 1.0;
    std::optional<double> norm_const_;
};

// Pole-free form of the HE11/EH11 characteristic equation at wavenumber k in
// the open guided window (omega/c, n omega/c). Zero exactly at the guided modes.
double characteristic_function(const FiberSpec& fiber, double omega, double k);

// Roots of characteristic_function located by a uniform scan of `points`
// samples over the guided window, each sign change refined by TOMS 748.
std::vector<double> scan_dispersion_roots(const FiberSpec& fiber, double omega, int points);

// Unique guided root k(omega). Throws NoRoot or MultipleRoots. Very weak guidance
// (V = k0 a sqrt(n^2 - 1) below about 0.45) puts the root closer to k0 than the
// scan resolves and reports NoRoot.
double solve_dispersion(const FiberSpec& fiber, double omega);

// True iff exactly one guided root exists (dense scan, 1e4 samples).
bool check_single_mode(const FiberSpec& fiber, double omega);

// Central difference v_g = 2 d / (k(omega + d) - k(omega - d)), d = rel_step * omega.
double group_velocity(const FiberSpec& fiber, double omega, double rel_step = 1e-6);

// u of the HE11 solution (the standard "s" parameter). Throws BesselDomain if
// kappa_in * a sits on a zero of J1.
double eval_u_param(const GuidedMode& mode);

// Unscaled profile (norm_const = 1), phase convention applied.
RadialProfile profile_shape(const GuidedMode& mode, double rho);

// Normalized profile. Throws NotNormalized.
RadialProfile eval_radial_profile(const GuidedMode& mode, double rho);

// Radial integral  int_0^inf rho epsilon(rho) |E(rho)|^2 d rho  for the mode's
// current norm_const (1 if unset).
double normalization_integral(const GuidedMode& mode);

// Radius beyond which K1(|kappa_out| rho) < 1e-16 K1(|kappa_out| a).
double exterior_cutoff_radius(const GuidedMode& mode);

// Target of normalization_integral after normalize_mode: the full mode
// function with its 1/sqrt(2 pi L) factors then integrates to one.
inline constexpr double kNormalizationTarget = 1.0;

GuidedMode normalize_mode(const GuidedMode& mode);

// Convenience: solve + normalize.
GuidedMode solve_normalized_mode(const FiberSpec& fiber, double omega);

// Cartesian field (E_x, E_y, E_z) of mode (sigma, direction) at a point,
// including e^{i sigma phi} and the longitudinal e^{i direction k z}.
CVec3 mode_field_cartesian(const GuidedMode& mode, int sigma, Direction direction, const CylPoint& p);

// Same field without the longitudinal plane-wave factor.
CVec3 mode_field_transverse_frame(const GuidedMode& mode, int sigma, Direction direction,
                                  double rho, double phi);

// Orthogonal projector onto the circular vector of the sigma mode: keeps the
// azimuth-independent transverse part of the field.
CVec3 project_transverse(const CVec3& field, int sigma);

}  // namespace nfqed
