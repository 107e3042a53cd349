#pragma once

// Single-excitation scattering of one guided photon by an array of F0 = 1 ->
// F = 0 atoms: collective basis, self-energy, resolvent and S-matrix.
//
// Energies are in internal units (hbar = omega0 = 1); detunings on input and
// output grids are in units of the natural width gamma.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "nfqed/atomic.hpp"
#include "nfqed/fiber_modes.hpp"
#include "nfqed/greens.hpp"

namespace nfqed {

struct Truncation {
    // Maximum number of spectator atoms away from their initial sublevel;
    // nullopt keeps the full ground manifold.
    std::optional<int> max_flips;

    static Truncation full() { return {}; }
    static Truncation max_spin_flips(int s) { return {s}; }
};

inline constexpr std::size_t kDefaultDimensionCap = 100000;

// States (a, {m_j, j != a}): atom a in the excited level, the others in ground
// sublevels. Ordered by excited atom, then lexicographically in the sublevel
// order +1, 0, -1 over the spectators.
class ExcitationBasis {
public:
    struct State {
        int excited;
        std::vector<int> config;  // m_j for all atoms; entry `excited` is unused (0)
    };

    // Throws DimensionOverflow if the dimension exceeds `cap`.
    ExcitationBasis(int n_atoms, const Truncation& truncation, const std::vector<int>& initial_config,
                    std::size_t cap = kDefaultDimensionCap);
    ExcitationBasis(int n_atoms, const Truncation& truncation, std::size_t cap = kDefaultDimensionCap);

    int n_atoms() const { return n_atoms_; }
    std::size_t size() const { return states_.size(); }
    const State& state(std::size_t i) const { return states_[i]; }
    const std::vector<int>& initial_config() const { return initial_; }
    const Truncation& truncation() const { return truncation_; }

    // Index of (excited, config) ignoring config[excited]; nullopt if the state
    // is outside the truncation.
    std::optional<std::size_t> index_of(int excited, const std::vector<int>& config) const;

    // Dimension formula without enumerating (saturates at SIZE_MAX).
    static std::size_t dimension(int n_atoms, const Truncation& truncation);

private:
    std::string key(int excited, const std::vector<int>& config) const;

    int n_atoms_;
    Truncation truncation_;
    std::vector<int> initial_;
    std::vector<State> states_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class GreenModel { Full, GuidedOnly };

struct ModelOptions {
    GreenModel green = GreenModel::Full;
    Truncation truncation = Truncation::full();
    // Re-solve the mode and rebuild the self-energy at every scan frequency
    // instead of once at omega0.
    bool sigma_at_scan_freq = false;
    // Common level shift, units of gamma_nat.
    double shift_delta = 0.0;
    // Sensitivity toggle for the paraxial subtraction term (full model only).
    bool include_subtraction = true;
};

struct DecayRates {
    double guided;
    double external;
    double total() const { return guided + external; }
};

// Closed-form decay rates at radius rho, omega being the mode frequency:
//   guided   = 4 omega d0^2 (|E_rho|^2 + |E_phi|^2 + |E_z|^2) / v_g
//   external = 4 omega^3 d0^2 - 2 omega d0^2 |E_rho - i E_phi|^2
// with the two external pieces switched by terms.vacuum / terms.subtraction.
// Mode must be normalized. Throws InsideFiber.
DecayRates decay_rates(const GuidedMode& mode, const AtomicTransition& transition, double rho,
                       const GreenTerms& terms = {});

// shift_delta * gamma_nat - (i/2) gamma(rho). Throws InsideFiber.
cdouble single_atom_self_energy(const GuidedMode& mode, const AtomicTransition& transition, const CylPoint& r,
                                double shift_delta, const GreenTerms& terms = {});

// Transfer of the excitation from atom a (left in m_prime) to atom b
// (leaving m): d(m) . D(r_b, r_a) . conj(d(m_prime)).
cdouble pair_self_energy(const GuidedMode& mode, const AtomicTransition& transition, const CylPoint& r_a,
                         const CylPoint& r_b, int m, int m_prime, const GreenTerms& terms = {});

GreenTerms green_terms(const ModelOptions& options);

// Self-energy over the basis, evaluated at the mode frequency.
Eigen::MatrixXcd assemble_self_energy(const ExcitationBasis& basis, const AtomArray& array,
                                      const GuidedMode& mode, const ModelOptions& options);

// LU factorization of (E - omega0) - Sigma, reusable across sources.
class Resolvent {
public:
    // Throws SingularMatrix.
    Resolvent(const Eigen::MatrixXcd& sigma, double detuning_energy);
    Eigen::VectorXcd solve(const Eigen::VectorXcd& source) const;

private:
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

struct ScatteringChannel {
    int sigma = -1;
    Direction direction = Direction::Forward;
    std::vector<int> final_config;

    bool operator==(const ScatteringChannel&) const = default;
};

struct ChannelAmplitude {
    ScatteringChannel channel;
    cdouble amplitude;  // S-matrix element from the incoming channel
};

// Scattering setup at one evaluation frequency (the mode's). Self-energy and
// vertex factors are built once; each detuning costs one factorization.
class ScatteringProblem {
public:
    ScatteringProblem(const AtomArray& array, const GuidedMode& mode, const ExcitationBasis& basis,
                      const ModelOptions& options);

    const Eigen::MatrixXcd& self_energy() const { return sigma_; }
    const ExcitationBasis& basis() const { return basis_; }

    // Absorption amplitudes d(m_a) . E_in(r_a) over the basis.
    Eigen::VectorXcd source(const ScatteringChannel& in) const;

    // T-matrix element per unit length: 2 pi omega sum_b conj(d(m') . E_out(r_b)) x_b.
    cdouble t_matrix_element(const ScatteringChannel& out, const ScatteringChannel& in,
                             double detuning_energy) const;
    // delta - (i / v_g) T.
    cdouble s_matrix_element(const ScatteringChannel& out, const ScatteringChannel& in,
                             double detuning_energy) const;

    // Every reachable outgoing channel with its S-matrix element, from one
    // factorization. Ordered by final-config code, then sigma (+1, -1), then
    // direction (forward, backward).
    std::vector<ChannelAmplitude> amplitudes(const ScatteringChannel& in, double detuning_energy) const;

    ScatteringChannel default_incoming() const;

private:
    cdouble emission_vertex(std::size_t state, int m_prime, int sigma, Direction dir) const;

    AtomArray array_;
    GuidedMode mode_;
    ExcitationBasis basis_;
    Eigen::MatrixXcd sigma_;
    // d(m') . E_{sigma,dir}(r_a) per atom, indexed [(1 - m') * 4 + slot].
    std::vector<std::array<cdouble, 12>> vertices_;
};

struct SpectrumPoint {
    double delta_over_gamma = 0.0;
    double T = 1.0;
    double R = 0.0;
    double L = 0.0;
    double T_rayleigh_same = 0.0;
    double T_rayleigh_cross = 0.0;
    double T_raman = 0.0;
    double R_rayleigh_same = 0.0;
    double R_rayleigh_cross = 0.0;
    double R_raman = 0.0;
};

struct SpectrumResult {
    std::vector<SpectrumPoint> points;
};

// Detuning grid of `points` values spanning [lo, hi] inclusive.
std::vector<double> detuning_grid(double lo, double hi, int points);

// T, R, L and the channel split for the incoming (sigma = -1, forward) photon
// with every atom in its initial sublevel. `mode` is the normalized mode at
// omega0. Grid points are computed in parallel with `threads` workers.
SpectrumResult compute_spectrum(const AtomArray& array, const GuidedMode& mode,
                                const std::vector<double>& detunings_over_gamma, const ModelOptions& options,
                                unsigned threads = 1);

}  // namespace nfqed
