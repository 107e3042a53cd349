#include "nfqed/spectral.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "nfqed/error.hpp"
#include "nfqed/parallel.hpp"

namespace nfqed {

namespace {

constexpr std::array<int, 3> kSublevels{1, 0, -1};  // basis ordering
constexpr std::array<int, 2> kSigmas{1, -1};
constexpr std::array<Direction, 2> kDirections{Direction::Forward, Direction::Backward};

char sublevel_digit(int m) { return static_cast<char>('0' + (1 - m)); }  // +1 -> '0', -1 -> '2'

std::string config_key(const std::vector<int>& config)
{
    std::string k(config.size(), '0');
    for (std::size_t j = 0; j < config.size(); ++j) {
        k[j] = sublevel_digit(config[j]);
    }
    return k;
}

std::size_t saturating_mul(std::size_t a, std::size_t b)
{
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
        return std::numeric_limits<std::size_t>::max();
    }
    return a * b;
}

std::size_t saturating_add(std::size_t a, std::size_t b)
{
    return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

}  // namespace

ExcitationBasis::ExcitationBasis(int n_atoms, const Truncation& truncation, std::size_t cap)
    : ExcitationBasis(n_atoms, truncation, std::vector<int>(static_cast<std::size_t>(std::max(n_atoms, 0)), 1), cap)
{
}

ExcitationBasis::ExcitationBasis(int n_atoms, const Truncation& truncation, const std::vector<int>& initial_config,
                                 std::size_t cap)
    : n_atoms_(n_atoms), truncation_(truncation), initial_(initial_config)
{
    if (n_atoms < 0 || initial_config.size() != static_cast<std::size_t>(n_atoms)) {
        throw Error(ErrorCode::InvalidArgument, "initial configuration must list one sublevel per atom");
    }
    if (truncation.max_flips && *truncation.max_flips < 0) {
        throw Error(ErrorCode::InvalidArgument, "spin-flip truncation must be non-negative");
    }
    const std::size_t dim = dimension(n_atoms, truncation);
    if (dim > cap) {
        throw Error(ErrorCode::DimensionOverflow,
                    "basis dimension " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
    }
    states_.reserve(dim);
    const int max_flips = truncation.max_flips.value_or(n_atoms);
    std::vector<int> config(static_cast<std::size_t>(n_atoms), 0);
    for (int a = 0; a < n_atoms; ++a) {
        // Depth-first over spectators in atom order yields lexicographic order.
        auto recurse = [&](auto&& self, int j, int flips) -> void {
            if (j == n_atoms) {
                index_.emplace(key(a, config), states_.size());
                states_.push_back({a, config});
                return;
            }
            if (j == a) {
                config[static_cast<std::size_t>(j)] = 0;
                self(self, j + 1, flips);
                return;
            }
            for (int m : kSublevels) {
                const int f = flips + (m != initial_[static_cast<std::size_t>(j)] ? 1 : 0);
                if (f <= max_flips) {
                    config[static_cast<std::size_t>(j)] = m;
                    self(self, j + 1, f);
                }
            }
        };
        recurse(recurse, 0, 0);
    }
}

std::size_t ExcitationBasis::dimension(int n_atoms, const Truncation& truncation)
{
    if (n_atoms <= 0) {
        return 0;
    }
    const int spectators = n_atoms - 1;
    const int kmax = std::min(spectators, truncation.max_flips.value_or(spectators));
    // sum_k C(spectators, k) 2^k
    std::size_t total = 0;
    std::size_t binom = 1;
    std::size_t pow2 = 1;
    for (int k = 0; k <= kmax; ++k) {
        total = saturating_add(total, saturating_mul(binom, pow2));
        binom = saturating_mul(binom, static_cast<std::size_t>(spectators - k)) / static_cast<std::size_t>(k + 1);
        pow2 = saturating_mul(pow2, 2);
    }
    return saturating_mul(total, static_cast<std::size_t>(n_atoms));
}

std::string ExcitationBasis::key(int excited, const std::vector<int>& config) const
{
    std::string k = config_key(config);
    k[static_cast<std::size_t>(excited)] = 'e';
    return k;
}

std::optional<std::size_t> ExcitationBasis::index_of(int excited, const std::vector<int>& config) const
{
    if (excited < 0 || excited >= n_atoms_ || config.size() != static_cast<std::size_t>(n_atoms_)) {
        return std::nullopt;
    }
    const auto it = index_.find(key(excited, config));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

GreenTerms green_terms(const ModelOptions& options)
{
    const bool full = options.green == GreenModel::Full;
    return {full, true, full && options.include_subtraction};
}

DecayRates decay_rates(const GuidedMode& mode, const AtomicTransition& transition, double rho,
                       const GreenTerms& terms)
{
    if (!(rho > mode.fiber().radius)) {
        throw Error(ErrorCode::InsideFiber, "atom must sit outside the fiber");
    }
    const double omega = mode.frequency();
    const double d0_sq = transition.d0_sq;
    const auto p = eval_radial_profile(mode, rho);
    DecayRates rates{0.0, 0.0};
    if (terms.guided) {
        rates.guided = 4.0 * omega * d0_sq * p.intensity() / mode.group_velocity();
    }
    if (terms.vacuum) {
        rates.external += 4.0 * omega * omega * omega * d0_sq;
    }
    if (terms.subtraction) {
        rates.external -= 2.0 * omega * d0_sq * std::norm(p.e_rho - kI * p.e_phi);
    }
    return rates;
}

cdouble single_atom_self_energy(const GuidedMode& mode, const AtomicTransition& transition, const CylPoint& r,
                                double shift_delta, const GreenTerms& terms)
{
    const double gamma = decay_rates(mode, transition, r.rho, terms).total();
    return shift_delta * transition.gamma_nat - 0.5 * kI * gamma;
}

cdouble pair_self_energy(const GuidedMode& mode, const AtomicTransition& transition, const CylPoint& r_a,
                         const CylPoint& r_b, int m, int m_prime, const GreenTerms& terms)
{
    const GreensTensor d = total_green(mode, r_b, r_a, mode.frequency(), terms);
    const CVec3 absorb = dipole_vector(m, transition.d0_sq);
    const CVec3 emit = dipole_vector(m_prime, transition.d0_sq).conjugate();
    return absorb.transpose() * d * emit;
}

Eigen::MatrixXcd assemble_self_energy(const ExcitationBasis& basis, const AtomArray& array,
                                      const GuidedMode& mode, const ModelOptions& options)
{
    const int n = basis.n_atoms();
    if (static_cast<std::size_t>(n) != array.size()) {
        throw Error(ErrorCode::InvalidArgument, "basis and array disagree on the number of atoms");
    }
    const GreenTerms terms = green_terms(options);
    const auto& tr = array.transition;

    std::vector<cdouble> diag(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        diag[static_cast<std::size_t>(a)] =
            single_atom_self_energy(mode, tr, array.positions[static_cast<std::size_t>(a)], options.shift_delta, terms);
    }
    // coupling[a][b][m][m'] for the transfer a -> b, m at b, m' left at a.
    using Block = std::array<std::array<cdouble, 3>, 3>;
    std::vector<Block> coupling(static_cast<std::size_t>(n * n));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) {
                continue;
            }
            const GreensTensor d = total_green(mode, array.positions[static_cast<std::size_t>(b)],
                                               array.positions[static_cast<std::size_t>(a)], mode.frequency(), terms);
            Block& blk = coupling[static_cast<std::size_t>(a * n + b)];
            for (int m : kSublevels) {
                const CVec3 absorb = dipole_vector(m, tr.d0_sq);
                for (int mp : kSublevels) {
                    const CVec3 emit = dipole_vector(mp, tr.d0_sq).conjugate();
                    blk[static_cast<std::size_t>(1 - m)][static_cast<std::size_t>(1 - mp)] =
                        absorb.transpose() * d * emit;
                }
            }
        }
    }

    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& s = basis.state(i);
        sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[static_cast<std::size_t>(s.excited)];
        std::vector<int> target = s.config;
        for (int b = 0; b < n; ++b) {
            if (b == s.excited) {
                continue;
            }
            const int m = s.config[static_cast<std::size_t>(b)];
            const Block& blk = coupling[static_cast<std::size_t>(s.excited * n + b)];
            for (int mp : kSublevels) {
                target = s.config;
                target[static_cast<std::size_t>(s.excited)] = mp;
                target[static_cast<std::size_t>(b)] = 0;
                if (const auto j = basis.index_of(b, target)) {
                    sigma(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) +=
                        blk[static_cast<std::size_t>(1 - m)][static_cast<std::size_t>(1 - mp)];
                }
            }
        }
    }
    return sigma;
}

Resolvent::Resolvent(const Eigen::MatrixXcd& sigma, double detuning_energy)
{
    Eigen::MatrixXcd m = -sigma;
    m.diagonal().array() += detuning_energy;
    lu_.compute(m);
    const double rc = lu_.rcond();
    if (!(rc > std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCode::SingularMatrix, "resolvent matrix is numerically singular");
    }
}

Eigen::VectorXcd Resolvent::solve(const Eigen::VectorXcd& source) const
{
    return lu_.solve(source);
}

ScatteringProblem::ScatteringProblem(const AtomArray& array, const GuidedMode& mode, const ExcitationBasis& basis,
                                     const ModelOptions& options)
    : array_(array), mode_(mode), basis_(basis), sigma_(assemble_self_energy(basis, array, mode, options))
{
    vertices_.resize(array_.size());
    for (std::size_t a = 0; a < array_.size(); ++a) {
        for (int mp : kSublevels) {
            const CVec3 d = dipole_vector(mp, array_.transition.d0_sq);
            for (std::size_t si = 0; si < kSigmas.size(); ++si) {
                for (std::size_t di = 0; di < kDirections.size(); ++di) {
                    const CVec3 e = mode_field_cartesian(mode_, kSigmas[si], kDirections[di], array_.positions[a]);
                    vertices_[a][static_cast<std::size_t>(1 - mp) * 4 + 2 * si + di] = d.transpose() * e;
                }
            }
        }
    }
}

ScatteringChannel ScatteringProblem::default_incoming() const
{
    return {-1, Direction::Forward, array_.initial_zeeman};
}

cdouble ScatteringProblem::emission_vertex(std::size_t state, int m_prime, int sigma, Direction dir) const
{
    const auto a = static_cast<std::size_t>(basis_.state(state).excited);
    const std::size_t slot = 2 * (sigma == 1 ? 0 : 1) + (dir == Direction::Forward ? 0 : 1);
    return vertices_[a][static_cast<std::size_t>(1 - m_prime) * 4 + slot];
}

Eigen::VectorXcd ScatteringProblem::source(const ScatteringChannel& in) const
{
    Eigen::VectorXcd src = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_.size()));
    for (int a = 0; a < basis_.n_atoms(); ++a) {
        const auto i = basis_.index_of(a, in.final_config);
        if (!i) {
            continue;
        }
        const int m = in.final_config[static_cast<std::size_t>(a)];
        const CVec3 e = mode_field_cartesian(mode_, in.sigma, in.direction, array_.positions[static_cast<std::size_t>(a)]);
        src(static_cast<Eigen::Index>(*i)) = dipole_vector(m, array_.transition.d0_sq).transpose() * e;
    }
    return src;
}

cdouble ScatteringProblem::t_matrix_element(const ScatteringChannel& out, const ScatteringChannel& in,
                                            double detuning_energy) const
{
    if (basis_.size() == 0) {
        return 0.0;
    }
    const Eigen::VectorXcd x = Resolvent(sigma_, detuning_energy).solve(source(in));
    cdouble t = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const auto& s = basis_.state(i);
        bool match = true;
        for (std::size_t j = 0; j < s.config.size(); ++j) {
            match = match && (static_cast<int>(j) == s.excited || s.config[j] == out.final_config[j]);
        }
        if (!match) {
            continue;
        }
        const int mp = out.final_config[static_cast<std::size_t>(s.excited)];
        t += std::conj(emission_vertex(i, mp, out.sigma, out.direction)) * x(static_cast<Eigen::Index>(i));
    }
    return 2.0 * kPi * mode_.frequency() * t;
}

cdouble ScatteringProblem::s_matrix_element(const ScatteringChannel& out, const ScatteringChannel& in,
                                            double detuning_energy) const
{
    const cdouble delta = out == in ? 1.0 : 0.0;
    return delta - kI / mode_.group_velocity() * t_matrix_element(out, in, detuning_energy);
}

std::vector<ChannelAmplitude> ScatteringProblem::amplitudes(const ScatteringChannel& in, double detuning_energy) const
{
    // slot = 2 * sigma_index + direction_index
    std::map<std::string, std::array<cdouble, 4>> acc;
    std::map<std::string, std::vector<int>> configs;
    if (basis_.size() > 0) {
        const Eigen::VectorXcd x = Resolvent(sigma_, detuning_energy).solve(source(in));
        const cdouble pref = -kI * 2.0 * kPi * mode_.frequency() / mode_.group_velocity();
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            const auto& s = basis_.state(i);
            const cdouble xi = x(static_cast<Eigen::Index>(i));
            for (int mp : kSublevels) {
                std::vector<int> fc = s.config;
                fc[static_cast<std::size_t>(s.excited)] = mp;
                const std::string k = config_key(fc);
                auto& slots = acc[k];
                configs.emplace(k, fc);
                for (std::size_t si = 0; si < kSigmas.size(); ++si) {
                    for (std::size_t di = 0; di < kDirections.size(); ++di) {
                        slots[2 * si + di] += pref * std::conj(emission_vertex(i, mp, kSigmas[si], kDirections[di])) * xi;
                    }
                }
            }
        }
    }
    const std::string in_key = config_key(in.final_config);
    configs.emplace(in_key, in.final_config);
    const std::size_t in_slot = 2 * (in.sigma == 1 ? 0 : 1) + (in.direction == Direction::Forward ? 0 : 1);
    acc[in_key][in_slot] += 1.0;

    std::vector<ChannelAmplitude> out;
    out.reserve(acc.size() * 4);
    for (const auto& [k, slots] : acc) {
        for (std::size_t si = 0; si < kSigmas.size(); ++si) {
            for (std::size_t di = 0; di < kDirections.size(); ++di) {
                out.push_back({{kSigmas[si], kDirections[di], configs.at(k)}, slots[2 * si + di]});
            }
        }
    }
    return out;
}

std::vector<double> detuning_grid(double lo, double hi, int points)
{
    if (points < 1) {
        throw Error(ErrorCode::InvalidArgument, "detuning grid needs at least one point");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    }
    return grid;
}

namespace {

SpectrumPoint classify(double delta, const ScatteringChannel& in, const std::vector<ChannelAmplitude>& amps)
{
    SpectrumPoint p;
    p.delta_over_gamma = delta;
    p.T = 0.0;
    for (const auto& a : amps) {
        const double prob = std::norm(a.amplitude);
        const bool forward = a.channel.direction == Direction::Forward;
        const bool rayleigh = a.channel.final_config == in.final_config;
        const bool same = a.channel.sigma == in.sigma;
        (forward ? p.T : p.R) += prob;
        double& bucket = rayleigh ? (same ? (forward ? p.T_rayleigh_same : p.R_rayleigh_same)
                                          : (forward ? p.T_rayleigh_cross : p.R_rayleigh_cross))
                                  : (forward ? p.T_raman : p.R_raman);
        bucket += prob;
    }
    p.L = 1.0 - p.T - p.R;
    return p;
}

}  // namespace

SpectrumResult compute_spectrum(const AtomArray& array, const GuidedMode& mode,
                                const std::vector<double>& detunings_over_gamma, const ModelOptions& options,
                                unsigned threads)
{
    const int n = static_cast<int>(array.size());
    const ExcitationBasis basis(n, options.truncation, array.initial_zeeman);
    const double gamma = array.transition.gamma_nat;
    const double omega0 = array.transition.omega0;

    SpectrumResult result;
    result.points.resize(detunings_over_gamma.size());

    std::optional<ScatteringProblem> fixed;
    if (!options.sigma_at_scan_freq) {
        fixed.emplace(array, mode, basis, options);
    }
    parallel_for(detunings_over_gamma.size(), threads, [&](std::size_t i) {
        const double delta = detunings_over_gamma[i];
        const double energy = delta * gamma;
        if (fixed) {
            const auto in = fixed->default_incoming();
            result.points[i] = classify(delta, in, fixed->amplitudes(in, energy));
            return;
        }
        const GuidedMode scan_mode = solve_normalized_mode(mode.fiber(), omega0 + energy);
        const ScatteringProblem problem(array, scan_mode, basis, options);
        const auto in = problem.default_incoming();
        result.points[i] = classify(delta, in, problem.amplitudes(in, energy));
    });
    return result;
}

}  // namespace nfqed
