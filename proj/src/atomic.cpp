#include "nfqed/atomic.hpp"

#include <algorithm>
#include <random>

#include "nfqed/error.hpp"

namespace nfqed {

namespace {

void check_line(int n, double rho, double fiber_radius)
{
    if (n < 1) {
        throw Error(ErrorCode::InvalidGeometry, "array needs at least one atom");
    }
    if (!(rho > fiber_radius)) {
        throw Error(ErrorCode::InvalidGeometry, "atoms must sit outside the fiber (rho > a)");
    }
}

AtomArray line_array(const std::vector<double>& z, double rho, double phi, const AtomicTransition& transition)
{
    AtomArray array;
    array.transition = transition;
    array.positions.reserve(z.size());
    for (double zj : z) {
        array.positions.push_back({rho, phi, zj});
    }
    array.initial_zeeman.assign(z.size(), 1);
    return array;
}

}  // namespace

double calibrate_d0(double gamma_nat, double omega0)
{
    if (!(gamma_nat > 0.0) || !(omega0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gamma_nat and omega0 must be positive");
    }
    return gamma_nat / (4.0 * omega0 * omega0 * omega0);
}

AtomicTransition AtomicTransition::calibrated(double gamma_nat, double omega0)
{
    return {omega0, gamma_nat, calibrate_d0(gamma_nat, omega0)};
}

CVec3 dipole_vector(int m0, double d0_sq)
{
    if (m0 < -1 || m0 > 1) {
        throw Error(ErrorCode::InvalidArgument, "ground sublevel must be -1, 0 or +1");
    }
    return std::sqrt(d0_sq) * spherical_unit(-m0).conjugate();
}

AtomArray build_ordered_array(int n, double spacing, double rho, double phi, double fiber_radius,
                              const AtomicTransition& transition)
{
    check_line(n, rho, fiber_radius);
    if (!(spacing > 0.0)) {
        throw Error(ErrorCode::InvalidGeometry, "spacing must be positive");
    }
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        z[static_cast<std::size_t>(j)] = j * spacing;
    }
    return line_array(z, rho, phi, transition);
}

AtomArray sample_disordered_array(int n, double mean_spacing, double rho, double phi, double fiber_radius,
                                  const AtomicTransition& transition, std::uint64_t seed,
                                  const DisorderOptions& options)
{
    check_line(n, rho, fiber_radius);
    if (!(mean_spacing > 0.0)) {
        throw Error(ErrorCode::InvalidGeometry, "mean spacing must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, n * mean_spacing);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        for (double& zj : z) {
            zj = uniform(rng);
        }
        std::sort(z.begin(), z.end());
        bool ok = true;
        for (std::size_t j = 1; j < z.size(); ++j) {
            ok = ok && (z[j] - z[j - 1] >= options.min_separation);
        }
        if (ok) {
            return line_array(z, rho, phi, transition);
        }
    }
    throw Error(ErrorCode::ResampleExhausted,
                "no configuration met the minimum separation after " + std::to_string(options.max_attempts) +
                    " draws");
}

}  // namespace nfqed
