#include "nfqed/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "nfqed/error.hpp"
#include "nfqed/spectral.hpp"
#include "nfqed/units.hpp"

namespace nfqed {

namespace {

std::string sci(double v)
{
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << v;
    return ss.str();
}

struct Setup {
    FiberSpec fiber{units::length_from_nm(200.0, 780.0), 1.45 * 1.45};
    GuidedMode mode = solve_normalized_mode(fiber, 1.0);
    AtomicTransition transition = AtomicTransition::calibrated(units::gamma_over_omega0(6.0666, 780.0));
};

SelftestResult guarded(const std::string& group, const std::function<SelftestResult()>& fn)
{
    try {
        return fn();
    } catch (const std::exception& e) {
        return {group, false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

std::vector<SelftestResult> run_selftest(unsigned threads)
{
    const Setup s;
    std::vector<SelftestResult> out;

    out.push_back(guarded("dispersion", [&] {
        const auto roots = scan_dispersion_roots(s.fiber, 1.0, 20000);
        const double k = s.mode.wavenumber();
        const bool ok = roots.size() == 1 && std::abs(roots[0] - k) <= 1e-10 * k && check_single_mode(s.fiber, 1.0) &&
                        !check_single_mode({units::length_from_nm(2000.0, 780.0), 1.45 * 1.45}, 1.0);
        return SelftestResult{"dispersion", ok, "roots=" + std::to_string(roots.size()) + " k=" + std::to_string(k)};
    }));

    out.push_back(guarded("mode_continuity", [&] {
        const double a = s.fiber.radius;
        const auto in = eval_radial_profile(s.mode, a * (1.0 - 1e-12));
        const auto ou = eval_radial_profile(s.mode, a * (1.0 + 1e-12));
        const double e1 = std::abs(in.e_phi - ou.e_phi) / std::abs(ou.e_phi);
        const double e2 = std::abs(in.e_z - ou.e_z) / std::abs(ou.e_z);
        const double e3 = std::abs(s.fiber.permittivity * in.e_rho - ou.e_rho) / std::abs(ou.e_rho);
        const double worst = std::max({e1, e2, e3});
        return SelftestResult{"mode_continuity", worst < 1e-8, "max rel jump " + sci(worst)};
    }));

    out.push_back(guarded("normalization", [&] {
        const double v = normalization_integral(s.mode);
        const double err = std::abs(v - kNormalizationTarget) / kNormalizationTarget;
        return SelftestResult{"normalization", err < 1e-9, "rel err " + sci(err)};
    }));

    out.push_back(guarded("green_reciprocity", [&] {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const CylPoint r{s.fiber.radius * (1.05 + 2.0 * u(rng)), 2.0 * kPi * u(rng), 20.0 * u(rng)};
            const CylPoint rp{s.fiber.radius * (1.05 + 2.0 * u(rng)), 2.0 * kPi * u(rng), 20.0 * u(rng)};
            const GreensTensor d1 = total_green(s.mode, r, rp, 1.0);
            const GreensTensor d2 = total_green(s.mode, rp, r, 1.0);
            worst = std::max(worst, (d1 - d2.transpose()).norm() / d1.norm());
        }
        return SelftestResult{"green_reciprocity", worst < 1e-10, "max rel asymmetry " + sci(worst)};
    }));

    out.push_back(guarded("dipole_calibration", [&] {
        const double d0 = s.transition.d0_sq;
        CMat3 sum = CMat3::Zero();
        for (int m : {-1, 0, 1}) {
            const CVec3 d = dipole_vector(m, d0);
            sum += d * d.adjoint();
        }
        const double completeness = (sum - d0 * CMat3::Identity()).norm() / d0;
        const double gamma = -2.0 * d0 * vacuum_green_imag_coincident(1.0).trace().imag();
        const double roundtrip = std::abs(gamma - s.transition.gamma_nat) / s.transition.gamma_nat;
        return SelftestResult{"dipole_calibration", completeness < 1e-15 && roundtrip < 1e-14,
                              "completeness " + sci(completeness) + " round trip " + sci(roundtrip)};
    }));

    out.push_back(guarded("lossless_unitarity", [&] {
        ModelOptions opts;
        opts.green = GreenModel::GuidedOnly;
        opts.truncation = Truncation::max_spin_flips(1);
        const auto grid = detuning_grid(-10.0, 10.0, 41);
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const auto array =
                build_ordered_array(n, kPi / s.mode.wavenumber(), 1.5 * s.fiber.radius, 0.0, s.fiber.radius, s.transition);
            for (const auto& p : compute_spectrum(array, s.mode, grid, opts, threads).points) {
                worst = std::max(worst, std::abs(p.T + p.R - 1.0));
            }
        }
        return SelftestResult{"lossless_unitarity", worst < 1e-9, "max |T+R-1| " + sci(worst)};
    }));

    out.push_back(guarded("single_atom", [&] {
        const CylPoint r{1.5 * s.fiber.radius, 0.0, 0.0};
        const auto array = build_ordered_array(1, 1.0, r.rho, 0.0, s.fiber.radius, s.transition);
        const ExcitationBasis basis(1, Truncation::full());
        const ScatteringProblem problem(array, s.mode, basis, ModelOptions{});
        const auto p = eval_radial_profile(s.mode, r.rho);
        const double coupling = s.transition.d0_sq * std::norm(p.e_rho - kI * p.e_phi) / (2.0 * s.mode.group_velocity());
        const cdouble sigma = single_atom_self_energy(s.mode, s.transition, r, 0.0);
        const auto in = problem.default_incoming();
        double worst = 0.0;
        for (double delta : detuning_grid(-10.0, 10.0, 21)) {
            const double e = delta * s.transition.gamma_nat;
            const cdouble t = 1.0 - kI * coupling / (e - sigma);
            worst = std::max(worst, std::abs(problem.s_matrix_element(in, in, e) - t));
        }
        return SelftestResult{"single_atom", worst < 1e-10, "max |t - t_closed| " + sci(worst)};
    }));

    out.push_back(guarded("seeded_disorder", [&] {
        const double d = kPi / s.mode.wavenumber();
        const auto a1 = sample_disordered_array(5, d, 1.5 * s.fiber.radius, 0.0, s.fiber.radius, s.transition, 42);
        const auto a2 = sample_disordered_array(5, d, 1.5 * s.fiber.radius, 0.0, s.fiber.radius, s.transition, 42);
        bool same = true;
        bool sorted = true;
        for (std::size_t i = 0; i < a1.size(); ++i) {
            same = same && a1.positions[i].z == a2.positions[i].z;
            sorted = sorted && (i == 0 || a1.positions[i].z > a1.positions[i - 1].z);
        }
        return SelftestResult{"seeded_disorder", same && sorted, same ? "bit-identical" : "differs"};
    }));
    return out;
}

}  // namespace nfqed
