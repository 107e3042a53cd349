#include <cmath>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <doctest.h>

#include "nfqed/error.hpp"
#include "nfqed/fiber_modes.hpp"
#include "nfqed/units.hpp"
#include "oracles.hpp"

using namespace nfqed;
namespace bm = boost::math;

using oracle::fiber;
using oracle::simpson;

namespace {

std::vector<double> oracle_roots(const FiberSpec& f, double omega) { return oracle::roots(f, omega); }

}  // namespace

TEST_SUITE("fiber_modes")
{
    TEST_CASE("dispersion root agrees with the dense-scan oracle")
    {
        for (const auto& [a_nm, n] : std::vector<std::pair<double, double>>{
                 {200.0, 1.45}, {200.0, 1.1}, {150.0, 1.45}, {250.0, 1.3}, {100.0, 2.0}}) {
            CAPTURE(a_nm);
            CAPTURE(n);
            const FiberSpec f = fiber(a_nm, n);
            const auto oracle = oracle_roots(f, 1.0);
            REQUIRE(oracle.size() == 1);
            const double k = solve_dispersion(f, 1.0);
            CHECK(std::abs(k - oracle[0]) <= 1e-10 * k);
            CHECK(std::abs(characteristic_function(f, 1.0, k)) < 1e-8);
            CHECK(check_single_mode(f, 1.0));
        }
    }

    TEST_CASE("propagation constant lies inside the guided window")
    {
        const FiberSpec f = fiber(200.0, 1.45);
        const double k = solve_dispersion(f, 1.0);
        CHECK(k > 1.0);
        CHECK(k < 1.45);
    }

    TEST_CASE("multimode and degenerate fibers")
    {
        const FiberSpec thick = fiber(600.0, 1.45);
        CHECK_FALSE(check_single_mode(thick, 1.0));
        CHECK(oracle_roots(thick, 1.0).size() >= 2);
        CHECK_THROWS_AS(solve_dispersion(thick, 1.0), Error);
        try {
            solve_dispersion(thick, 1.0);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MultipleRoots);
        }
        CHECK_FALSE(check_single_mode({1.0, 1.0}, 1.0));
        CHECK_THROWS_AS(check_single_mode({-1.0, 2.0}, 1.0), Error);
        CHECK_THROWS_AS(GuidedMode::solve({1.0, 0.9}, 1.0), Error);
    }

    TEST_CASE("group velocity matches a difference quotient of oracle roots")
    {
        const FiberSpec f = fiber(200.0, 1.45);
        const double d = 1e-5;
        const double kp = oracle_roots(f, 1.0 + d).at(0);
        const double km = oracle_roots(f, 1.0 - d).at(0);
        const double vg = group_velocity(f, 1.0);
        CHECK(vg == doctest::Approx(2.0 * d / (kp - km)).epsilon(1e-6));
        CHECK(vg < 1.0);
        CHECK(vg > 1.0 / 1.45);
    }

    TEST_CASE("u parameter from finite-difference log derivatives")
    {
        for (double n : {1.45, 1.1}) {
            const GuidedMode m = GuidedMode::solve(fiber(200.0, n), 1.0);
            const double x = m.kappa_in() * m.fiber().radius;
            const double y = m.kappa_out_abs() * m.fiber().radius;
            // Five-point stencils with steps scaled to the arguments.
            auto dlog = [](auto fn, double t) {
                const double h = 1e-3 * t;
                return (-std::log(fn(t + 2 * h)) + 8 * std::log(fn(t + h)) - 8 * std::log(fn(t - h)) +
                        std::log(fn(t - 2 * h))) /
                       (12 * h);
            };
            const double dlj = dlog([](double t) { return bm::cyl_bessel_j(1, t); }, x);
            const double dlk = dlog([](double t) { return bm::cyl_bessel_k(1, t); }, y);
            const double expected = (1.0 / (x * x) + 1.0 / (y * y)) / (dlj / x + dlk / y);
            CHECK(eval_u_param(m) == doctest::Approx(expected).epsilon(1e-8));
            CHECK(m.u_param() == doctest::Approx(expected).epsilon(1e-8));
        }
    }

    TEST_CASE("normalization against Simpson quadrature")
    {
        for (double n : {1.45, 1.1}) {
            const GuidedMode m = solve_normalized_mode(fiber(200.0, n), 1.0);
            const double a = m.fiber().radius;
            const double eps = m.fiber().permittivity;
            auto integrand = [&](double r, double e) {
                return r * e * eval_radial_profile(m, r).intensity();
            };
            const double inner = simpson([&](double r) { return integrand(r, eps); }, 0.0, a * (1.0 - 1e-15), 20000);
            const double outer = simpson([&](double r) { return integrand(r, 1.0); }, a * (1.0 + 1e-15),
                                         a + 45.0 / m.kappa_out_abs(), 200000);
            CHECK(inner + outer == doctest::Approx(kNormalizationTarget).epsilon(1e-9));
        }
    }

    TEST_CASE("normalization is idempotent")
    {
        const GuidedMode m = solve_normalized_mode(fiber(200.0, 1.45), 1.0);
        const GuidedMode again = normalize_mode(m);
        CHECK(std::abs(again.norm_const() - m.norm_const()) <= 1e-9 * m.norm_const());
        CHECK(std::abs(normalization_integral(again) - 1.0) < 1e-9);
        const GuidedMode raw = GuidedMode::solve(m.fiber(), 1.0);
        CHECK_FALSE(raw.normalized());
        CHECK_THROWS_AS(raw.norm_const(), Error);
        CHECK_THROWS_AS(eval_radial_profile(raw, 2.0), Error);
    }

    TEST_CASE("boundary conditions at the fiber surface")
    {
        for (double n : {1.45, 1.1, 1.8}) {
            const GuidedMode m = solve_normalized_mode(fiber(200.0, n), 1.0);
            const double a = m.fiber().radius;
            const auto in = eval_radial_profile(m, a * (1.0 - 1e-14));
            const auto out = eval_radial_profile(m, a * (1.0 + 1e-14));
            const double scale = std::abs(out.e_rho);
            CHECK(std::abs(m.fiber().permittivity * in.e_rho - out.e_rho) < 1e-8 * scale);
            CHECK(std::abs(in.e_phi - out.e_phi) < 1e-8 * scale);
            CHECK(std::abs(in.e_z - out.e_z) < 1e-8 * scale);
        }
    }

    TEST_CASE("phase convention: -iE_rho, -E_phi, E_z real with -iE_rho(a+) > 0")
    {
        const GuidedMode m = solve_normalized_mode(fiber(200.0, 1.45), 1.0);
        for (double r : {0.3, 1.0, 1.7, 3.0, 8.0}) {
            const auto p = eval_radial_profile(m, r);
            CHECK(std::abs(p.e_rho.real()) < 1e-15 * std::abs(p.e_rho) + 1e-300);
            CHECK(std::abs(p.e_phi.imag()) < 1e-15 * std::abs(p.e_phi) + 1e-300);
            CHECK(std::abs(p.e_z.imag()) < 1e-15 * std::abs(p.e_z) + 1e-300);
        }
        const auto edge = eval_radial_profile(m, m.fiber().radius * 1.0001);
        CHECK((-kI * edge.e_rho).real() > 0.0);
        CHECK((-edge.e_phi).real() > 0.0);
    }

    TEST_CASE("evanescent tail decays monotonically")
    {
        const GuidedMode m = solve_normalized_mode(fiber(200.0, 1.45), 1.0);
        double prev = eval_radial_profile(m, m.fiber().radius * 1.0001).intensity();
        for (int i = 1; i <= 200; ++i) {
            const double r = m.fiber().radius * (1.0 + 0.05 * i);
            const double cur = eval_radial_profile(m, r).intensity();
            CHECK(cur < prev);
            prev = cur;
        }
        CHECK(eval_radial_profile(m, 5000.0).intensity() >= 0.0);
        CHECK(exterior_cutoff_radius(m) > m.fiber().radius);
    }

    TEST_CASE("weak guidance approaches a circularly polarized paraxial mode")
    {
        double prev_ratio = 1e300;
        for (double n : {1.45, 1.1, 1.05}) {
            const GuidedMode m = solve_normalized_mode(fiber(200.0, n), 1.0);
            const auto p = eval_radial_profile(m, 1.5 * m.fiber().radius);
            const double ratio = (std::abs(p.e_rho + kI * p.e_phi) + std::abs(p.e_z)) / std::abs(p.e_rho - kI * p.e_phi);
            CAPTURE(n);
            CHECK(ratio < prev_ratio);
            prev_ratio = ratio;
        }
        CHECK(prev_ratio < 0.15);
    }

    TEST_CASE("Cartesian field carries the azimuthal and longitudinal phases")
    {
        const GuidedMode m = solve_normalized_mode(fiber(200.0, 1.45), 1.0);
        const CylPoint p{2.0, 0.7, 1.3};
        for (int sigma : {1, -1}) {
            for (Direction dir : {Direction::Forward, Direction::Backward}) {
                const CVec3 e0 = mode_field_cartesian(m, sigma, dir, {p.rho, p.phi, 0.0});
                const CVec3 e1 = mode_field_cartesian(m, sigma, dir, p);
                const cdouble phase = std::exp(kI * static_cast<double>(sign(dir)) * m.wavenumber() * p.z);
                CHECK((e1 - phase * e0).norm() < 1e-14 * e0.norm());
                const double total = eval_radial_profile(m, p.rho).intensity() / (2.0 * kPi);
                CHECK(e1.squaredNorm() == doctest::Approx(total).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("transverse projection is an orthogonal projector")
    {
        const CVec3 v(cdouble(0.3, -1.2), cdouble(2.0, 0.5), cdouble(-0.7, 0.1));
        for (int sigma : {1, -1}) {
            const CVec3 p = project_transverse(v, sigma);
            CHECK((project_transverse(p, sigma) - p).norm() < 1e-15);
            CHECK(std::abs(p.dot(v - p)) < 1e-14);
            CHECK(std::abs(p(2)) == 0.0);
        }
    }
}
