#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <doctest.h>

#include "nfqed/atomic.hpp"
#include "nfqed/error.hpp"
#include "nfqed/greens.hpp"
#include "nfqed/units.hpp"

using namespace nfqed;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_SUITE("atomic")
{
    TEST_CASE("rubidium linewidth in internal units")
    {
        // Gamma/2pi = 6.0666 MHz against nu0 = c / 780 nm = 384.35 THz.
        const double expected = 6.0666e6 / (299792458.0 / 780e-9);
        CHECK(units::gamma_over_omega0(6.0666, 780.0) == doctest::Approx(expected).epsilon(1e-15));
        CHECK(expected == doctest::Approx(1.578e-8).epsilon(1e-3));
    }

    TEST_CASE("d0 calibration round trip against the free-space rate")
    {
        for (double gamma : {1.58e-8, 1e-3, 0.5}) {
            for (double omega0 : {1.0, 0.8}) {
                const double d0_sq = calibrate_d0(gamma, omega0);
                const double rate = -2.0 * d0_sq * vacuum_green_imag_coincident(omega0).trace().imag();
                CHECK(std::abs(rate - gamma) <= 4.0 * std::numeric_limits<double>::epsilon() * gamma);
            }
        }
        CHECK(calibrate_d0(1.0) == 0.25);
        CHECK_THROWS_AS(calibrate_d0(0.0), Error);
        CHECK_THROWS_AS(calibrate_d0(-1.0), Error);
    }

    TEST_CASE("dipole completeness and orthogonality")
    {
        const double d0_sq = 0.37;
        CMat3 sum = CMat3::Zero();
        for (int m = -1; m <= 1; ++m) {
            const CVec3 d = dipole_vector(m, d0_sq);
            sum += d * d.adjoint();
            for (int mp = -1; mp <= 1; ++mp) {
                const cdouble overlap = dipole_vector(mp, d0_sq).adjoint() * d;
                CHECK(std::abs(overlap - (m == mp ? d0_sq : 0.0)) <= 2.0 * kEps * d0_sq);
            }
        }
        CHECK((sum - d0_sq * CMat3::Identity()).norm() <= 4.0 * kEps * d0_sq);
    }

    TEST_CASE("time reversal of the dipole elements")
    {
        // conj(d(m)) = (-1)^m d(-m)
        for (int m = -1; m <= 1; ++m) {
            const double s = (m % 2 == 0) ? 1.0 : -1.0;
            CHECK((dipole_vector(m, 1.0).conjugate() - s * dipole_vector(-m, 1.0)).norm() < 1e-16);
        }
        // m0 = +1 absorbs only the sigma = -1 circular component.
        CHECK(std::abs(cdouble(dipole_vector(1, 1.0).transpose() * circular_vector(1))) < 1e-16);
        CHECK(std::abs(cdouble(dipole_vector(1, 1.0).transpose() * circular_vector(-1)) - 1.0) < 1e-15);
    }

    TEST_CASE("ordered array layout")
    {
        const auto tr = AtomicTransition::calibrated(1e-8);
        const auto arr = build_ordered_array(4, 2.5, 3.0, 0.2, 1.6, tr);
        REQUIRE(arr.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(arr.positions[j].z == doctest::Approx(2.5 * static_cast<double>(j)));
            CHECK(arr.positions[j].rho == 3.0);
            CHECK(arr.positions[j].phi == 0.2);
            CHECK(arr.initial_zeeman[j] == 1);
        }
        CHECK(arr.transition.d0_sq == doctest::Approx(0.25e-8));
        CHECK_THROWS_AS(build_ordered_array(2, 1.0, 1.6, 0.0, 1.6, tr), Error);
        CHECK_THROWS_AS(build_ordered_array(2, 0.0, 3.0, 0.0, 1.6, tr), Error);
        CHECK_THROWS_AS(build_ordered_array(0, 1.0, 3.0, 0.0, 1.6, tr), Error);
    }

    TEST_CASE("disordered arrays: seeded, sorted, inside the segment")
    {
        const auto tr = AtomicTransition::calibrated(1e-8);
        const double d = 2.9;
        const auto a = sample_disordered_array(5, d, 2.4, 0.0, 1.6, tr, 11);
        const auto b = sample_disordered_array(5, d, 2.4, 0.0, 1.6, tr, 11);
        const auto c = sample_disordered_array(5, d, 2.4, 0.0, 1.6, tr, 12);
        bool differs = false;
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(a.positions[i].z == b.positions[i].z);
            CHECK(a.positions[i].z >= 0.0);
            CHECK(a.positions[i].z < 5 * d);
            if (i > 0) {
                CHECK(a.positions[i].z - a.positions[i - 1].z >= DisorderOptions{}.min_separation);
            }
            differs = differs || a.positions[i].z != c.positions[i].z;
        }
        CHECK(differs);
    }

    TEST_CASE("disorder statistics: Monte-Carlo mean gap")
    {
        // For n uniform points on [0, L) the mean gap between sorted neighbours
        // is L / (n + 1).
        const auto tr = AtomicTransition::calibrated(1e-8);
        const int n = 5;
        const double d = 2.9;
        const int draws = 4000;
        double gap_sum = 0.0;
        double first_sum = 0.0;
        for (int s = 0; s < draws; ++s) {
            const auto arr = sample_disordered_array(n, d, 2.4, 0.0, 1.6, tr, static_cast<std::uint64_t>(1000 + s));
            gap_sum += (arr.positions.back().z - arr.positions.front().z) / (n - 1);
            first_sum += arr.positions.front().z;
        }
        const double expected = n * d / (n + 1);
        CHECK(gap_sum / draws == doctest::Approx(expected).epsilon(0.02));
        CHECK(first_sum / draws == doctest::Approx(expected).epsilon(0.05));
    }

    TEST_CASE("impossible separation exhausts the resampler")
    {
        const auto tr = AtomicTransition::calibrated(1e-8);
        DisorderOptions opts;
        opts.min_separation = 10.0;
        opts.max_attempts = 50;
        try {
            sample_disordered_array(5, 1.0, 2.4, 0.0, 1.6, tr, 1, opts);
            FAIL("expected ResampleExhausted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ResampleExhausted);
        }
    }
}
