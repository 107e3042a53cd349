#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "nfqed/atomic.hpp"
#include "nfqed/error.hpp"
#include "nfqed/spectral.hpp"
#include "nfqed/units.hpp"

using namespace nfqed;

namespace {

struct Setup {
    GuidedMode mode;
    AtomicTransition tr;
    double a;
    double d;  // half guided wavelength
};

Setup setup()
{
    const FiberSpec f{units::length_from_nm(200.0, 780.0), 1.45 * 1.45};
    Setup s{solve_normalized_mode(f, 1.0), AtomicTransition::calibrated(units::gamma_over_omega0(6.0666, 780.0)),
            f.radius, 0.0};
    s.d = kPi / s.mode.wavenumber();
    return s;
}

double binom(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

}  // namespace

TEST_SUITE("spectral")
{
    TEST_CASE("basis dimensions")
    {
        CHECK(ExcitationBasis(1, Truncation::full()).size() == 1);
        CHECK(ExcitationBasis(3, Truncation::full()).size() == 27);
        CHECK(ExcitationBasis(3, Truncation::max_spin_flips(1)).size() == 15);
        CHECK(ExcitationBasis(5, Truncation::full()).size() == 405);
        CHECK(ExcitationBasis(5, Truncation::max_spin_flips(0)).size() == 5);
        for (int n = 1; n <= 6; ++n) {
            for (int s = 0; s < n; ++s) {
                double expected = 0.0;
                for (int k = 0; k <= s; ++k) {
                    expected += binom(n - 1, k) * std::pow(2.0, k);
                }
                expected *= n;
                CHECK(ExcitationBasis(n, Truncation::max_spin_flips(s)).size() == static_cast<std::size_t>(expected));
                CHECK(ExcitationBasis::dimension(n, Truncation::max_spin_flips(s)) == static_cast<std::size_t>(expected));
            }
            CHECK(ExcitationBasis::dimension(n, Truncation::full()) ==
                  static_cast<std::size_t>(n * std::pow(3.0, n - 1)));
        }
        try {
            ExcitationBasis(12, Truncation::full());
            FAIL("expected DimensionOverflow");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DimensionOverflow);
        }
    }

    TEST_CASE("basis ordering and lookup")
    {
        const ExcitationBasis b(3, Truncation::full());
        CHECK(b.state(0).excited == 0);
        CHECK(b.state(0).config == std::vector<int>{0, 1, 1});
        CHECK(b.state(1).config == std::vector<int>{0, 1, 0});
        CHECK(b.state(9).excited == 1);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const auto& s = b.state(i);
            CHECK(b.index_of(s.excited, s.config) == i);
            if (i > 0) {
                CHECK(b.state(i - 1).excited <= s.excited);
            }
        }
        const ExcitationBasis t(3, Truncation::max_spin_flips(1));
        CHECK_FALSE(t.index_of(0, {0, 0, -1}).has_value());
        CHECK(t.index_of(0, {0, 0, 1}).has_value());
    }

    TEST_CASE("single atom against the hand-composed closed form")
    {
        const Setup s = setup();
        const CylPoint r{1.5 * s.a, 0.0, 0.0};
        const auto arr = build_ordered_array(1, s.d, r.rho, 0.0, s.a, s.tr);
        const auto grid = detuning_grid(-10.0, 10.0, 401);
        const auto spec = compute_spectrum(arr, s.mode, grid, ModelOptions{});

        const double gamma_r = decay_rates(s.mode, s.tr, r.rho).total();
        const cdouble sigma = -0.5 * kI * gamma_r;
        const double pref = 2.0 * kPi * s.mode.frequency() / s.mode.group_velocity();
        const cdouble absorb = dipole_vector(1, s.tr.d0_sq).transpose() * mode_field_cartesian(s.mode, -1, Direction::Forward, r);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double e = grid[i] * s.tr.gamma_nat;
            double t_sum = 0.0;
            double r_sum = 0.0;
            double raman = 0.0;
            for (int mp = -1; mp <= 1; ++mp) {
                for (int sig : {1, -1}) {
                    for (Direction dir : {Direction::Forward, Direction::Backward}) {
                        const cdouble emit = dipole_vector(mp, s.tr.d0_sq).transpose() * mode_field_cartesian(s.mode, sig, dir, r);
                        cdouble amp = -kI * pref * std::conj(emit) * absorb / (e - sigma);
                        if (mp == 1 && sig == -1 && dir == Direction::Forward) {
                            amp += 1.0;
                        }
                        (dir == Direction::Forward ? t_sum : r_sum) += std::norm(amp);
                        if (mp != 1) {
                            raman += std::norm(amp);
                        }
                    }
                }
            }
            const auto& p = spec.points[i];
            worst = std::max({worst, std::abs(p.T - t_sum), std::abs(p.R - r_sum),
                              std::abs(p.T_raman + p.R_raman - raman)});
        }
        CHECK(worst < 1e-10);
    }

    TEST_CASE("two atoms against an explicit 6x6 inversion")
    {
        const Setup s = setup();
        const std::vector<CylPoint> pos{{1.5 * s.a, 0.0, 0.0}, {1.5 * s.a, 0.0, 0.77 * s.d}};
        AtomArray arr = build_ordered_array(2, 0.77 * s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        const std::vector<int> ms{1, 0, -1};

        // State (x, m): atom x excited, the other atom in m.
        auto idx = [](int x, int mi) { return 3 * x + mi; };
        Eigen::MatrixXcd sig = Eigen::MatrixXcd::Zero(6, 6);
        for (int x = 0; x < 2; ++x) {
            const cdouble self = -0.5 * kI * decay_rates(s.mode, s.tr, pos[static_cast<std::size_t>(x)].rho).total();
            for (int mi = 0; mi < 3; ++mi) {
                sig(idx(x, mi), idx(x, mi)) = self;
            }
            const int y = 1 - x;
            // <e_x, m_y| Sigma |e_y, m_x> = d(m_x) . D(r_x, r_y) . conj(d(m_y))
            const CMat3 g = total_green(s.mode, pos[static_cast<std::size_t>(x)], pos[static_cast<std::size_t>(y)], 1.0);
            for (int my = 0; my < 3; ++my) {
                for (int mx = 0; mx < 3; ++mx) {
                    sig(idx(x, my), idx(y, mx)) = cdouble(dipole_vector(ms[mx], s.tr.d0_sq).transpose() * g *
                                                          dipole_vector(ms[my], s.tr.d0_sq).conjugate());
                }
            }
        }
        auto vertex = [&](int atom, int m, int sg, Direction dir) {
            return cdouble(dipole_vector(m, s.tr.d0_sq).transpose() *
                           mode_field_cartesian(s.mode, sg, dir, pos[static_cast<std::size_t>(atom)]));
        };
        Eigen::VectorXcd src = Eigen::VectorXcd::Zero(6);
        src(idx(0, 0)) = vertex(0, 1, -1, Direction::Forward);
        src(idx(1, 0)) = vertex(1, 1, -1, Direction::Forward);

        const auto grid = detuning_grid(-8.0, 8.0, 41);
        const auto spec = compute_spectrum(arr, s.mode, grid, ModelOptions{});
        const double pref = 2.0 * kPi / s.mode.group_velocity();
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double e = grid[i] * s.tr.gamma_nat;
            const Eigen::MatrixXcd lhs = e * Eigen::MatrixXcd::Identity(6, 6) - sig;
            const Eigen::VectorXcd x = lhs.fullPivLu().solve(src);
            // Final configuration (m_0, m_1) collects emission from both atoms.
            std::map<std::tuple<int, int, int, int>, cdouble> amp;
            for (int atom = 0; atom < 2; ++atom) {
                for (int mi = 0; mi < 3; ++mi) {
                    for (int emitted = 0; emitted < 3; ++emitted) {
                        const int m0 = atom == 0 ? ms[emitted] : ms[mi];
                        const int m1 = atom == 1 ? ms[emitted] : ms[mi];
                        for (int sg : {1, -1}) {
                            for (Direction dir : {Direction::Forward, Direction::Backward}) {
                                amp[{m0, m1, sg, sign(dir)}] +=
                                    -kI * pref * std::conj(vertex(atom, ms[emitted], sg, dir)) * x(idx(atom, mi));
                            }
                        }
                    }
                }
            }
            amp[{1, 1, -1, 1}] += 1.0;
            double t = 0.0;
            double r = 0.0;
            double raman = 0.0;
            double cross = 0.0;
            for (const auto& [key, v] : amp) {
                const auto [m0, m1, sg, dir] = key;
                (dir == 1 ? t : r) += std::norm(v);
                const bool rayleigh = m0 == 1 && m1 == 1;
                raman += rayleigh ? 0.0 : std::norm(v);
                cross += rayleigh && sg == 1 ? std::norm(v) : 0.0;
            }
            const auto& p = spec.points[i];
            worst = std::max({worst, std::abs(p.T - t), std::abs(p.R - r), std::abs(p.T_raman + p.R_raman - raman),
                              std::abs(p.T_rayleigh_cross + p.R_rayleigh_cross - cross)});
        }
        CHECK(worst < 1e-10);
    }

    TEST_CASE("lossless guided-only model conserves probability")
    {
        const Setup s = setup();
        ModelOptions opts;
        opts.green = GreenModel::GuidedOnly;
        for (int n = 1; n <= 3; ++n) {
            const auto arr = build_ordered_array(n, s.d * 1.03, 1.5 * s.a, 0.0, s.a, s.tr);
            const auto spec = compute_spectrum(arr, s.mode, detuning_grid(-10.0, 10.0, 81), opts);
            for (const auto& p : spec.points) {
                CHECK(std::abs(p.L) < 1e-9);
            }
        }
    }

    TEST_CASE("full model is passive: 0 <= T, R and L >= 0")
    {
        const Setup s = setup();
        const auto arr = build_ordered_array(3, s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        const auto spec = compute_spectrum(arr, s.mode, detuning_grid(-10.0, 10.0, 81), ModelOptions{});
        for (const auto& p : spec.points) {
            CHECK(p.T >= 0.0);
            CHECK(p.R >= 0.0);
            CHECK(p.L >= -1e-12);
            CHECK(p.T_rayleigh_same + p.T_rayleigh_cross + p.T_raman == doctest::Approx(p.T).epsilon(1e-12));
            CHECK(p.R_rayleigh_same + p.R_rayleigh_cross + p.R_raman == doctest::Approx(p.R).epsilon(1e-12));
        }
    }

    TEST_CASE("guided-only self-energy has a negative semidefinite anti-Hermitian part")
    {
        const Setup s = setup();
        ModelOptions opts;
        opts.green = GreenModel::GuidedOnly;
        for (int n : {2, 3, 4}) {
            const auto arr = sample_disordered_array(n, s.d, 1.5 * s.a, 0.0, s.a, s.tr, 5);
            const ExcitationBasis b(n, Truncation::full(), arr.initial_zeeman);
            const Eigen::MatrixXcd sig = assemble_self_energy(b, arr, s.mode, opts);
            const Eigen::MatrixXcd anti = (sig - sig.adjoint()) / cdouble(0.0, 2.0);
            const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(anti).eigenvalues();
            CHECK(ev.maxCoeff() < 1e-12 * s.tr.gamma_nat);
        }
    }

    TEST_CASE("time-reversed exchange identity of the self-energy")
    {
        // Sigma[(a; b in m_b), (b; a in m_a)] = (-1)^(m_a + m_b) Sigma[(b; a in -m_a), (a; b in -m_b)]
        const Setup s = setup();
        const auto arr = sample_disordered_array(3, s.d, 1.5 * s.a, 0.0, s.a, s.tr, 9);
        const ExcitationBasis b(3, Truncation::full(), arr.initial_zeeman);
        const Eigen::MatrixXcd sig = assemble_self_energy(b, arr, s.mode, ModelOptions{});
        double worst = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            for (std::size_t j = 0; j < b.size(); ++j) {
                const auto& si = b.state(i);
                const auto& sj = b.state(j);
                if (si.excited == sj.excited) {
                    continue;
                }
                std::vector<int> ci = si.config;
                std::vector<int> cj = sj.config;
                const auto ea = static_cast<std::size_t>(si.excited);
                const auto eb = static_cast<std::size_t>(sj.excited);
                const int ma = cj[ea];
                const int mb = ci[eb];
                ci[eb] = -mb;
                cj[ea] = -ma;
                const auto ti = b.index_of(si.excited, ci);
                const auto tj = b.index_of(sj.excited, cj);
                REQUIRE(ti.has_value());
                REQUIRE(tj.has_value());
                const double sgn = ((ma + mb) % 2 == 0) ? 1.0 : -1.0;
                const cdouble lhs = sig(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const cdouble rhs = sgn * sig(static_cast<Eigen::Index>(*tj), static_cast<Eigen::Index>(*ti));
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        CHECK(worst < 1e-12 * sig.cwiseAbs().maxCoeff());
    }

    TEST_CASE("self-energy couples only states differing on the two active atoms")
    {
        const Setup s = setup();
        const auto arr = build_ordered_array(3, s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        const ExcitationBasis b(3, Truncation::full());
        const Eigen::MatrixXcd sig = assemble_self_energy(b, arr, s.mode, ModelOptions{});
        const cdouble diag = single_atom_self_energy(s.mode, s.tr, arr.positions[0], 0.0);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(std::abs(sig(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - diag) < 1e-15 * std::abs(diag));
            for (std::size_t j = 0; j < b.size(); ++j) {
                const auto& si = b.state(i);
                const auto& sj = b.state(j);
                for (int k = 0; k < 3; ++k) {
                    if (k != si.excited && k != sj.excited && si.config[static_cast<std::size_t>(k)] != sj.config[static_cast<std::size_t>(k)]) {
                        CHECK(sig(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == cdouble(0.0));
                    }
                }
            }
        }
    }

    TEST_CASE("common shift displaces the single-atom line")
    {
        const Setup s = setup();
        const auto arr = build_ordered_array(1, s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        ModelOptions shifted;
        shifted.shift_delta = 2.0;
        const auto grid = detuning_grid(-10.0, 10.0, 401);
        const auto base = compute_spectrum(arr, s.mode, grid, ModelOptions{});
        const auto moved = compute_spectrum(arr, s.mode, grid, shifted);
        for (std::size_t i = 40; i + 40 < grid.size(); ++i) {
            CHECK(moved.points[i + 40].T == doctest::Approx(base.points[i].T).epsilon(1e-9));
        }
    }

    TEST_CASE("scan-frequency self-energy barely moves the spectrum")
    {
        const Setup s = setup();
        const auto arr = build_ordered_array(2, s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        ModelOptions scan;
        scan.sigma_at_scan_freq = true;
        const auto grid = detuning_grid(-5.0, 5.0, 11);
        const auto base = compute_spectrum(arr, s.mode, grid, ModelOptions{});
        const auto alt = compute_spectrum(arr, s.mode, grid, scan);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(alt.points[i].T - base.points[i].T) < 1e-5);
        }
    }

    TEST_CASE("spectrum is independent of the worker count")
    {
        const Setup s = setup();
        const auto arr = build_ordered_array(3, s.d, 1.5 * s.a, 0.0, s.a, s.tr);
        const auto grid = detuning_grid(-10.0, 10.0, 31);
        const auto one = compute_spectrum(arr, s.mode, grid, ModelOptions{}, 1);
        const auto four = compute_spectrum(arr, s.mode, grid, ModelOptions{}, 4);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(one.points[i].T == four.points[i].T);
            CHECK(one.points[i].R == four.points[i].R);
        }
    }

    TEST_CASE("detuning grid endpoints")
    {
        const auto g = detuning_grid(-10.0, 10.0, 401);
        CHECK(g.size() == 401);
        CHECK(g.front() == -10.0);
        CHECK(g.back() == 10.0);
        CHECK(g[200] == 0.0);
        CHECK_THROWS_AS(detuning_grid(0.0, 1.0, 0), Error);
    }
}
