#include "nfqed/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nfqed/error.hpp"
#include "nfqed/parallel.hpp"
#include "nfqed/units.hpp"

namespace nfqed {

namespace {

double spacing_from(SpacingMode mode, double explicit_nm, double lambda0_nm, double k)
{
    return mode == SpacingMode::HalfGuidedWavelength ? kPi / k : units::length_from_nm(explicit_nm, lambda0_nm);
}

std::string format_ratio(double v)
{
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

LabeledSpectrum labeled(const Scenario& s, int n, double rho_over_a, GreenModel green, unsigned threads)
{
    ModelOptions opts = s.options;
    opts.green = green;
    const AtomArray array = ordered_array(s, n, rho_over_a * s.fiber.radius);
    LabeledSpectrum out;
    out.label = "N" + std::to_string(n) + "_rho" + format_ratio(rho_over_a) + "a_" +
                (green == GreenModel::Full ? "full" : "guided_only");
    out.n_atoms = n;
    out.rho_over_a = rho_over_a;
    out.green = green;
    out.spectrum = compute_spectrum(array, s.mode, s.grid, opts, threads);
    return out;
}

}  // namespace

Scenario make_scenario(const RunConfig& c)
{
    Scenario s;
    s.lambda0_nm = c.atom.lambda0_nm;
    s.fiber = {units::length_from_nm(c.fiber.radius_nm, c.atom.lambda0_nm),
               c.fiber.refractive_index * c.fiber.refractive_index};
    s.mode = solve_normalized_mode(s.fiber, 1.0);
    s.transition = AtomicTransition::calibrated(units::gamma_over_omega0(c.atom.gamma_natural_MHz, c.atom.lambda0_nm));
    s.rho = c.array.rho_over_a * s.fiber.radius;
    s.phi = c.array.phi_deg * kPi / 180.0;
    s.spacing = spacing_from(c.array.spacing_mode, c.array.spacing_nm, c.atom.lambda0_nm, s.mode.wavenumber());
    s.mean_spacing = spacing_from(c.array.disorder.mean_spacing_mode, c.array.disorder.mean_spacing_nm,
                                  c.atom.lambda0_nm, s.mode.wavenumber());
    s.options.green = c.model.green;
    s.options.truncation = c.model.truncation;
    s.options.sigma_at_scan_freq = c.model.sigma_at_scan_freq;
    s.options.shift_delta = c.atom.shift_delta_over_gamma;
    s.options.include_subtraction = c.model.include_subtraction;
    s.grid = detuning_grid(c.scan.delta_min_gamma, c.scan.delta_max_gamma, c.scan.points);
    return s;
}

AtomArray ordered_array(const Scenario& s, int n, double rho)
{
    return build_ordered_array(n, s.spacing, rho, s.phi, s.fiber.radius, s.transition);
}

AtomArray configured_array(const RunConfig& c, const Scenario& s, std::uint64_t seed)
{
    if (c.array.disorder.enabled) {
        return sample_disordered_array(c.array.n_atoms, s.mean_spacing, s.rho, s.phi, s.fiber.radius, s.transition,
                                       seed);
    }
    return ordered_array(s, c.array.n_atoms, s.rho);
}

GaussianFit fit_log_quadratic(const std::vector<double>& rho, const std::vector<double>& intensity)
{
    const auto n = static_cast<Eigen::Index>(rho.size());
    if (n < 3 || intensity.size() != rho.size()) {
        throw Error(ErrorCode::InvalidArgument, "log-quadratic fit needs at least three samples");
    }
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = rho[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = r;
        a(i, 2) = r * r;
        b(i) = std::log(intensity[static_cast<std::size_t>(i)]);
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    const Eigen::VectorXd res = a * c - b;
    GaussianFit fit;
    fit.c0 = c(0);
    fit.c1 = c(1);
    fit.c2 = c(2);
    fit.rms_log_residual = std::sqrt(res.squaredNorm() / static_cast<double>(n));
    fit.samples = static_cast<int>(n);
    return fit;
}

std::vector<ProfileTable> run_fig2(const RunConfig& c)
{
    const double a = units::length_from_nm(c.fiber.radius_nm, c.atom.lambda0_nm);
    const double two_lambda = 4.0 * kPi;
    const double rho_max = c.modes.rho_max_over_a > 0.0 ? c.modes.rho_max_over_a * a : a + two_lambda;
    std::vector<ProfileTable> tables;
    for (double index : c.modes.indices) {
        const FiberSpec fiber{a, index * index};
        const GuidedMode mode = solve_normalized_mode(fiber, 1.0);
        ProfileTable t;
        t.refractive_index = index;
        t.radius = a;
        t.wavenumber = mode.wavenumber();
        t.group_velocity = mode.group_velocity();
        t.u_param = mode.u_param();
        for (int i = 0; i < c.modes.points; ++i) {
            const double rho = rho_max * i / (c.modes.points - 1);
            const auto p = eval_radial_profile(mode, rho);
            t.rows.push_back({rho, (-kI * p.e_rho).real(), -p.e_phi.real(), p.e_z.real(), p.intensity()});
        }
        constexpr int kFitSamples = 401;
        std::vector<double> rs;
        std::vector<double> is;
        for (int i = 0; i < kFitSamples; ++i) {
            const double rho = a + two_lambda * i / (kFitSamples - 1);
            rs.push_back(rho);
            is.push_back(eval_radial_profile(mode, rho).intensity());
        }
        t.exterior_fit = fit_log_quadratic(rs, is);
        tables.push_back(std::move(t));
    }
    return tables;
}

std::vector<DecayRow> run_fig3(const RunConfig& c)
{
    const Scenario s = make_scenario(c);
    const double max = c.decay.rho_minus_a_max_nm > 0.0
                           ? units::length_from_nm(c.decay.rho_minus_a_max_nm, c.atom.lambda0_nm)
                           : 5.0 * kPi;  // 2.5 lambda0
    const double gamma = s.transition.gamma_nat;
    std::vector<DecayRow> rows;
    for (int j = 1; j <= c.decay.points; ++j) {
        const double d = max * j / c.decay.points;
        const auto r = decay_rates(s.mode, s.transition, s.fiber.radius + d);
        rows.push_back({d, units::length_to_nm(d, c.atom.lambda0_nm), r.guided / gamma, r.guided / gamma + 1.0,
                        r.total() / gamma});
    }
    return rows;
}

LabeledSpectrum run_configured_spectrum(const RunConfig& c, unsigned threads)
{
    const Scenario s = make_scenario(c);
    const AtomArray array = configured_array(c, s, c.array.disorder.seed);
    LabeledSpectrum out;
    out.label = "configured";
    out.n_atoms = static_cast<int>(array.size());
    out.rho_over_a = c.array.rho_over_a;
    out.green = s.options.green;
    out.spectrum = compute_spectrum(array, s.mode, s.grid, s.options, threads);
    return out;
}

std::vector<LabeledSpectrum> run_fig4(const RunConfig& c, unsigned threads)
{
    const Scenario s = make_scenario(c);
    std::vector<LabeledSpectrum> out;
    for (double rho_over_a : {1.5, 2.0}) {
        for (GreenModel g : {GreenModel::GuidedOnly, GreenModel::Full}) {
            out.push_back(labeled(s, 1, rho_over_a, g, threads));
        }
    }
    return out;
}

std::vector<LabeledSpectrum> run_fig5(const RunConfig& c, unsigned threads)
{
    const Scenario s = make_scenario(c);
    std::vector<LabeledSpectrum> out;
    for (double rho_over_a : {1.5, 2.0}) {
        out.push_back(labeled(s, c.array.n_atoms, rho_over_a, s.options.green, threads));
    }
    return out;
}

std::vector<double> moving_average5(const std::vector<double>& v)
{
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    std::vector<double> out(v.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - 2);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + 2);
        double sum = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            sum += v[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

int count_local_minima(const std::vector<double>& v)
{
    int count = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] < v[i - 1] && v[i] < v[i + 1]) {
            ++count;
        }
    }
    return count;
}

SpectrumStats spectrum_stats(const SpectrumResult& s)
{
    SpectrumStats st;
    std::vector<double> t;
    t.reserve(s.points.size());
    for (const auto& p : s.points) {
        st.peak_R = std::max(st.peak_R, p.R);
        st.peak_L = std::max(st.peak_L, p.L);
        if (p.T < st.min_T) {
            st.min_T = p.T;
            st.argmin_T = p.delta_over_gamma;
        }
        t.push_back(p.T);
    }
    st.t_local_minima = count_local_minima(moving_average5(t));
    return st;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty()) {
        throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
    }
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

EnsembleSummary summarize_ensemble(const std::vector<RealizationRow>& rows, double ordered_peak_R,
                                   double ordered_peak_L)
{
    EnsembleSummary s;
    s.n_realizations = static_cast<int>(rows.size());
    s.rows = rows;
    s.ordered_peak_R = ordered_peak_R;
    s.ordered_peak_L = ordered_peak_L;
    std::vector<double> peaks;
    for (const auto& r : rows) {
        s.seeds.push_back(r.seed);
        peaks.push_back(r.stats.peak_R);
        s.multi_minimum_count += r.stats.t_local_minima >= 2 ? 1 : 0;
    }
    if (!rows.empty()) {
        s.median_peak_R = quantile(peaks, 0.5);
        s.median_peak_R_ratio = s.median_peak_R / ordered_peak_R;
        s.q25_peak_R_ratio = quantile(peaks, 0.25) / ordered_peak_R;
        s.q75_peak_R_ratio = quantile(peaks, 0.75) / ordered_peak_R;
        s.multi_minimum_fraction = static_cast<double>(s.multi_minimum_count) / static_cast<double>(rows.size());
    }
    return s;
}

EnsembleResult run_fig6_ensemble(const RunConfig& c, int n_realizations, std::uint64_t base_seed, unsigned threads)
{
    if (n_realizations < 1) {
        throw Error(ErrorCode::InvalidArgument, "ensemble needs at least one realization");
    }
    const Scenario s = make_scenario(c);
    EnsembleResult result;
    result.ordered = compute_spectrum(ordered_array(s, c.array.n_atoms, s.rho), s.mode, s.grid, s.options, threads);
    const SpectrumStats ordered = spectrum_stats(result.ordered);

    const auto n = static_cast<std::size_t>(n_realizations);
    std::vector<RealizationRow> rows(n);
    result.spectra.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const std::uint64_t seed = base_seed + i;
        const AtomArray array =
            sample_disordered_array(c.array.n_atoms, s.mean_spacing, s.rho, s.phi, s.fiber.radius, s.transition, seed);
        result.spectra[i] = compute_spectrum(array, s.mode, s.grid, s.options, 1);
        rows[i].seed = seed;
        for (const auto& p : array.positions) {
            rows[i].z.push_back(p.z);
        }
        rows[i].stats = spectrum_stats(result.spectra[i]);
    });
    result.summary = summarize_ensemble(rows, ordered.peak_R, ordered.peak_L);
    return result;
}

nlohmann::json to_json(const EnsembleSummary& s)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"seed", r.seed},
                        {"z", r.z},
                        {"peak_R", r.stats.peak_R},
                        {"peak_L", r.stats.peak_L},
                        {"min_T", r.stats.min_T},
                        {"argmin_T_delta_over_gamma", r.stats.argmin_T},
                        {"t_local_minima", r.stats.t_local_minima}});
    }
    return {{"n_realizations", s.n_realizations},
            {"seeds", s.seeds},
            {"ordered_peak_R", s.ordered_peak_R},
            {"ordered_peak_L", s.ordered_peak_L},
            {"median_peak_R", s.median_peak_R},
            {"median_peak_R_ratio", s.median_peak_R_ratio},
            {"q25_peak_R_ratio", s.q25_peak_R_ratio},
            {"q75_peak_R_ratio", s.q75_peak_R_ratio},
            {"multi_minimum_count", s.multi_minimum_count},
            {"multi_minimum_fraction", s.multi_minimum_fraction},
            {"realizations", rows}};
}

}  // namespace nfqed
