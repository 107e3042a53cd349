#pragma once

// Figure pipelines built on the library modules. Every function here is a
// deterministic function of its RunConfig (and seed).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfqed/config.hpp"
#include "nfqed/spectral.hpp"

namespace nfqed {

// RunConfig converted to internal units with the mode solved at omega0 = 1.
struct Scenario {
    double lambda0_nm = 0.0;
    FiberSpec fiber;
    GuidedMode mode;
    AtomicTransition transition;
    double rho = 0.0;
    double phi = 0.0;
    double spacing = 0.0;
    double mean_spacing = 0.0;
    ModelOptions options;
    std::vector<double> grid;  // detunings, units of gamma
};

Scenario make_scenario(const RunConfig& config);

// Ordered line of n atoms at the scenario spacing and the given radius.
AtomArray ordered_array(const Scenario& s, int n, double rho);

// The array described by the config: ordered, or disordered with `seed`.
AtomArray configured_array(const RunConfig& config, const Scenario& s, std::uint64_t seed);

struct ProfileSample {
    double rho;  // internal units
    double minus_i_e_rho;
    double minus_e_phi;
    double e_z;
    double intensity;  // |E_rho|^2 + |E_phi|^2 + |E_z|^2
};

// ln I(rho) ~ c0 + c1 rho + c2 rho^2 by unweighted least squares.
struct GaussianFit {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double rms_log_residual = 0.0;
    int samples = 0;
};

GaussianFit fit_log_quadratic(const std::vector<double>& rho, const std::vector<double>& intensity);

struct ProfileTable {
    double refractive_index = 0.0;
    double radius = 0.0;
    double wavenumber = 0.0;
    double group_velocity = 0.0;
    double u_param = 0.0;
    std::vector<ProfileSample> rows;
    GaussianFit exterior_fit;  // over rho in [a, a + 2 lambda0]
};

// Profiles for every index in config.modes.indices on a uniform rho grid.
std::vector<ProfileTable> run_fig2(const RunConfig& config);

struct DecayRow {
    double rho_minus_a;  // internal units
    double rho_minus_a_nm;
    double gamma_wg;        // / gamma
    double naive_sum;       // gamma_wg + gamma, / gamma
    double gamma_estimate;  // guided + external estimate, / gamma
};

std::vector<DecayRow> run_fig3(const RunConfig& config);

struct LabeledSpectrum {
    std::string label;
    int n_atoms = 0;
    double rho_over_a = 0.0;
    GreenModel green = GreenModel::Full;
    SpectrumResult spectrum;
};

// The configured array alone.
LabeledSpectrum run_configured_spectrum(const RunConfig& config, unsigned threads);
// One atom at rho - a = 0.5a and a, guided-only and full.
std::vector<LabeledSpectrum> run_fig4(const RunConfig& config, unsigned threads);
// config.array.n_atoms ordered atoms at rho - a = 0.5a and a.
std::vector<LabeledSpectrum> run_fig5(const RunConfig& config, unsigned threads);

struct SpectrumStats {
    double peak_R = 0.0;
    double peak_L = 0.0;
    double min_T = 1.0;
    double argmin_T = 0.0;  // detuning / gamma
    int t_local_minima = 0;
};

// Five-point centered moving average, window truncated at the ends.
std::vector<double> moving_average5(const std::vector<double>& v);
// Interior points strictly below both neighbours.
int count_local_minima(const std::vector<double>& v);
SpectrumStats spectrum_stats(const SpectrumResult& s);

struct RealizationRow {
    std::uint64_t seed = 0;
    std::vector<double> z;  // internal units
    SpectrumStats stats;
};

struct EnsembleSummary {
    int n_realizations = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<RealizationRow> rows;
    double ordered_peak_R = 0.0;
    double ordered_peak_L = 0.0;
    double median_peak_R = 0.0;
    double median_peak_R_ratio = 0.0;  // median disordered / ordered
    double q25_peak_R_ratio = 0.0;
    double q75_peak_R_ratio = 0.0;
    int multi_minimum_count = 0;  // realizations with >= 2 smoothed T minima
    double multi_minimum_fraction = 0.0;
};

// Aggregates from rows and the ordered reference; used both when running and
// when re-deriving a stored summary.
EnsembleSummary summarize_ensemble(const std::vector<RealizationRow>& rows, double ordered_peak_R,
                                   double ordered_peak_L);

// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> v, double q);

struct EnsembleResult {
    EnsembleSummary summary;
    SpectrumResult ordered;
    std::vector<SpectrumResult> spectra;
};

// Realization i uses seed base_seed + i; the ordered reference shares the
// model options and geometry.
EnsembleResult run_fig6_ensemble(const RunConfig& config, int n_realizations, std::uint64_t base_seed,
                                 unsigned threads);

nlohmann::json to_json(const EnsembleSummary& summary);

}  // namespace nfqed
