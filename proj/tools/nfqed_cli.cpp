// nfqed: command-line driver for the nanofiber scattering pipelines.
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure,
// 4 selftest failure. Failures print one line
//   error code=<ErrorCode> message="<text>"
// on stderr.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfqed/config.hpp"
#include "nfqed/error.hpp"
#include "nfqed/experiments.hpp"
#include "nfqed/output.hpp"
#include "nfqed/parallel.hpp"
#include "nfqed/selftest.hpp"
#include "nfqed/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nfqed;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitSelftest = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    std::optional<unsigned> threads;
};

struct Context {
    RunConfig config;
    std::string hash;
    fs::path out;
    unsigned threads = 1;
};

Context make_context(const CommonOptions& o)
{
    Context ctx;
    ctx.config = o.config_path.empty() ? parse_config_text("{}") : parse_config(o.config_path);
    if (!o.out_dir.empty()) {
        ctx.config.output.dir = o.out_dir;
    }
    if (o.seed) {
        ctx.config.array.disorder.seed = *o.seed;
    }
    if (o.realizations) {
        ctx.config.ensemble.realizations = *o.realizations;
    }
    validate(ctx.config);
    ctx.hash = config_hash(ctx.config);
    ctx.out = ctx.config.output.dir;
    ctx.threads = resolve_thread_count(o.threads);
    fs::create_directories(ctx.out);
    return ctx;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    }
    f << text;
}

json derived_quantities(const RunConfig& c)
{
    const Scenario s = make_scenario(c);
    const double per_m = 2.0 * kPi / (c.atom.lambda0_nm * 1e-9);
    return {{"radius_internal", s.fiber.radius},
            {"wavenumber_internal", s.mode.wavenumber()},
            {"wavenumber_rad_per_m", s.mode.wavenumber() * per_m},
            {"group_velocity_over_c", s.mode.group_velocity()},
            {"u_param", s.mode.u_param()},
            {"norm_const", s.mode.norm_const()},
            {"gamma_over_omega0", s.transition.gamma_nat},
            {"d0_sq_internal", s.transition.d0_sq},
            {"spacing_nm", units::length_to_nm(s.spacing, c.atom.lambda0_nm)},
            {"mean_spacing_nm", units::length_to_nm(s.mean_spacing, c.atom.lambda0_nm)}};
}

void write_meta(const Context& ctx, const std::string& command, const json& outputs, const json& extra = json::object())
{
    if (!ctx.config.output.wants("json")) {
        return;
    }
    json meta = {{"tool", "nfqed"},
                 {"version", kVersion},
                 {"command", command},
                 {"config", to_json(ctx.config)},
                 {"config_hash", ctx.hash},
                 {"threads", ctx.threads},
                 {"derived", derived_quantities(ctx.config)},
                 {"outputs", outputs}};
    for (const auto& [k, v] : extra.items()) {
        meta[k] = v;
    }
    write_file(ctx.out / "run_meta.json", meta.dump(2) + "\n");
}

json stats_json(const SpectrumStats& s)
{
    return {{"peak_R", s.peak_R},
            {"peak_L", s.peak_L},
            {"min_T", s.min_T},
            {"argmin_T_delta_over_gamma", s.argmin_T},
            {"t_local_minima", s.t_local_minima}};
}

int cmd_modes(const CommonOptions& o)
{
    const Context ctx = make_context(o);
    const auto tables = run_fig2(ctx.config);
    json outputs = json::array();
    if (ctx.config.output.wants("csv")) {
        Table t;
        t.columns = {"refractive_index", "rho_over_a", "rho_nm", "minus_i_e_rho", "minus_e_phi", "e_z", "intensity"};
        for (const auto& tab : tables) {
            for (const auto& r : tab.rows) {
                t.rows.push_back({tab.refractive_index, r.rho / tab.radius,
                                  units::length_to_nm(r.rho, ctx.config.atom.lambda0_nm), r.minus_i_e_rho,
                                  r.minus_e_phi, r.e_z, r.intensity});
            }
        }
        write_file(ctx.out / "profiles.csv", table_to_csv(t));
        outputs.push_back("profiles.csv");
    }
    if (ctx.config.output.wants("svg")) {
        std::vector<Plot> panels;
        for (const auto& tab : tables) {
            Series er{"-iE_rho", {}, {}, "#1f77b4", true};
            Series ep{"-E_phi", {}, {}, "#2ca02c", false};
            Series ez{"E_z", {}, {}, "#d62728", false};
            for (const auto& r : tab.rows) {
                for (Series* s : {&er, &ep, &ez}) {
                    s->x.push_back(r.rho / tab.radius);
                }
                er.y.push_back(r.minus_i_e_rho);
                ep.y.push_back(r.minus_e_phi);
                ez.y.push_back(r.e_z);
            }
            panels.push_back({"HE11 profile, n = " + format_number(tab.refractive_index), "rho / a", "field",
                              {er, ep, ez}});
        }
        write_file(ctx.out / "modes.svg", render_svg(panels, ctx.hash));
        outputs.push_back("modes.svg");
    }
    json fits = json::array();
    for (const auto& tab : tables) {
        fits.push_back({{"refractive_index", tab.refractive_index},
                        {"wavenumber_internal", tab.wavenumber},
                        {"group_velocity_over_c", tab.group_velocity},
                        {"u_param", tab.u_param},
                        {"exterior_log_quadratic_fit",
                         {{"c0", tab.exterior_fit.c0},
                          {"c1", tab.exterior_fit.c1},
                          {"c2", tab.exterior_fit.c2},
                          {"rms_log_residual", tab.exterior_fit.rms_log_residual},
                          {"samples", tab.exterior_fit.samples}}}});
    }
    write_meta(ctx, "modes", outputs, {{"profiles", fits}});
    return 0;
}

int cmd_decay(const CommonOptions& o)
{
    const Context ctx = make_context(o);
    const auto rows = run_fig3(ctx.config);
    const double a_nm = ctx.config.fiber.radius_nm;
    json outputs = json::array();
    if (ctx.config.output.wants("csv")) {
        Table t;
        t.columns = {"rho_minus_a_nm", "rho_minus_a_over_a", "gamma_wg_over_gamma", "naive_sum_over_gamma",
                     "gamma_estimate_over_gamma"};
        for (const auto& r : rows) {
            t.rows.push_back({r.rho_minus_a_nm, r.rho_minus_a_nm / a_nm, r.gamma_wg, r.naive_sum, r.gamma_estimate});
        }
        write_file(ctx.out / "decay.csv", table_to_csv(t));
        outputs.push_back("decay.csv");
    }
    if (ctx.config.output.wants("svg")) {
        Series wg{"gamma_wg", {}, {}, "#1f77b4", true};
        Series naive{"gamma_wg + gamma", {}, {}, "#2ca02c", true};
        Series est{"gamma estimate", {}, {}, "#d62728", false};
        for (const auto& r : rows) {
            for (Series* s : {&wg, &naive, &est}) {
                s->x.push_back(r.rho_minus_a_nm / a_nm);
            }
            wg.y.push_back(r.gamma_wg);
            naive.y.push_back(r.naive_sum);
            est.y.push_back(r.gamma_estimate);
        }
        write_file(ctx.out / "decay.svg",
                   render_svg({{"Decay rate near the fiber", "(rho - a) / a", "rate / gamma", {wg, naive, est}}}, ctx.hash));
        outputs.push_back("decay.svg");
    }
    write_meta(ctx, "decay", outputs);
    return 0;
}

int cmd_spectrum(const CommonOptions& o)
{
    const Context ctx = make_context(o);
    std::vector<LabeledSpectrum> spectra{run_configured_spectrum(ctx.config, ctx.threads)};
    if (ctx.config.figure == Figure::Fig4) {
        for (auto& s : run_fig4(ctx.config, ctx.threads)) {
            spectra.push_back(std::move(s));
        }
    } else if (ctx.config.figure == Figure::Fig5) {
        for (auto& s : run_fig5(ctx.config, ctx.threads)) {
            spectra.push_back(std::move(s));
        }
    }
    json outputs = json::array();
    json stats = json::object();
    std::vector<Plot> panels;
    for (std::size_t i = 0; i < spectra.size(); ++i) {
        const auto& s = spectra[i];
        const std::string name = i == 0 ? "spectrum" : "spectrum_" + s.label;
        if (ctx.config.output.wants("csv")) {
            write_file(ctx.out / (name + ".csv"), table_to_csv(spectrum_table(s.spectrum)));
            outputs.push_back(name + ".csv");
        }
        stats[s.label] = stats_json(spectrum_stats(s.spectrum));
        panels.push_back(spectrum_plot(s.label, s.spectrum));
    }
    if (ctx.config.output.wants("svg")) {
        write_file(ctx.out / "spectrum.svg", render_svg(panels, ctx.hash));
        outputs.push_back("spectrum.svg");
    }
    write_meta(ctx, "spectrum", outputs, {{"spectrum_stats", stats}});
    return 0;
}

int cmd_ensemble(const CommonOptions& o)
{
    Context ctx = make_context(o);
    if (!ctx.config.array.disorder.enabled) {
        ctx.config.array.disorder.enabled = true;
        ctx.hash = config_hash(ctx.config);
    }
    const auto result = run_fig6_ensemble(ctx.config, ctx.config.ensemble.realizations,
                                          ctx.config.array.disorder.seed, ctx.threads);
    json outputs = json::array();
    if (ctx.config.output.wants("csv")) {
        write_file(ctx.out / "ordered.csv", table_to_csv(spectrum_table(result.ordered)));
        outputs.push_back("ordered.csv");
        for (std::size_t i = 0; i < result.spectra.size(); ++i) {
            const std::string name = "realization_" + std::to_string(result.summary.seeds[i]) + ".csv";
            write_file(ctx.out / name, table_to_csv(spectrum_table(result.spectra[i])));
            outputs.push_back(name);
        }
    }
    json summary = to_json(result.summary);
    summary["config_hash"] = ctx.hash;
    write_file(ctx.out / "summary.json", summary.dump(2) + "\n");
    outputs.push_back("summary.json");
    if (ctx.config.output.wants("svg")) {
        std::vector<Plot> panels{spectrum_plot("ordered", result.ordered)};
        panels.push_back(spectrum_plot("disordered, seed " + std::to_string(result.summary.seeds.front()),
                                       result.spectra.front()));
        write_file(ctx.out / "ensemble.svg", render_svg(panels, ctx.hash));
        outputs.push_back("ensemble.svg");
    }
    write_meta(ctx, "ensemble", outputs);
    return 0;
}

int cmd_selftest(const CommonOptions& o)
{
    const auto results = run_selftest(resolve_thread_count(o.threads));
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.group << ": " << r.detail << "\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitSelftest;
}

int report(const Error& e)
{
    json msg = e.what();
    std::cerr << "error code=" << to_string(e.code()) << " message=" << msg.dump() << "\n";
    switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::DimensionOverflow: return kExitConfig;
    default: return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-photon scattering by atoms near an optical nanofiber"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--threads", opts.threads, "worker threads (fallback: $NANOFIBER_QED_THREADS)");
    };
    auto* modes = app.add_subcommand("modes", "guided-mode profiles and exterior Gaussian fit");
    auto* decay = app.add_subcommand("decay", "position-dependent decay rates");
    auto* spectrum = app.add_subcommand("spectrum", "T/R/L spectrum of the configured array");
    auto* ensemble = app.add_subcommand("ensemble", "disordered-array ensemble statistics");
    auto* selftest = app.add_subcommand("selftest", "run the invariant checks");
    for (auto* sub : {modes, decay, spectrum, ensemble}) {
        add_common(sub);
    }
    selftest->add_option("--threads", opts.threads, "worker threads");
    for (auto* sub : {spectrum, ensemble}) {
        sub->add_option("--seed", opts.seed, "disorder seed (overrides array.disorder.seed)");
    }
    ensemble->add_option("--realizations", opts.realizations, "number of realizations")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*modes) {
            return cmd_modes(opts);
        }
        if (*decay) {
            return cmd_decay(opts);
        }
        if (*spectrum) {
            return cmd_spectrum(opts);
        }
        if (*ensemble) {
            return cmd_ensemble(opts);
        }
        return cmd_selftest(opts);
    } catch (const Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << "error code=Internal message=" << json(e.what()).dump() << "\n";
        return kExitNumerical;
    }
}
