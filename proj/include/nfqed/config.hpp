#pragma once

// Run configuration: JSON schema, defaults, validation and hashing. Physical
// inputs are in laboratory units (nm, MHz, degrees); to_internal-style
// conversions live in experiments.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfqed/spectral.hpp"

namespace nfqed {

enum class SpacingMode { HalfGuidedWavelength, ExplicitNm };

struct FiberConfig {
    double radius_nm = 200.0;
    double refractive_index = 1.45;
};

struct AtomConfig {
    double lambda0_nm = 780.0;
    double gamma_natural_MHz = 6.0666;
    double shift_delta_over_gamma = 0.0;
};

struct DisorderConfig {
    bool enabled = false;
    SpacingMode mean_spacing_mode = SpacingMode::HalfGuidedWavelength;
    double mean_spacing_nm = 0.0;  // used with ExplicitNm
    std::uint64_t seed = 7;
};

struct ArrayConfig {
    int n_atoms = 1;
    SpacingMode spacing_mode = SpacingMode::HalfGuidedWavelength;
    double spacing_nm = 0.0;  // used with ExplicitNm
    double rho_over_a = 1.5;
    double phi_deg = 0.0;
    DisorderConfig disorder;
};

struct ScanConfig {
    double delta_min_gamma = -10.0;
    double delta_max_gamma = 10.0;
    int points = 401;
};

struct ModelConfig {
    GreenModel green = GreenModel::Full;
    Truncation truncation = Truncation::full();
    bool sigma_at_scan_freq = false;
    bool include_subtraction = true;
};

// Extra pipeline selection for the `spectrum` subcommand.
enum class Figure { None, Fig4, Fig5 };

struct ModesConfig {
    int points = 401;
    double rho_max_over_a = 0.0;  // 0: a + 2 lambda0
    std::vector<double> indices{1.45, 1.1};
};

struct DecayConfig {
    int points = 200;
    double rho_minus_a_max_nm = 0.0;  // 0: 2.5 lambda0
};

struct EnsembleConfig {
    int realizations = 32;
};

struct OutputConfig {
    std::string dir = "out";
    std::vector<std::string> formats{"csv", "json", "svg"};

    bool wants(const std::string& fmt) const;
};

struct RunConfig {
    FiberConfig fiber;
    AtomConfig atom;
    ArrayConfig array;
    ScanConfig scan;
    ModelConfig model;
    Figure figure = Figure::None;
    ModesConfig modes;
    DecayConfig decay;
    EnsembleConfig ensemble;
    OutputConfig output;
};

// Throws ParseError (with line/column) or ValidationError (field path and
// constraint). Unknown keys are rejected; missing keys take the defaults above.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

// Range and consistency checks; throws ValidationError.
void validate(const RunConfig& config);

// Fully resolved configuration (defaults included), canonical key order.
nlohmann::json to_json(const RunConfig& config);

// FNV-1a 64 of the canonical JSON dump without the output section, as 16
// hex digits.
std::string config_hash(const RunConfig& config);

std::string truncation_to_string(const Truncation& t);

}  // namespace nfqed
