#include "nfqed/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "nfqed/error.hpp"

namespace nfqed {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::ValidationError, path + ": " + what);
}

// Reads one JSON object, tracking which keys were consumed so that leftovers
// can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            invalid(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) {
                invalid(field(key), "expected a number");
            }
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) {
                invalid(field(key), "expected an integer");
            }
            out = v->get<int>();
        }
    }

    void unsigned64(const std::string& key, std::uint64_t& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) {
                invalid(field(key), "expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) {
                invalid(field(key), "expected true or false");
            }
            out = v->get<bool>();
        }
    }

    bool string(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) {
                invalid(field(key), "expected a string");
            }
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    template <typename T>
    void array(const std::string& key, std::vector<T>& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array()) {
                invalid(field(key), "expected an array");
            }
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = (*v)[i];
                const std::string at = field(key) + "[" + std::to_string(i) + "]";
                if constexpr (std::is_same_v<T, std::string>) {
                    if (!e.is_string()) {
                        invalid(at, "expected a string");
                    }
                } else {
                    if (!e.is_number()) {
                        invalid(at, "expected a number");
                    }
                }
                out.push_back(e.get<T>());
            }
        }
    }

    template <typename Fn>
    void object(const std::string& key, Fn&& fn)
    {
        if (const json* v = find(key)) {
            ObjectReader child(*v, field(key));
            fn(child);
            child.finish();
        }
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                invalid(field(key), "unknown key");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

SpacingMode parse_spacing_mode(const std::string& path, const std::string& s)
{
    if (s == "half_guided_wavelength") {
        return SpacingMode::HalfGuidedWavelength;
    }
    if (s == "explicit_nm") {
        return SpacingMode::ExplicitNm;
    }
    invalid(path, "expected \"half_guided_wavelength\" or \"explicit_nm\"");
}

std::string spacing_mode_to_string(SpacingMode m)
{
    return m == SpacingMode::HalfGuidedWavelength ? "half_guided_wavelength" : "explicit_nm";
}

Truncation parse_truncation(const std::string& path, const std::string& s)
{
    if (s == "full") {
        return Truncation::full();
    }
    static const std::regex re(R"(max_flips\((\d+)\))");
    std::smatch m;
    if (std::regex_match(s, m, re)) {
        return Truncation::max_spin_flips(std::stoi(m[1].str()));
    }
    invalid(path, "expected \"full\" or \"max_flips(s)\"");
}

}  // namespace

std::string truncation_to_string(const Truncation& t)
{
    return t.max_flips ? "max_flips(" + std::to_string(*t.max_flips) + ")" : "full";
}

bool OutputConfig::wants(const std::string& fmt) const
{
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

RunConfig parse_config_text(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string(e.what()) + " (byte " + std::to_string(e.byte) + ")");
    }

    RunConfig c;
    ObjectReader r(root, "");
    r.object("fiber", [&](ObjectReader& o) {
        o.number("radius_nm", c.fiber.radius_nm);
        o.number("refractive_index", c.fiber.refractive_index);
    });
    r.object("atom", [&](ObjectReader& o) {
        o.number("lambda0_nm", c.atom.lambda0_nm);
        o.number("gamma_natural_MHz", c.atom.gamma_natural_MHz);
        o.number("shift_delta_over_gamma", c.atom.shift_delta_over_gamma);
    });
    r.object("array", [&](ObjectReader& o) {
        o.integer("n_atoms", c.array.n_atoms);
        std::string s;
        if (o.string("spacing_mode", s)) {
            c.array.spacing_mode = parse_spacing_mode(o.field("spacing_mode"), s);
        }
        o.number("spacing_nm", c.array.spacing_nm);
        o.number("rho_over_a", c.array.rho_over_a);
        o.number("phi_deg", c.array.phi_deg);
        o.object("disorder", [&](ObjectReader& d) {
            d.boolean("enabled", c.array.disorder.enabled);
            std::string m;
            if (d.string("mean_spacing_mode", m)) {
                c.array.disorder.mean_spacing_mode = parse_spacing_mode(d.field("mean_spacing_mode"), m);
            }
            d.number("mean_spacing_nm", c.array.disorder.mean_spacing_nm);
            d.unsigned64("seed", c.array.disorder.seed);
        });
    });
    r.object("scan", [&](ObjectReader& o) {
        o.number("delta_min_gamma", c.scan.delta_min_gamma);
        o.number("delta_max_gamma", c.scan.delta_max_gamma);
        o.integer("points", c.scan.points);
    });
    r.object("model", [&](ObjectReader& o) {
        std::string s;
        if (o.string("green", s)) {
            if (s == "full") {
                c.model.green = GreenModel::Full;
            } else if (s == "guided_only") {
                c.model.green = GreenModel::GuidedOnly;
            } else {
                invalid(o.field("green"), "expected \"full\" or \"guided_only\"");
            }
        }
        if (o.string("truncation", s)) {
            c.model.truncation = parse_truncation(o.field("truncation"), s);
        }
        o.boolean("sigma_at_scan_freq", c.model.sigma_at_scan_freq);
        o.boolean("include_subtraction", c.model.include_subtraction);
    });
    std::string fig;
    if (r.string("figure", fig)) {
        if (fig == "none") {
            c.figure = Figure::None;
        } else if (fig == "fig4") {
            c.figure = Figure::Fig4;
        } else if (fig == "fig5") {
            c.figure = Figure::Fig5;
        } else {
            invalid("figure", "expected \"none\", \"fig4\" or \"fig5\"");
        }
    }
    r.object("modes", [&](ObjectReader& o) {
        o.integer("points", c.modes.points);
        o.number("rho_max_over_a", c.modes.rho_max_over_a);
        o.array("indices", c.modes.indices);
    });
    r.object("decay", [&](ObjectReader& o) {
        o.integer("points", c.decay.points);
        o.number("rho_minus_a_max_nm", c.decay.rho_minus_a_max_nm);
    });
    r.object("ensemble", [&](ObjectReader& o) { o.integer("realizations", c.ensemble.realizations); });
    r.object("output", [&](ObjectReader& o) {
        o.string("dir", c.output.dir);
        o.array("formats", c.output.formats);
    });
    r.finish();
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void validate(const RunConfig& c)
{
    if (!(c.fiber.radius_nm > 0.0)) {
        invalid("fiber.radius_nm", "must be > 0");
    }
    if (!(c.fiber.refractive_index > 1.0)) {
        invalid("fiber.refractive_index", "must be > 1 (no guiding otherwise)");
    }
    if (!(c.atom.lambda0_nm > 0.0)) {
        invalid("atom.lambda0_nm", "must be > 0");
    }
    if (!(c.atom.gamma_natural_MHz > 0.0)) {
        invalid("atom.gamma_natural_MHz", "must be > 0");
    }
    if (!std::isfinite(c.atom.shift_delta_over_gamma)) {
        invalid("atom.shift_delta_over_gamma", "must be finite");
    }
    if (c.array.n_atoms < 1) {
        invalid("array.n_atoms", "must be >= 1");
    }
    if (c.array.spacing_mode == SpacingMode::ExplicitNm && !(c.array.spacing_nm > 0.0)) {
        invalid("array.spacing_nm", "must be > 0 with spacing_mode explicit_nm");
    }
    if (!(c.array.rho_over_a > 1.0)) {
        invalid("array.rho_over_a", "must be > 1 (atom inside the fiber otherwise)");
    }
    if (c.array.disorder.mean_spacing_mode == SpacingMode::ExplicitNm && !(c.array.disorder.mean_spacing_nm > 0.0)) {
        invalid("array.disorder.mean_spacing_nm", "must be > 0 with mean_spacing_mode explicit_nm");
    }
    if (c.scan.points < 1) {
        invalid("scan.points", "must be >= 1");
    }
    if (!(c.scan.delta_max_gamma >= c.scan.delta_min_gamma)) {
        invalid("scan.delta_max_gamma", "must be >= delta_min_gamma");
    }
    if (c.model.truncation.max_flips && *c.model.truncation.max_flips < 0) {
        invalid("model.truncation", "spin-flip count must be >= 0");
    }
    if (c.modes.points < 2) {
        invalid("modes.points", "must be >= 2");
    }
    if (c.modes.rho_max_over_a < 0.0) {
        invalid("modes.rho_max_over_a", "must be >= 0");
    }
    for (std::size_t i = 0; i < c.modes.indices.size(); ++i) {
        if (!(c.modes.indices[i] > 1.0)) {
            invalid("modes.indices[" + std::to_string(i) + "]", "must be > 1");
        }
    }
    if (c.decay.points < 2) {
        invalid("decay.points", "must be >= 2");
    }
    if (c.decay.rho_minus_a_max_nm < 0.0) {
        invalid("decay.rho_minus_a_max_nm", "must be >= 0");
    }
    if (c.ensemble.realizations < 1) {
        invalid("ensemble.realizations", "must be >= 1");
    }
    if (c.output.dir.empty()) {
        invalid("output.dir", "must not be empty");
    }
    for (std::size_t i = 0; i < c.output.formats.size(); ++i) {
        const auto& f = c.output.formats[i];
        if (f != "csv" && f != "json" && f != "svg") {
            invalid("output.formats[" + std::to_string(i) + "]", "expected one of csv, json, svg");
        }
    }
}

json to_json(const RunConfig& c)
{
    json j;
    j["fiber"] = {{"radius_nm", c.fiber.radius_nm}, {"refractive_index", c.fiber.refractive_index}};
    j["atom"] = {{"lambda0_nm", c.atom.lambda0_nm},
                 {"gamma_natural_MHz", c.atom.gamma_natural_MHz},
                 {"shift_delta_over_gamma", c.atom.shift_delta_over_gamma}};
    j["array"] = {{"n_atoms", c.array.n_atoms},
                  {"spacing_mode", spacing_mode_to_string(c.array.spacing_mode)},
                  {"spacing_nm", c.array.spacing_nm},
                  {"rho_over_a", c.array.rho_over_a},
                  {"phi_deg", c.array.phi_deg},
                  {"disorder",
                   {{"enabled", c.array.disorder.enabled},
                    {"mean_spacing_mode", spacing_mode_to_string(c.array.disorder.mean_spacing_mode)},
                    {"mean_spacing_nm", c.array.disorder.mean_spacing_nm},
                    {"seed", c.array.disorder.seed}}}};
    j["scan"] = {{"delta_min_gamma", c.scan.delta_min_gamma},
                 {"delta_max_gamma", c.scan.delta_max_gamma},
                 {"points", c.scan.points}};
    j["model"] = {{"green", c.model.green == GreenModel::Full ? "full" : "guided_only"},
                  {"truncation", truncation_to_string(c.model.truncation)},
                  {"sigma_at_scan_freq", c.model.sigma_at_scan_freq},
                  {"include_subtraction", c.model.include_subtraction}};
    j["figure"] = c.figure == Figure::Fig4 ? "fig4" : c.figure == Figure::Fig5 ? "fig5" : "none";
    j["modes"] = {{"points", c.modes.points}, {"rho_max_over_a", c.modes.rho_max_over_a}, {"indices", c.modes.indices}};
    j["decay"] = {{"points", c.decay.points}, {"rho_minus_a_max_nm", c.decay.rho_minus_a_max_nm}};
    j["ensemble"] = {{"realizations", c.ensemble.realizations}};
    j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
    return j;
}

std::string config_hash(const RunConfig& config)
{
    json j = to_json(config);
    j.erase("output");  // where results go does not change what they are
    const std::string text = j.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace nfqed
