#pragma once

// Scenario configuration: a flat `key = value` text format with units in the
// key names, plus built-in presets for the four model-comparison setups.
//
//   # comment
//   s0                = 100
//   x_total_units     = 1e6
//   t_end_years       = 0.003968253968253968
//   sigma_annualized  = 0.3
//   combinations      = ABM+SAE, DD+SAE, GBM+VaR, DD+VaR
//
// Doubles are written in shortest round-trip form, so write/load is exact.

#include "ddexec/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ddexec {

enum class Combination { AbmSae, DdSae, GbmVar, DdVar };

inline constexpr std::array<Combination, 4> kAllCombinations = {Combination::AbmSae, Combination::DdSae,
                                                                Combination::GbmVar, Combination::DdVar};

inline std::string_view to_string(Combination c) {
    switch (c) {
        case Combination::AbmSae: return "ABM+SAE";
        case Combination::DdSae: return "DD+SAE";
        case Combination::GbmVar: return "GBM+VaR";
        case Combination::DdVar: return "DD+VaR";
    }
    return "?";
}

inline std::optional<Combination> parse_combination(std::string_view s) {
    for (auto c : kAllCombinations)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

enum class LambdaMapping { ConstantPosition, VwapMatch };

inline std::string_view to_string(LambdaMapping m) {
    return m == LambdaMapping::ConstantPosition ? "constant_position" : "vwap_match";
}

struct ScenarioConfig {
    std::string name = "custom";
    double s0 = 100.0;
    double x_total = 1e6;
    double t_end = 1.0 / 252.0;           // years
    double sigma = 0.3;                   // annualized
    double shift_k = 5.0;
    double eta = 2e-6;
    double gamma = 0.0;
    double leverage_L = 100.0;
    double alpha = 0.95;
    double horizon_h = 1.0 / 252.0;       // years
    std::size_t n_steps = 252;
    std::uint64_t seed = 42;
    std::size_t mc_paths = 1000;          // Monte Carlo paths for summary statistics
    std::vector<Combination> combinations{kAllCombinations.begin(), kAllCombinations.end()};
    LambdaMapping lambda_mapping = LambdaMapping::VwapMatch;
    bool rescale_vol = false;
    std::string output_dir = "out";
    bool plot = true;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ConfigError naming the first violated field.
inline void validate(const ScenarioConfig& c) {
    auto fail = [](const std::string& field, const std::string& what) {
        throw ConfigError("invalid field '" + field + "': " + what);
    };
    auto positive = [&](double v, const char* field) {
        if (!(std::isfinite(v) && v > 0.0)) fail(field, "must be a positive number");
    };
    positive(c.s0, "s0");
    positive(c.x_total, "x_total_units");
    positive(c.t_end, "t_end_years");
    if (!(std::isfinite(c.sigma) && c.sigma >= 0.0)) fail("sigma_annualized", "must be non-negative");
    if (!std::isfinite(c.shift_k)) fail("shift_k", "must be finite");
    if (!(c.s0 - c.shift_k > 0.0)) fail("shift_k", "must be below s0");
    positive(c.eta, "eta");
    if (!(std::isfinite(c.gamma) && c.gamma >= 0.0)) fail("gamma", "must be non-negative");
    if (!(std::isfinite(c.leverage_L) && c.leverage_L >= 0.0)) fail("leverage_L", "must be non-negative");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha", "must lie in (0, 1)");
    positive(c.horizon_h, "horizon_h_years");
    if (c.n_steps < 3) fail("n_steps", "must be >= 3");
    if (c.combinations.empty()) fail("combinations", "must name at least one combination");
    std::set<Combination> seen;
    for (auto comb : c.combinations)
        if (!seen.insert(comb).second) fail("combinations", "duplicate entry " + std::string(to_string(comb)));
    if (c.output_dir.empty()) fail("output_dir", "must not be empty");
}

// Presets. eta = 2e-6: an instantaneous sale of 1e6 units moves the price by
// 2 currency units. fig4 uses 1e-6.
inline ScenarioConfig preset_fig1() {
    ScenarioConfig c;
    c.name = "fig1";
    return c;
}

inline ScenarioConfig preset_fig2() {
    ScenarioConfig c = preset_fig1();
    c.name = "fig2";
    c.eta = 2e-5;
    return c;
}

inline ScenarioConfig preset_fig3() {
    ScenarioConfig c = preset_fig1();
    c.name = "fig3";
    c.shift_k = 50.0;
    c.rescale_vol = true;
    return c;
}

inline ScenarioConfig preset_fig4() {
    ScenarioConfig c = preset_fig3();
    c.name = "fig4";
    c.eta = 1e-6;
    return c;
}

inline std::vector<ScenarioConfig> all_presets() { return {preset_fig1(), preset_fig2(), preset_fig3(), preset_fig4()}; }

inline std::optional<ScenarioConfig> find_preset(std::string_view name) {
    for (auto& p : all_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct ConfigLine {
    std::string value;
    int line = 0;
    int column = 0;  // 1-based column of the value
};

}  // namespace detail

inline std::string write_config(const ScenarioConfig& c) {
    using detail::format_double;
    std::ostringstream os;
    os << "# ddexec scenario\n";
    os << "name = " << c.name << '\n';
    os << "s0 = " << format_double(c.s0) << '\n';
    os << "x_total_units = " << format_double(c.x_total) << '\n';
    os << "t_end_years = " << format_double(c.t_end) << '\n';
    os << "sigma_annualized = " << format_double(c.sigma) << '\n';
    os << "shift_k = " << format_double(c.shift_k) << '\n';
    os << "eta = " << format_double(c.eta) << '\n';
    os << "gamma = " << format_double(c.gamma) << '\n';
    os << "leverage_L = " << format_double(c.leverage_L) << '\n';
    os << "alpha = " << format_double(c.alpha) << '\n';
    os << "horizon_h_years = " << format_double(c.horizon_h) << '\n';
    os << "n_steps = " << c.n_steps << '\n';
    os << "seed = " << c.seed << '\n';
    os << "mc_paths = " << c.mc_paths << '\n';
    os << "combinations = ";
    for (std::size_t i = 0; i < c.combinations.size(); ++i) os << (i ? ", " : "") << to_string(c.combinations[i]);
    os << '\n';
    os << "lambda_mapping = " << to_string(c.lambda_mapping) << '\n';
    os << "rescale_vol = " << (c.rescale_vol ? "true" : "false") << '\n';
    os << "output_dir = " << c.output_dir << '\n';
    os << "plot = " << (c.plot ? "true" : "false") << '\n';
    return os.str();
}

/// Parses and validates config text. Unknown keys, malformed lines and
/// missing required fields throw ConfigError with the line/column or field.
inline ScenarioConfig parse_config(std::string_view text) {
    static const std::set<std::string> known = {
        "name", "s0", "x_total_units", "t_end_years", "sigma_annualized", "shift_k", "eta", "gamma", "leverage_L",
        "alpha", "horizon_h_years", "n_steps", "seed", "mc_paths", "combinations", "lambda_mapping", "rescale_vol",
        "output_dir", "plot"};
    static const std::vector<std::string> required = {"s0", "x_total_units", "t_end_years", "sigma_annualized",
                                                      "shift_k", "eta", "leverage_L"};

    std::map<std::string, detail::ConfigLine> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view content = raw.substr(0, raw.find('#'));
        if (detail::trim(content).empty()) continue;
        const auto eq = content.find('=');
        auto where = [&](std::size_t col) {
            return "line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) + ": ";
        };
        if (eq == std::string_view::npos)
            throw ConfigError(where(content.find_first_not_of(" \t")) + "expected 'key = value'");
        const std::string key = detail::trim(content.substr(0, eq));
        if (key.empty()) throw ConfigError(where(eq) + "missing key before '='");
        if (!known.count(key)) throw ConfigError(where(content.find(key)) + "unknown key '" + key + "'");
        if (entries.count(key)) throw ConfigError(where(content.find(key)) + "duplicate key '" + key + "'");
        const auto value_start = content.find_first_not_of(" \t", eq + 1);
        entries[key] = {detail::trim(content.substr(eq + 1)), line_no,
                        static_cast<int>((value_start == std::string_view::npos ? eq + 1 : value_start) + 1)};
    }

    for (const auto& key : required)
        if (!entries.count(key)) throw ConfigError("missing required field '" + key + "'");

    auto bad_value = [](const std::string& key, const detail::ConfigLine& e, const std::string& what) {
        return ConfigError("line " + std::to_string(e.line) + ", column " + std::to_string(e.column) + ": field '" +
                           key + "' " + what);
    };
    auto get_double = [&](const std::string& key, double& out) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        const auto& s = it->second.value;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw bad_value(key, it->second, "expects a number, got '" + s + "'");
        out = v;
    };
    auto get_uint = [&](const std::string& key, auto& out) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        const auto& s = it->second.value;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw bad_value(key, it->second, "expects a non-negative integer, got '" + s + "'");
        out = static_cast<std::remove_reference_t<decltype(out)>>(v);
    };
    auto get_bool = [&](const std::string& key, bool& out) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        const auto& s = it->second.value;
        if (s == "true") out = true;
        else if (s == "false") out = false;
        else throw bad_value(key, it->second, "expects true or false, got '" + s + "'");
    };

    ScenarioConfig c;
    if (auto it = entries.find("name"); it != entries.end()) c.name = it->second.value;
    get_double("s0", c.s0);
    get_double("x_total_units", c.x_total);
    get_double("t_end_years", c.t_end);
    get_double("sigma_annualized", c.sigma);
    get_double("shift_k", c.shift_k);
    get_double("eta", c.eta);
    get_double("gamma", c.gamma);
    get_double("leverage_L", c.leverage_L);
    get_double("alpha", c.alpha);
    get_double("horizon_h_years", c.horizon_h);
    get_uint("n_steps", c.n_steps);
    get_uint("seed", c.seed);
    get_uint("mc_paths", c.mc_paths);
    get_bool("rescale_vol", c.rescale_vol);
    get_bool("plot", c.plot);
    if (auto it = entries.find("output_dir"); it != entries.end()) c.output_dir = it->second.value;
    if (auto it = entries.find("lambda_mapping"); it != entries.end()) {
        const auto& s = it->second.value;
        if (s == "vwap_match") c.lambda_mapping = LambdaMapping::VwapMatch;
        else if (s == "constant_position") c.lambda_mapping = LambdaMapping::ConstantPosition;
        else throw bad_value("lambda_mapping", it->second, "expects vwap_match or constant_position, got '" + s + "'");
    }
    if (auto it = entries.find("combinations"); it != entries.end()) {
        c.combinations.clear();
        std::string_view rest = it->second.value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string item = detail::trim(rest.substr(0, comma));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            if (item.empty()) continue;
            auto comb = parse_combination(item);
            if (!comb) throw bad_value("combinations", it->second, "has unknown combination '" + item + "'");
            c.combinations.push_back(*comb);
        }
    }
    validate(c);
    return c;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// A preset name or a config file path.
inline ScenarioConfig load_config_or_preset(const std::string& arg) {
    if (auto p = find_preset(arg)) return *p;
    return load_config(arg);
}

}  // namespace ddexec
