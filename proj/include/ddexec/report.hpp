#pragma once

// Scenario execution and output files:
//   trajectories.csv  t,combination,holdings,rate,price   (sorted by combination, then t)
//   summary.csv       one row per combination
//   holdings.svg      holdings vs t, one polyline per combination (optional)

#include "ddexec/engine.hpp"
#include "ddexec/error.hpp"
#include "ddexec/scenario.hpp"
#include "ddexec/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ddexec {

struct CombinationSummary {
    Combination combination = Combination::DdVar;
    double model_sigma = 0.0;
    double shift_k = 0.0;
    double risk_weight = 0.0;     // lambda_check (VaR) or lambda_SAE
    double execution_cost = 0.0;  // C(x), includes -X S0
    double implementation_shortfall = 0.0;
    double impact_term = 0.0;     // integral xdot^2 on the common path
    double risk_term = 0.0;       // eta-normalised risk on the common path
    double objective = 0.0;       // impact_term + risk_term
    std::optional<double> closed_form_value;
    std::optional<McEstimate> mc_objective;
    double min_holdings = 0.0;
    bool negative_holdings = false;
    double max_vwap_deviation = 0.0;
};

struct ScenarioResult {
    ComparisonRun comparison;
    std::vector<CombinationSummary> summaries;
};

inline ScenarioResult run_scenario(const ScenarioConfig& cfg, const McOptions& mc = {}) {
    ScenarioResult result;
    result.comparison = run_comparison(cfg);
    const auto& run = result.comparison;
    const auto& setup = run.setup;
    const ImpactParams impact{cfg.eta, cfg.gamma};

    for (const auto& r : run.runs) {
        CombinationSummary s;
        s.combination = r.combination;
        s.model_sigma = r.model.sigma;
        s.shift_k = r.model.shift();
        const PricePath& path = run.path_for(r.combination);
        const auto cost = execution_cost_breakdown(r.trajectory, path, impact);
        s.execution_cost = cost.total();
        s.implementation_shortfall = cost.implementation_shortfall();

        const StrategyKind kind = ComparisonSetup::strategy_for(r.combination);
        const bool sae = kind == StrategyKind::SaeDeterministic;
        s.risk_weight = sae ? setup.risk.lambda_sae : setup.lambda_check;
        const auto terms = detail::evaluate_objective(r.trajectory, r.model, &path,
                                                      sae ? RiskCriterion::SAE : RiskCriterion::VaR,
                                                      setup.lambda_check, setup.risk);
        s.impact_term = terms.impact;
        s.risk_term = terms.risk;
        s.objective = terms.impact + terms.risk;
        if (!sae)
            s.closed_form_value =
                value_function_closed_form(setup.order, r.model, setup.lambda_check, setup.risk.leverage_L);
        if (cfg.mc_paths >= 2)
            s.mc_objective = mc_objective(kind, r.model, setup.order, setup.risk, cfg.mc_paths, cfg.n_steps, cfg.seed, mc);

        s.min_holdings = r.min_holdings;
        s.negative_holdings = r.goes_negative;
        s.max_vwap_deviation = r.max_vwap_deviation;
        result.summaries.push_back(s);
    }
    return result;
}

struct TrajectoryRow {
    double t;
    std::string combination;
    double holdings;
    double rate;
    double price;
};

/// Rows for trajectories.csv, ordered by combination label then t.
inline std::vector<TrajectoryRow> trajectory_rows(const ScenarioResult& result) {
    std::vector<TrajectoryRow> rows;
    const auto& run = result.comparison;
    for (const auto& r : run.runs) {
        const PricePath& path = run.path_for(r.combination);
        for (std::size_t i = 0; i < r.trajectory.grid.size(); ++i)
            rows.push_back({r.trajectory.grid.time(i), std::string(to_string(r.combination)), r.trajectory.holdings[i],
                            r.trajectory.rate[i], path.values[i]});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.combination != b.combination ? a.combination < b.combination : a.t < b.t;
    });
    return rows;
}

namespace detail {

// 12 significant digits; -0 prints as 0.
inline std::string fmt12(double v) {
    if (v == 0.0) v = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fmt_optional(const std::optional<double>& v) { return v ? fmt12(*v) : std::string(); }

}  // namespace detail

inline std::string render_trajectories_csv(const std::vector<TrajectoryRow>& rows) {
    std::string out = "t,combination,holdings,rate,price\n";
    for (const auto& row : rows) {
        out += detail::fmt12(row.t) + ',' + row.combination + ',' + detail::fmt12(row.holdings) + ',' +
               detail::fmt12(row.rate) + ',' + detail::fmt12(row.price) + '\n';
    }
    return out;
}

inline std::string render_summary_csv(const ScenarioResult& result) {
    using detail::fmt12;
    std::string out =
        "combination,model_sigma,shift_k,risk_weight,execution_cost,implementation_shortfall,impact_term,risk_term,"
        "objective,closed_form_value,mc_objective_mean,mc_objective_stderr,mc_paths,min_holdings,negative_holdings,"
        "max_vwap_deviation\n";
    auto summaries = result.summaries;
    std::stable_sort(summaries.begin(), summaries.end(),
                     [](const auto& a, const auto& b) { return to_string(a.combination) < to_string(b.combination); });
    for (const auto& s : summaries) {
        out += std::string(to_string(s.combination)) + ',' + fmt12(s.model_sigma) + ',' + fmt12(s.shift_k) + ',' +
               fmt12(s.risk_weight) + ',' + fmt12(s.execution_cost) + ',' + fmt12(s.implementation_shortfall) + ',' +
               fmt12(s.impact_term) + ',' + fmt12(s.risk_term) + ',' + fmt12(s.objective) + ',' +
               detail::fmt_optional(s.closed_form_value) + ',' +
               (s.mc_objective ? fmt12(s.mc_objective->mean) : "") + ',' +
               (s.mc_objective ? fmt12(s.mc_objective->std_error) : "") + ',' +
               (s.mc_objective ? std::to_string(s.mc_objective->n_paths) : "") + ',' + fmt12(s.min_holdings) + ',' +
               (s.negative_holdings ? "true" : "false") + ',' + fmt12(s.max_vwap_deviation) + '\n';
    }
    return out;
}

/// Line plot of holdings vs t built from the CSV rows, one polyline per
/// combination with a legend.
inline std::string render_holdings_svg(const std::vector<TrajectoryRow>& rows, const std::string& title) {
    constexpr double width = 720, height = 480, left = 80, right = 150, top = 40, bottom = 50;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::vector<std::string> names;
    double t_max = 0.0, y_min = 0.0, y_max = 0.0;
    for (const auto& r : rows) {
        if (std::find(names.begin(), names.end(), r.combination) == names.end()) names.push_back(r.combination);
        t_max = std::max(t_max, r.t);
        y_min = std::min(y_min, r.holdings);
        y_max = std::max(y_max, r.holdings);
    }
    if (t_max <= 0.0) t_max = 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto px = [&](double t) { return left + plot_w * t / t_max; };
    auto py = [&](double y) { return top + plot_h * (y_max - y) / (y_max - y_min); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << py(y_min) << "\" x2=\"" << left << "\" y2=\"" << py(y_max)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
       << top + plot_h << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\">t (years)</text>\n";
    os << "<text x=\"10\" y=\"" << top + plot_h / 2 << "\">x(t)</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(y_max) + 4 << "\" text-anchor=\"end\">"
       << detail::fmt12(y_max) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(y_min) + 4 << "\" text-anchor=\"end\">"
       << detail::fmt12(y_min) << "</text>\n";
    os << "<text x=\"" << left + plot_w << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"end\">"
       << detail::fmt12(t_max) << "</text>\n";

    for (std::size_t n = 0; n < names.size(); ++n) {
        const char* color = colors[n % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-combination=\""
           << names[n] << "\" points=\"";
        bool first = true;
        for (const auto& r : rows) {
            if (r.combination != names[n]) continue;
            os << (first ? "" : " ") << px(r.t) << ',' << py(r.holdings);
            first = false;
        }
        os << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(n);
        os << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 36
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly + 4 << "\">" << names[n] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

struct OutputFiles {
    std::filesystem::path trajectories, summary;
    std::optional<std::filesystem::path> plot;
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline OutputFiles emit_outputs(const ScenarioResult& result, const ScenarioConfig& cfg) {
    if (result.comparison.runs.empty()) throw ConfigError("no combinations to write");
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    const auto rows = trajectory_rows(result);
    OutputFiles files{dir / "trajectories.csv", dir / "summary.csv", std::nullopt};
    detail::write_text_file(files.trajectories, render_trajectories_csv(rows));
    detail::write_text_file(files.summary, render_summary_csv(result));
    if (cfg.plot) {
        files.plot = dir / "holdings.svg";
        detail::write_text_file(*files.plot, render_holdings_svg(rows, "Optimal holdings: " + cfg.name));
    }
    return files;
}

/// run_scenario followed by emit_outputs.
inline ScenarioResult run(const ScenarioConfig& cfg, const McOptions& mc = {}) {
    auto result = run_scenario(cfg, mc);
    emit_outputs(result, cfg);
    return result;
}

}  // namespace ddexec
