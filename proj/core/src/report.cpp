#include "bosefit/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

using nlohmann::json;

// Size of `unit` measured in kilo-dollars.
double axis_factor(IncomeUnit unit) { return unit_scale(unit) / 1000.0; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json params_json(const ModelParams& p) { return {{"c", p.c}, {"alpha", p.alpha}, {"beta", p.beta}}; }

json fit_entry_json(const std::optional<FitResult>& fit, const std::string& error, IncomeUnit unit,
                    bool with_population) {
    if (!fit) {
        return {{"error", error}};
    }
    json j = {
        {"params", params_json(fit->params.rescaled_income(axis_factor(unit)))},
        {"r_squared", number_or_null(fit->r_squared)},
        {"converged", fit->converged},
        {"iterations", fit->iterations},
    };
    if (with_population) {
        j["population"] = total_population(fit->params, ModelKind::BoseEinstein);
    }
    return j;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

FitReport make_fit_report(const FitResult& fit, const NormalizedData& data, const FitOptions& opts,
                          IncomeUnit unit, Weighting weighting, std::string source) {
    const double s = axis_factor(unit);
    FitReport r;
    r.year = data.year;
    r.source = std::move(source);
    r.model = fit.model;
    r.params = fit.params.rescaled_income(s);
    r.r_squared = fit.r_squared;
    r.converged = fit.converged;
    r.iterations = fit.iterations;
    // rho on the `unit` axis is rho_kilodollar * s.
    r.objective = weighting == Weighting::uniform ? fit.objective * s * s : fit.objective;
    r.dropped_top_share = data.dropped_share;
    r.unit = unit;
    r.residual_mode = opts.residual_mode;
    r.fixed_alpha = opts.fix_alpha;
    return r;
}

ModelParams canonical_params(const FitReport& report) {
    return report.params.rescaled_income(1.0 / axis_factor(report.unit));
}

json to_json(const FitReport& r) {
    json j = {
        {"year", r.year ? json(*r.year) : json(nullptr)},
        {"model", std::string(to_string(r.model))},
        {"params", params_json(r.params)},
        {"r_squared", number_or_null(r.r_squared)},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"objective", r.objective},
        {"dropped_top_share", r.dropped_top_share},
        {"unit", std::string(to_string(r.unit))},
        {"residual_mode", std::string(to_string(r.residual_mode))},
        {"fixed_alpha", r.fixed_alpha ? json(*r.fixed_alpha) : json(nullptr)},
    };
    if (!r.source.empty()) {
        j["source"] = r.source;
    }
    return j;
}

FitReport fit_report_from_json(const json& j) {
    try {
        FitReport r;
        if (!j.at("year").is_null()) {
            r.year = j.at("year").get<int>();
        }
        r.model = parse_model_kind(j.at("model").get<std::string>());
        const json& p = j.at("params");
        r.params = {p.at("c").get<double>(), p.at("alpha").get<double>(), p.at("beta").get<double>()};
        r.r_squared = number_or_nan(j.at("r_squared"));
        r.converged = j.at("converged").get<bool>();
        r.iterations = j.at("iterations").get<int>();
        r.objective = j.at("objective").get<double>();
        r.dropped_top_share = j.at("dropped_top_share").get<double>();
        r.unit = parse_income_unit(j.value("unit", std::string("kilodollar")));
        r.residual_mode = parse_representative(j.value("residual_mode", std::string("mass")));
        if (j.contains("fixed_alpha") && !j.at("fixed_alpha").is_null()) {
            r.fixed_alpha = j.at("fixed_alpha").get<double>();
        }
        r.source = j.value("source", std::string());
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("fit report: ") + e.what(), 0);
    }
}

json to_json(const YearSeries& series, IncomeUnit unit) {
    json rows = json::array();
    for (const auto& e : series.entries) {
        rows.push_back({
            {"year", e.year},
            {"dropped_top_share", e.dropped_share},
            {"unit", std::string(to_string(unit))},
            {"be", fit_entry_json(e.be, e.be_error, unit, true)},
            {"gamma", fit_entry_json(e.gamma, e.gamma_error, unit, false)},
        });
    }
    return rows;
}

std::string series_csv(const YearSeries& series, IncomeUnit unit) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::string out = "year,alpha,beta,c,population,r2_be,r2_gamma,be_converged,gamma_converged\n";
    for (const auto& e : series.entries) {
        ModelParams p{nan, nan, nan};
        if (e.be) {
            p = e.be->params.rescaled_income(axis_factor(unit));
        }
        out += std::to_string(e.year) + ',' + format_double(p.alpha) + ',' + format_double(p.beta) + ',' +
               format_double(p.c) + ',' + format_double(e.population()) + ',' +
               format_double(e.be ? e.be->r_squared : nan) + ',' +
               format_double(e.gamma ? e.gamma->r_squared : nan) + ',' +
               (e.be && e.be->converged ? "true" : "false") + ',' +
               (e.gamma && e.gamma->converged ? "true" : "false") + '\n';
    }
    return out;
}

json to_json(const kinetics::Society& society, const kinetics::SimulationOptions& opts,
             const kinetics::SimulationResult& result) {
    json levels = json::array();
    for (const auto& l : society.levels) {
        levels.push_back({{"r", l.r}, {"g", l.g}});
    }
    json occupations = json::array();
    for (const auto& o : result.occupations) {
        occupations.push_back({{"mean", o.mean}, {"stderr", o.std_error}});
    }
    return {
        {"levels", levels},
        {"beta", society.beta},
        {"seed", opts.seed},
        {"horizon", opts.horizon},
        {"burn_in", opts.burn_in},
        {"batches", opts.batches},
        {"rng", result.rng},
        {"events", result.events},
        {"occupations", occupations},
        {"analytic", kinetics::equilibrium_density(society.levels, society.beta)},
        {"warnings", result.warnings},
    };
}

}  // namespace bosefit
