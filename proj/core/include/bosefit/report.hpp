#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bosefit/fit.hpp"
#include "bosefit/ingest.hpp"
#include "bosefit/kinetics.hpp"

namespace bosefit {

/// One fitted table as written by `bosefit fit`. Parameters, objective and
/// R^2 are expressed on the `unit` income axis.
struct FitReport {
    std::optional<int> year;
    std::string source;
    ModelKind model = ModelKind::BoseEinstein;
    ModelParams params;
    double r_squared = 0.0;
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;
    double dropped_top_share = 0.0;
    IncomeUnit unit = IncomeUnit::kilodollar;
    Representative residual_mode = Representative::mass_integrated;
    std::optional<double> fixed_alpha;
};

/// Builds a report from a fit done on the kilo-dollar axis, converting to
/// `unit`. With uniform weights the objective scales with rho^2; with
/// Poisson weights it is unit-free.
FitReport make_fit_report(const FitResult& fit, const NormalizedData& data, const FitOptions& opts,
                          IncomeUnit unit, Weighting weighting = Weighting::uniform,
                          std::string source = {});

/// Parameters of a report expressed on the kilo-dollar axis.
ModelParams canonical_params(const FitReport& report);

/// JSON fields: year, model, params {c, alpha, beta}, r_squared, converged,
/// iterations, objective, dropped_top_share, plus unit, residual_mode,
/// fixed_alpha and source. Undefined R^2 is written as null.
nlohmann::json to_json(const FitReport& report);
/// Throws ParseError for missing or mistyped fields.
FitReport fit_report_from_json(const nlohmann::json& j);

/// One row per year: alpha, beta, c, population N, both R^2 values.
nlohmann::json to_json(const YearSeries& series, IncomeUnit unit);
std::string series_csv(const YearSeries& series, IncomeUnit unit);

/// {levels: [{r, g}], beta, seed, horizon, burn_in, batches, rng, events,
///  occupations: [{mean, stderr}], analytic: [...], warnings: [...]}.
nlohmann::json to_json(const kinetics::Society& society, const kinetics::SimulationOptions& opts,
                       const kinetics::SimulationResult& result);

/// Shortest decimal that round-trips, "nan" for NaN.
std::string format_double(double v);

}  // namespace bosefit
