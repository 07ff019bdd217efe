#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bosefit/ingest.hpp"
#include "bosefit/model.hpp"

namespace bosefit {

struct FitOptions {
    ModelKind model = ModelKind::BoseEinstein;
    /// Pin alpha (1 for the classic gamma baseline, 1.5 for the fixed-exponent BE form).
    std::optional<double> fix_alpha;
    Representative residual_mode = Representative::mass_integrated;
    int max_iterations = 200;
    /// Stop when every log-parameter moves by less than this (a relative step).
    double step_tol = 1e-10;
    /// Stop when max_j |J_j . r| / (|J_j| |r|) falls below this.
    double grad_tol = 1e-10;
    /// Initial Levenberg-Marquardt damping, relative to diag(J^T J).
    double damping_init = 1e-3;
    Accuracy accuracy{1e-14, 1e-12, 500};

    /// Throws DomainError for non-positive tolerances, limits or fix_alpha.
    void validate() const;
};

struct FitResult {
    ModelKind model = ModelKind::BoseEinstein;
    ModelParams params;
    /// NaN when the data have zero variance and R^2 is undefined.
    double r_squared = 0.0;
    /// sqrt(w_i) (model_i - rho_i) at params.
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
    /// Sum of squared residuals.
    double objective = 0.0;
    /// Objective after the starting point and after each accepted step.
    std::vector<double> trace;
    std::string stop_reason;
};

/// Model counterpart of each point's rho: the density at the representative
/// income (midpoint mode) or the bracket average bin_mass / width (mass mode).
std::vector<double> model_values(std::span<const DensityPoint> points, ModelKind kind,
                                 const ModelParams& p, Representative mode, const Accuracy& acc = {});

/// d model_i / d(c, alpha, beta), analytic.
std::vector<std::array<double, 3>> model_gradients(std::span<const DensityPoint> points, ModelKind kind,
                                                   const ModelParams& p, Representative mode,
                                                   const Accuracy& acc = {});

/// Moment-based starting point: alpha0 = fix_alpha or 3/2, beta0 from the
/// observed mean income, c0 so the model population is 1.
/// Throws DegenerateDataError when no point has positive mass.
ModelParams initial_guess(std::span<const DensityPoint> points, ModelKind kind,
                          std::optional<double> fix_alpha = std::nullopt);

/// Weighted least squares by Levenberg-Marquardt over (log c, log beta[, log alpha]).
/// Non-convergence is reported through FitResult::converged, never thrown.
/// Throws ValidationError for too few points, SingularJacobianError when a
/// parameter has no influence on the residuals.
FitResult fit(std::span<const DensityPoint> points, const FitOptions& opts = {});

/// 1 - SS_res / SS_tot over the (unweighted) model values of `mode`.
/// Throws DegenerateDataError when SS_tot == 0 or fewer than 2 points.
double r_squared(std::span<const DensityPoint> points, ModelKind kind, const ModelParams& p,
                 Representative mode, const Accuracy& acc = {});

struct SeriesOptions {
    NormalizeOptions normalize;
    FitOptions be;
    FitOptions gamma = [] {
        FitOptions o;
        o.model = ModelKind::Gamma;
        o.fix_alpha = 1.0;
        return o;
    }();
};

struct YearEntry {
    int year = 0;
    double dropped_share = 0.0;
    std::optional<FitResult> be;
    std::optional<FitResult> gamma;
    std::string be_error;
    std::string gamma_error;

    /// BE total population at the fitted parameters; NaN when the fit failed.
    double population() const;
};

struct YearSeries {
    /// Strictly increasing by year.
    std::vector<YearEntry> entries;
};

/// Fits every histogram with both families. Years come from the histograms
/// (missing or duplicate years throw ValidationError). A failed fit is
/// recorded in its entry and the batch continues. Years run concurrently.
YearSeries fit_years(std::span<const IncomeHistogram> histograms, const SeriesOptions& opts = {});

}  // namespace bosefit
