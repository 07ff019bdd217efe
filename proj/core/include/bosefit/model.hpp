#pragma once

#include <array>
#include <limits>
#include <string_view>

#include "bosefit/special_fn.hpp"

namespace bosefit {

/// The two density families compared throughout the library.
///   BoseEinstein: c r^alpha / (e^{beta r} - 1)
///   Gamma:        c r^alpha e^{-beta r}
enum class ModelKind { BoseEinstein, Gamma };

std::string_view to_string(ModelKind kind);
/// Accepts "be"/"bose-einstein" and "gamma". Throws ValidationError otherwise.
ModelKind parse_model_kind(std::string_view text);

/// (c, alpha, beta). c is a scale in households per income unit^(alpha+1),
/// beta an inverse income. Units follow the income axis the caller uses;
/// the fitter works in kilo-dollars.
struct ModelParams {
    double c = 1.0;
    double alpha = 1.5;
    double beta = 1.0;

    /// Throws DomainError unless c, alpha, beta are finite and > 0.
    void validate() const;

    /// Parameters describing the same population on an income axis measured
    /// in units `u` times larger (r' = r / u): beta' = beta u, c' = c u^(alpha+1).
    ModelParams rescaled_income(double u) const;

    bool operator==(const ModelParams&) const = default;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// rho(r). At r = 0 the Bose-Einstein value is the limit: 0 for alpha > 1,
/// c / beta for alpha == 1 and +inf for alpha < 1.
double density(ModelKind kind, const ModelParams& p, double r);

/// d rho / d(c, alpha, beta) at r > 0. Throws DomainError at r <= 0.
std::array<double, 3> density_gradient(ModelKind kind, const ModelParams& p, double r);

/// Income beyond which either family carries fewer than `tail_tol`
/// households (a provable bound, see bose_tail_bound).
double model_truncation_point(const ModelParams& p, double tail_tol);

/// integral_lo^hi rho dr by adaptive quadrature. `hi` may be +inf, in which
/// case the integral is truncated at model_truncation_point.
double bin_mass(ModelKind kind, const ModelParams& p, double lo, double hi, const Accuracy& acc = {});

/// Bin-mass of each partial derivative, i.e. d/d(c, alpha, beta) of bin_mass.
std::array<double, 3> bin_mass_gradient(ModelKind kind, const ModelParams& p, double lo, double hi,
                                        const Accuracy& acc = {});

/// N = integral_0^inf rho dr in closed form.
///   BoseEinstein: c beta^-(alpha+1) Gamma(alpha+1) zeta(alpha+1)
///   Gamma:        c beta^-(alpha+1) Gamma(alpha+1)
double total_population(const ModelParams& p, ModelKind kind = ModelKind::BoseEinstein);

/// R = integral_0^inf r rho dr in closed form (I(alpha+1) in place of I(alpha)).
double total_income(const ModelParams& p, ModelKind kind = ModelKind::BoseEinstein);

/// Ratio of the first moment to the population at beta = 1, i.e.
/// I(alpha+1) / I(alpha) for BoseEinstein and alpha + 1 for Gamma.
double mean_income_ratio(double alpha, ModelKind kind = ModelKind::BoseEinstein);

/// Inverse of total_population in beta: (c I(alpha) / N)^(1 / (alpha+1)).
double beta_for_population(double n_target, double c, double alpha,
                           ModelKind kind = ModelKind::BoseEinstein);

/// c that makes total_population equal to `n_target` at the given alpha, beta.
double scale_for_population(double n_target, double alpha, double beta,
                            ModelKind kind = ModelKind::BoseEinstein);

}  // namespace bosefit
