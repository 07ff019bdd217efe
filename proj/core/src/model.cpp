#include "bosefit/model.hpp"

#include <cmath>
#include <string>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

// 1 / (1 - e^-x), finite for every x > 0.
double bose_enhancement(double x) { return 1.0 / -std::expm1(-x); }

double family_integral(double alpha, ModelKind kind) {
    return kind == ModelKind::BoseEinstein ? bose_integral(alpha) : gamma(alpha + 1.0);
}

void check_interval(double lo, double hi) {
    if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(lo)) {
        throw DomainError("bin_mass: requires 0 <= lo < hi");
    }
}

double upper_limit(const ModelParams& p, double lo, double hi, const Accuracy& acc) {
    if (std::isfinite(hi)) {
        return hi;
    }
    return lo + model_truncation_point(p, 0.1 * acc.abs_tol);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::BoseEinstein ? "be" : "gamma";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "be" || text == "bose-einstein") {
        return ModelKind::BoseEinstein;
    }
    if (text == "gamma") {
        return ModelKind::Gamma;
    }
    throw ValidationError("unknown model '" + std::string(text) + "' (expected be or gamma)");
}

void ModelParams::validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(c) || !ok(alpha) || !ok(beta)) {
        throw DomainError("ModelParams: c, alpha and beta must be finite and > 0");
    }
}

ModelParams ModelParams::rescaled_income(double u) const {
    return {c * std::pow(u, alpha + 1.0), alpha, beta * u};
}

double density(ModelKind kind, const ModelParams& p, double r) {
    if (r < 0.0) {
        throw DomainError("density: income must be >= 0");
    }
    if (r == 0.0) {
        if (kind == ModelKind::Gamma || p.alpha > 1.0) {
            return 0.0;
        }
        return p.alpha == 1.0 ? p.c / p.beta : kInfinity;
    }
    const double x = p.beta * r;
    const double gamma_part = p.c * std::exp(p.alpha * std::log(r) - x);
    return kind == ModelKind::Gamma ? gamma_part : gamma_part * bose_enhancement(x);
}

std::array<double, 3> density_gradient(ModelKind kind, const ModelParams& p, double r) {
    if (!(r > 0.0)) {
        throw DomainError("density_gradient: income must be > 0");
    }
    const double rho = density(kind, p, r);
    const double d_beta = kind == ModelKind::Gamma ? -r * rho : -r * rho * bose_enhancement(p.beta * r);
    return {rho / p.c, rho * std::log(r), d_beta};
}

double model_truncation_point(const ModelParams& p, double tail_tol) {
    p.validate();
    const double scale = p.c * std::exp(-(p.alpha + 1.0) * std::log(p.beta));
    return bose_truncation_point(p.alpha, tail_tol / scale) / p.beta;
}

double bin_mass(ModelKind kind, const ModelParams& p, double lo, double hi, const Accuracy& acc) {
    check_interval(lo, hi);
    const double upper = upper_limit(p, lo, hi, acc);
    auto f = [&](double r) { return density(kind, p, r); };
    return integrate(f, lo, upper, acc, lo == 0.0 ? Endpoint::singular_lo : Endpoint::regular);
}

std::array<double, 3> bin_mass_gradient(ModelKind kind, const ModelParams& p, double lo, double hi,
                                        const Accuracy& acc) {
    check_interval(lo, hi);
    const double upper = upper_limit(p, lo, hi, acc);
    const Endpoint ep = lo == 0.0 ? Endpoint::singular_lo : Endpoint::regular;
    const double mass = integrate([&](double r) { return density(kind, p, r); }, lo, upper, acc, ep);
    const double d_alpha = integrate(
        [&](double r) { return density(kind, p, r) * std::log(r); }, lo, upper, acc, ep);
    const double d_beta = integrate(
        [&](double r) { return density_gradient(kind, p, r)[2]; }, lo, upper, acc, ep);
    return {mass / p.c, d_alpha, d_beta};
}

double total_population(const ModelParams& p, ModelKind kind) {
    p.validate();
    return p.c * std::exp(-(p.alpha + 1.0) * std::log(p.beta)) * family_integral(p.alpha, kind);
}

double total_income(const ModelParams& p, ModelKind kind) {
    p.validate();
    return p.c * std::exp(-(p.alpha + 2.0) * std::log(p.beta)) * family_integral(p.alpha + 1.0, kind);
}

double mean_income_ratio(double alpha, ModelKind kind) {
    if (!(alpha > 0.0)) {
        throw DomainError("mean_income_ratio: alpha must be > 0");
    }
    if (kind == ModelKind::Gamma) {
        return alpha + 1.0;
    }
    return (alpha + 1.0) * zeta(alpha + 2.0) / zeta(alpha + 1.0);
}

double beta_for_population(double n_target, double c, double alpha, ModelKind kind) {
    if (!(n_target > 0.0) || !(c > 0.0) || !(alpha > 0.0)) {
        throw DomainError("beta_for_population: N, c and alpha must be > 0");
    }
    return std::pow(c * family_integral(alpha, kind) / n_target, 1.0 / (alpha + 1.0));
}

double scale_for_population(double n_target, double alpha, double beta, ModelKind kind) {
    if (!(n_target > 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
        throw DomainError("scale_for_population: N, alpha and beta must be > 0");
    }
    return n_target * std::exp((alpha + 1.0) * std::log(beta)) / family_integral(alpha, kind);
}

}  // namespace bosefit
