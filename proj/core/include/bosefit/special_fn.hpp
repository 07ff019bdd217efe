#pragma once

#include <cstddef>
#include <functional>

namespace bosefit {

/// Tolerances for adaptive quadrature. A result is accepted once the
/// estimated error is below max(abs_tol, rel_tol * |result|).
struct Accuracy {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    std::size_t max_subdivisions = 500;

    /// Throws DomainError unless all fields are positive.
    void validate() const;
};

/// Behaviour of the integrand at the lower limit.
enum class Endpoint {
    regular,
    /// Integrable power-law singularity (or derivative singularity) at `lo`.
    /// Handled by substituting x = lo + t^2.
    singular_lo,
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Gamma function for x > 0 (Lanczos, g = 607/128, 15 terms).
/// Throws DomainError for x <= 0 or NaN, OverflowError past ~171.62.
double gamma(double x);

/// log Gamma(x) for x > 0. Finite for every finite positive x.
double log_gamma(double x);

/// Riemann zeta for real s > 1, through the Dirichlet eta function with
/// Borwein's accelerated alternating series.
double zeta(double s);

/// I(alpha) = integral_0^inf x^alpha / (e^x - 1) dx = Gamma(alpha+1) zeta(alpha+1).
double bose_integral(double alpha);

/// Same integral by adaptive quadrature on (0, X], X = bose_truncation_point.
/// Throws NonConvergenceError when quadrature fails within acc.max_subdivisions.
double bose_integral_quadrature(double alpha, const Accuracy& acc = {});

/// Evaluates both routes and throws NonConvergenceError if they differ by
/// more than max(acc.abs_tol, acc.rel_tol * |closed form|). Returns the
/// closed form.
double bose_integral_checked(double alpha, const Accuracy& acc = {});

/// Smallest X on the ladder 40, 50, 60, ... such that the tail
/// integral_X^inf x^alpha / (e^x - 1) dx is provably below `tail_tol`, using
/// Gamma(a, X) <= X^(a-1) e^-X X / (X - a + 1), valid for a >= 1 and X > a - 1
/// by log-concavity of the integrand.
double bose_truncation_point(double alpha, double tail_tol);

/// Upper bound on integral_X^inf x^alpha / (e^x - 1) dx (valid for X > alpha).
double bose_tail_bound(double alpha, double x);

/// Adaptive 21-point Gauss-Kronrod quadrature with global subdivision of the
/// interval of largest error. Requires finite lo < hi.
QuadratureResult integrate_detailed(const std::function<double(double)>& f, double lo, double hi,
                                    const Accuracy& acc = {}, Endpoint endpoint = Endpoint::regular);

/// Value of integrate_detailed. Throws NonConvergenceError carrying the best
/// estimate and error bound when the tolerance is not met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Accuracy& acc = {}, Endpoint endpoint = Endpoint::regular);

}  // namespace bosefit
