#include "bosefit/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

// Godfrey's coefficients for g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5,
};

// Largest x with Gamma(x) < DBL_MAX.
constexpr double kGammaOverflow = 171.62437695630272;

double lanczos_sum(double xm1) {
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        sum += kLanczos[i] / (xm1 + static_cast<double>(i));
    }
    return sum;
}

void require_positive(double x, const char* name) {
    if (!(x > 0.0)) {
        throw DomainError(std::string(name) + ": argument must be > 0, got " + std::to_string(x));
    }
}

// Borwein's algorithm 2 for eta(s); error below 3 / (3 + sqrt 8)^n for real s.
constexpr int kBorweinTerms = 32;

const std::array<double, kBorweinTerms + 1>& borwein_d() {
    static const auto table = [] {
        std::array<double, kBorweinTerms + 1> d{};
        const double n = kBorweinTerms;
        double term = 1.0 / n;
        double sum = term;
        d[0] = n * sum;
        for (int i = 0; i < kBorweinTerms; ++i) {
            term *= 4.0 * (n + i) * (n - i) / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
            sum += term;
            d[i + 1] = n * sum;
        }
        return d;
    }();
    return table;
}

}  // namespace

void Accuracy::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
        throw DomainError("Accuracy: abs_tol and rel_tol must be > 0 and max_subdivisions >= 1");
    }
}

double gamma(double x) {
    require_positive(x, "gamma");
    if (x > kGammaOverflow) {
        throw OverflowError("gamma: result overflows for x = " + std::to_string(x));
    }
    if (x < 0.5) {
        return gamma(x + 1.0) / x;
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    // Split the power so t^(x - 1/2) does not overflow before e^-t brings it back.
    const double half_power = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_power * (half_power * std::exp(-t)) *
           lanczos_sum(xm1);
}

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    if (x < 0.5) {
        return log_gamma(x + 1.0) - std::log(x);
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
           std::log(lanczos_sum(xm1));
}

double zeta(double s) {
    if (!(s > 1.0)) {
        throw DomainError("zeta: argument must be > 1, got " + std::to_string(s));
    }
    const auto& d = borwein_d();
    const double dn = d[kBorweinTerms];
    double acc = 0.0;
    for (int k = kBorweinTerms - 1; k >= 0; --k) {
        const double term = (d[k] - dn) * std::pow(static_cast<double>(k + 1), -s);
        acc += (k % 2 == 0) ? term : -term;
    }
    const double eta = -acc / dn;
    // 1 - 2^(1-s), accurate as s -> 1+.
    const double denom = -std::expm1((1.0 - s) * std::numbers::ln2);
    return eta / denom;
}

double bose_integral(double alpha) {
    require_positive(alpha, "bose_integral");
    return gamma(alpha + 1.0) * zeta(alpha + 1.0);
}

double bose_tail_bound(double alpha, double x) {
    if (!(x > alpha)) {
        throw DomainError("bose_tail_bound: requires x > alpha");
    }
    const double incomplete = std::exp(alpha * std::log(x) - x) * x / (x - alpha);
    return incomplete / -std::expm1(-x);
}

double bose_truncation_point(double alpha, double tail_tol) {
    require_positive(alpha, "bose_truncation_point");
    require_positive(tail_tol, "bose_truncation_point tolerance");
    double x = 40.0;
    while (x <= alpha || bose_tail_bound(alpha, x) >= tail_tol) {
        x += 10.0;
    }
    return x;
}

double bose_integral_quadrature(double alpha, const Accuracy& acc) {
    require_positive(alpha, "bose_integral_quadrature");
    acc.validate();
    const double upper = bose_truncation_point(alpha, 0.1 * acc.abs_tol);
    auto integrand = [alpha](double x) {
        return std::exp(alpha * std::log(x) - x) / -std::expm1(-x);
    };
    return integrate(integrand, 0.0, upper, acc, Endpoint::singular_lo);
}

double bose_integral_checked(double alpha, const Accuracy& acc) {
    const double closed = bose_integral(alpha);
    const double quad = bose_integral_quadrature(alpha, acc);
    const double diff = std::abs(closed - quad);
    if (diff > std::max(acc.abs_tol, acc.rel_tol * std::abs(closed))) {
        throw NonConvergenceError("bose_integral: closed form and quadrature disagree", quad, diff);
    }
    return closed;
}

}  // namespace bosefit
