#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "bosefit/errors.hpp"
#include "bosefit/special_fn.hpp"
#include "oracles.hpp"

using namespace bosefit;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Gamma, MatchesStdTgammaAcrossRange) {
    for (double x = 0.05; x < 170.0; x *= 1.07) {
        EXPECT_LT(rel_err(bosefit::gamma(x), std::tgamma(x)), 1e-13) << "x = " << x;
    }
}

TEST(Gamma, HalfIntegerValues) {
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    EXPECT_LT(rel_err(bosefit::gamma(0.5), sqrt_pi), 1e-14);
    EXPECT_LT(rel_err(bosefit::gamma(2.5), 0.75 * sqrt_pi), 1e-14);
    EXPECT_LT(rel_err(bosefit::gamma(3.5), 1.875 * sqrt_pi), 1e-14);
    EXPECT_LT(rel_err(bosefit::gamma(2.5), 1.329340388179137), 1e-14);
    EXPECT_LT(rel_err(bosefit::gamma(3.5), 3.3233509704478426), 1e-14);
}

TEST(Gamma, IntegerFactorials) {
    double fact = 1.0;
    for (int n = 1; n <= 20; ++n) {
        EXPECT_LT(rel_err(bosefit::gamma(n), fact), 1e-14) << n;
        fact *= n;
    }
}

TEST(Gamma, Recurrence) {
    for (double x = 0.1; x < 50.0; x += 0.37) {
        EXPECT_LT(rel_err(bosefit::gamma(x + 1.0), x * bosefit::gamma(x)), 2e-14) << x;
    }
}

TEST(Gamma, DomainAndOverflow) {
    EXPECT_THROW(bosefit::gamma(0.0), DomainError);
    EXPECT_THROW(bosefit::gamma(-1.5), DomainError);
    EXPECT_THROW(bosefit::gamma(std::nan("")), DomainError);
    EXPECT_NO_THROW(bosefit::gamma(171.6));
    EXPECT_THROW(bosefit::gamma(171.7), OverflowError);
    EXPECT_THROW(bosefit::gamma(1000.0), OverflowError);
}

TEST(LogGamma, MatchesStdLgamma) {
    for (double x = 0.05; x < 1e6; x *= 1.3) {
        EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
    }
    EXPECT_TRUE(std::isfinite(log_gamma(1e300)));
    EXPECT_THROW(log_gamma(0.0), DomainError);
}

TEST(Zeta, MatchesDirectSummation) {
    for (double s : {1.5, 2.0, 2.5, 3.0, 3.5, 5.0, 8.0, 12.0}) {
        EXPECT_LT(rel_err(zeta(s), oracle::zeta(s)), 1e-13) << "s = " << s;
    }
}

TEST(Zeta, KnownValues) {
    const double pi = std::numbers::pi;
    EXPECT_LT(rel_err(zeta(2.0), pi * pi / 6.0), 1e-15);
    EXPECT_LT(rel_err(zeta(4.0), std::pow(pi, 4) / 90.0), 1e-15);
    EXPECT_LT(rel_err(zeta(2.5), 1.341487257250917), 1e-14);
    EXPECT_LT(rel_err(zeta(3.5), 1.126733867317057), 1e-14);
    EXPECT_LT(rel_err(zeta(30.0), 1.0000000009313274), 1e-15);
}

TEST(Zeta, NearPoleAndLargeArgument) {
    // zeta(1 + e) ~ 1/e + gamma_E.
    const double e = 1e-6;
    EXPECT_LT(rel_err(zeta(1.0 + e), 1.0 / e + 0.5772156649015329), 1e-6);
    EXPECT_NEAR(zeta(200.0), 1.0, 1e-15);
}

TEST(Zeta, Domain) {
    EXPECT_THROW(zeta(1.0), DomainError);
    EXPECT_THROW(zeta(0.5), DomainError);
    EXPECT_THROW(zeta(std::nan("")), DomainError);
}

TEST(BoseIntegral, ClosedFormReferenceValues) {
    EXPECT_LT(rel_err(bose_integral(0.5), 2.315157373394117), 1e-13);
    EXPECT_LT(rel_err(bose_integral(1.0), std::numbers::pi * std::numbers::pi / 6.0), 1e-14);
    EXPECT_LT(rel_err(bose_integral(1.5), 1.7832931912913001), 1e-13);
    EXPECT_LT(rel_err(bose_integral(2.0), 2.4041138063191886), 1e-13);
    EXPECT_LT(rel_err(bose_integral(2.5), 3.744532091384591), 1e-13);
}

TEST(BoseIntegral, QuadratureAgreesWithClosedFormAndOracle) {
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5, 4.0, 7.5}) {
        const double closed = bose_integral(alpha);
        EXPECT_LT(rel_err(bose_integral_quadrature(alpha), closed), 1e-10) << alpha;
        EXPECT_LT(rel_err(closed, std::tgamma(alpha + 1.0) * oracle::zeta(alpha + 1.0)), 1e-12) << alpha;
        EXPECT_LT(rel_err(oracle::bose_integral(alpha), closed), 1e-9) << alpha;
    }
}

TEST(BoseIntegral, CheckedRouteReturnsClosedForm) {
    EXPECT_EQ(bose_integral_checked(1.5), bose_integral(1.5));
}

TEST(BoseIntegral, QuadratureIsFast) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        (void)bose_integral_quadrature(alpha);
    }
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(BoseIntegral, Domain) {
    EXPECT_THROW(bose_integral(0.0), DomainError);
    EXPECT_THROW(bose_integral(-0.5), DomainError);
}

TEST(TruncationPoint, TailBoundHoldsAndLadder) {
    for (double alpha : {0.5, 1.5, 3.0, 10.0}) {
        for (double tol : {1e-8, 1e-14, 1e-20}) {
            const double x = bose_truncation_point(alpha, tol);
            EXPECT_EQ(std::fmod(x, 10.0), 0.0);
            EXPECT_GE(x, 40.0);
            EXPECT_LE(bose_tail_bound(alpha, x), tol);
            // The bound really bounds the tail.
            const double tail = integrate([alpha](double t) { return std::pow(t, alpha) / std::expm1(t); }, x,
                                          x + 200.0, Accuracy{1e-300, 1e-10, 500});
            EXPECT_LE(tail, bose_tail_bound(alpha, x));
        }
    }
}

TEST(Quadrature, ExactForPolynomials) {
    const double v = integrate([](double x) { return 3 * x * x + 2 * x + 1; }, 0.0, 2.0);
    EXPECT_NEAR(v, 8.0 + 4.0 + 2.0, 1e-13);
}

TEST(Quadrature, SmoothAndOscillatory) {
    EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-13);
    EXPECT_NEAR(integrate([](double x) { return std::sin(50 * x); }, 0.0, std::numbers::pi), 0.0, 1e-12);
}

TEST(Quadrature, SingularLowerEndpoint) {
    auto f = [](double x) { return 1.0 / std::sqrt(x); };
    const auto r = integrate_detailed(f, 0.0, 4.0, {}, Endpoint::singular_lo);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 4.0, 1e-12);
}

TEST(Quadrature, ReportsNonConvergence) {
    auto f = [](double x) { return std::sin(1.0 / x); };
    Accuracy acc{1e-15, 1e-15, 3};
    const auto r = integrate_detailed(f, 1e-4, 1.0, acc);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.subdivisions, 3u);
    try {
        integrate(f, 1e-4, 1.0, acc);
        FAIL() << "expected NonConvergenceError";
    } catch (const NonConvergenceError& e) {
        EXPECT_TRUE(std::isfinite(e.estimate()));
        EXPECT_GT(e.error_bound(), 0.0);
    }
}

TEST(Quadrature, RejectsBadInputs) {
    auto f = [](double x) { return x; };
    EXPECT_THROW(integrate(f, 1.0, 0.0), DomainError);
    EXPECT_THROW(integrate(f, 0.0, std::numeric_limits<double>::infinity()), DomainError);
    EXPECT_THROW(integrate(f, 0.0, 1.0, Accuracy{-1.0, 1e-12, 10}), DomainError);
}
