#pragma once

// Reference implementations used only by tests. They share no code with the
// library and favour transparency over speed.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// zeta(s) by direct summation to n terms plus the Euler-Maclaurin tail
/// n^{1-s}/(s-1) - n^{-s}/2 + s n^{-s-1}/12 - s(s+1)(s+2) n^{-s-3}/720.
inline double zeta(double s, int n = 1000000) {
    double sum = 0.0;
    // Summed smallest-first to keep the rounding error near one ulp.
    for (int k = n - 1; k >= 1; --k) {
        sum += std::pow(static_cast<double>(k), -s);
    }
    const double N = n;
    const double tail = std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s) +
                        s * std::pow(N, -s - 1.0) / 12.0 -
                        s * (s + 1.0) * (s + 2.0) * std::pow(N, -s - 3.0) / 720.0;
    return sum + tail;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

/// Simpson with one Richardson step: (16 S(2n) - S(n)) / 15.
inline double simpson_richardson(const std::function<double(double)>& f, double a, double b, int n) {
    return (16.0 * simpson(f, a, b, 2 * n) - simpson(f, a, b, n)) / 15.0;
}

/// integral_0^inf x^alpha / (e^x - 1) dx with x = t^2, which removes the
/// endpoint singularity for every alpha > 0, cut at t = 9 (x = 81).
inline double bose_integral(double alpha) {
    auto f = [alpha](double t) {
        if (t == 0.0) {
            return alpha == 0.5 ? 2.0 : 0.0;  // integrand -> 2 t^{2 alpha - 1}
        }
        const double x = t * t;
        return 2.0 * t * std::pow(x, alpha) / std::expm1(x);
    };
    return simpson_richardson(f, 0.0, 9.0, 200000);
}

/// Central finite difference of g at x with step h.
inline double central_difference(const std::function<double(double)>& g, double x, double h) {
    return (g(x + h) - g(x - h)) / (2.0 * h);
}

/// log prod over levels of sum_n (e^{-beta r} )^{g n}, brute force: the
/// geometric series for each level is summed term by term up to n_max. The
/// second element bounds what was left out.
struct TruncatedPartition {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// Brute-force partition function for unit-degeneracy levels: the sum over
/// all occupation vectors with n_i <= n_max of exp(-beta sum n_i r_i),
/// computed as a nested enumeration.
inline TruncatedPartition partition_sum(const std::vector<double>& r, double beta, int n_max) {
    std::vector<int> n(r.size(), 0);
    double total = 0.0;
    while (true) {
        double energy = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            energy += n[i] * r[i];
        }
        total += std::exp(-beta * energy);
        std::size_t i = 0;
        while (i < n.size() && n[i] == n_max) {
            n[i] = 0;
            ++i;
        }
        if (i == n.size()) {
            break;
        }
        ++n[i];
    }
    // Omitted mass: Z_full - prod_i sum_{n<=n_max} q_i^n, with q_i = e^{-beta r_i}.
    double full = 1.0;
    double kept = 1.0;
    for (double ri : r) {
        const double q = std::exp(-beta * ri);
        full /= 1.0 - q;
        kept *= (1.0 - std::pow(q, n_max + 1)) / (1.0 - q);
    }
    return {total, full - kept};
}

}  // namespace oracle
