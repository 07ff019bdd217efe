#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bosefit/errors.hpp"
#include "bosefit/special_fn.hpp"

namespace bosefit {

namespace {

// 21-point Kronrod abscissae/weights and the embedded 10-point Gauss weights
// (QUADPACK qk21). Node 10 is the centre.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment kronrod21(const F& f, double lo, double hi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double abs_half = std::abs(half);

    const double fc = f(centre);
    double res_g = 0.0;
    double res_k = kWgk[10] * fc;
    double res_abs = std::abs(res_k);
    std::array<double, 10> fv1{};
    std::array<double, 10> fv2{};

    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += kWgk[j] * (f1 + f2);
        res_abs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        // Odd Kronrod nodes 1, 3, ..., 9 are the Gauss nodes.
        if (j % 2 == 1) {
            res_g += kWg[j / 2] * (f1 + f2);
        }
    }

    const double mean = 0.5 * res_k;
    double res_asc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) {
        res_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }

    const double value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    double err = std::abs((res_k - res_g) * half);
    if (res_asc != 0.0 && err != 0.0) {
        err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
    }
    if (res_abs > uflow / (50.0 * eps)) {
        err = std::max(eps * 50.0 * res_abs, err);
    }
    return {lo, hi, value, err};
}

template <typename F>
QuadratureResult adaptive(const F& f, double lo, double hi, const Accuracy& acc) {
    QuadratureResult out;
    std::priority_queue<Segment> queue;
    // Segments too narrow to bisect further; their error is final.
    double settled_value = 0.0;
    double settled_error = 0.0;

    Segment first = kronrod21(f, lo, hi);
    out.evaluations = 21;
    double total_value = first.value;
    double total_error = first.error;
    queue.push(first);

    auto tolerance = [&] { return std::max(acc.abs_tol, acc.rel_tol * std::abs(total_value)); };

    while (total_error > tolerance() && out.subdivisions < acc.max_subdivisions && !queue.empty()) {
        const Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            settled_value += worst.value;
            settled_error += worst.error;
            continue;
        }
        const Segment left = kronrod21(f, worst.lo, mid);
        const Segment right = kronrod21(f, mid, worst.hi);
        out.evaluations += 42;
        ++out.subdivisions;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum from the segments to shed accumulated update round-off.
    double value = settled_value;
    double error = settled_error;
    while (!queue.empty()) {
        value += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    out.value = value;
    out.error = error;
    out.converged = std::isfinite(value) && error <= std::max(acc.abs_tol, acc.rel_tol * std::abs(value));
    return out;
}

}  // namespace

QuadratureResult integrate_detailed(const std::function<double(double)>& f, double lo, double hi,
                                    const Accuracy& acc, Endpoint endpoint) {
    acc.validate();
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError("integrate: requires finite lo < hi");
    }
    if (endpoint == Endpoint::singular_lo) {
        // x = lo + t^2 turns x^(a-1) near lo into the regular 2 t^(2a-1).
        auto g = [&f, lo](double t) { return t == 0.0 ? 0.0 : 2.0 * t * f(lo + t * t); };
        return adaptive(g, 0.0, std::sqrt(hi - lo), acc);
    }
    return adaptive(f, lo, hi, acc);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, const Accuracy& acc,
                 Endpoint endpoint) {
    const QuadratureResult r = integrate_detailed(f, lo, hi, acc, endpoint);
    if (!r.converged) {
        throw NonConvergenceError("integrate: tolerance not reached after " +
                                      std::to_string(r.subdivisions) + " subdivisions",
                                  r.value, r.error);
    }
    return r.value;
}

}  // namespace bosefit
