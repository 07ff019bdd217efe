#include "bosefit/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bosefit/errors.hpp"

namespace bosefit::kinetics {

namespace {

struct State {
    double r;
    double g;
};

State state_of(const std::vector<IncomeLevel>& levels, int index) {
    if (index == kReservoir) {
        return {0.0, 1.0};
    }
    if (index < 1 || index > static_cast<int>(levels.size())) {
        throw ValidationError("rate pair: level index " + std::to_string(index) + " out of range");
    }
    const IncomeLevel& l = levels[static_cast<std::size_t>(index - 1)];
    return {l.r, l.g};
}

// Uniform on (0, 1] from the top 53 bits.
double uniform_open0(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

void check_connected(const Society& society, const std::vector<RatePair>& pairs) {
    const std::size_t n = society.levels.size();
    DisjointSet sets(n + 1);
    bool uses_reservoir = false;
    for (const auto& p : pairs) {
        sets.unite(static_cast<std::size_t>(p.from_level), static_cast<std::size_t>(p.to_level));
        uses_reservoir |= p.to_level == kReservoir;
    }
    const std::size_t root = sets.find(uses_reservoir ? 0 : 1);
    for (std::size_t i = 1; i <= n; ++i) {
        if (sets.find(i) != root) {
            throw ValidationError("simulate: rate graph leaves level " + std::to_string(i) +
                                  " disconnected");
        }
    }
}

}  // namespace

void Society::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ValidationError("society: beta must be finite and > 0");
    }
    if (levels.empty()) {
        throw ValidationError("society: at least one level is required");
    }
    if (occupations.size() != levels.size()) {
        throw ValidationError("society: one occupation per level is required");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const IncomeLevel& l = levels[i];
        if (l.index != static_cast<int>(i + 1)) {
            throw ValidationError("society: levels must be indexed 1..L in order");
        }
        if (!(l.r > 0.0) || !(l.g > 0.0)) {
            throw ValidationError("society: level incomes and degeneracies must be > 0");
        }
        if (i > 0 && !(l.r > levels[i - 1].r)) {
            throw ValidationError("society: level incomes must be strictly increasing");
        }
        if (occupations[i] < 0) {
            throw ValidationError("society: occupations must be >= 0");
        }
    }
}

std::vector<IncomeLevel> make_levels(const std::vector<double>& incomes,
                                     const std::vector<double>& degeneracies) {
    if (!degeneracies.empty() && degeneracies.size() != incomes.size()) {
        throw ValidationError("make_levels: one degeneracy per income is required");
    }
    std::vector<IncomeLevel> levels;
    for (std::size_t i = 0; i < incomes.size(); ++i) {
        levels.push_back({static_cast<int>(i + 1), incomes[i], degeneracies.empty() ? 1.0 : degeneracies[i]});
    }
    return levels;
}

RatePair make_rate_pair(const std::vector<IncomeLevel>& levels, int from_level, int to_level, double A,
                        double B) {
    const State from = state_of(levels, from_level);
    const State to = state_of(levels, to_level);
    if (from_level == kReservoir || !(from.r > to.r)) {
        throw ValidationError("rate pair: requires r_from > r_to");
    }
    if (!(A >= 0.0) || !(B >= 0.0) || !std::isfinite(A) || !std::isfinite(B)) {
        throw ValidationError("rate pair: A and B must be finite and >= 0");
    }
    if (!(from.g > 0.0) || !(to.g > 0.0)) {
        throw ValidationError("rate pair: degeneracies must be > 0");
    }
    RatePair pair{from_level, to_level, A, B, from.g * B / to.g};
    const double lhs = from.g * pair.B;
    const double rhs = to.g * pair.B_raise;
    if (std::abs(lhs - rhs) > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lhs)) {
        throw ValidationError("rate pair: detailed balance violated");
    }
    return pair;
}

double mean_occupation(double r, double beta) {
    const double x = beta * r;
    if (!(x > 0.0)) {
        throw DomainError("mean_occupation: beta * r must be > 0");
    }
    return 1.0 / std::expm1(x);
}

double log_partition_function(const std::vector<IncomeLevel>& levels, double beta) {
    double log_z = 0.0;
    for (const auto& l : levels) {
        const double x = beta * l.r;
        if (!(x > 0.0)) {
            throw DomainError("partition_function: beta * r must be > 0");
        }
        log_z -= l.g * std::log1p(-std::exp(-x));
    }
    return log_z;
}

double partition_function(const std::vector<IncomeLevel>& levels, double beta) {
    return std::exp(log_partition_function(levels, beta));
}

std::vector<double> equilibrium_density(const std::vector<IncomeLevel>& levels, double beta) {
    std::vector<double> out;
    out.reserve(levels.size());
    for (const auto& l : levels) {
        out.push_back(l.g * mean_occupation(l.r, beta));
    }
    return out;
}

double equilibrium_residual(const std::vector<IncomeLevel>& levels, const RatePair& pair, double beta) {
    const State p = state_of(levels, pair.from_level);
    const State m = state_of(levels, pair.to_level);
    const double rho = mean_occupation(p.r - m.r, beta);
    const double drop = p.g * std::exp(-beta * p.r) * (pair.A + pair.B * rho);
    const double raise = m.g * std::exp(-beta * m.r) * pair.B_raise * rho;
    const double scale = std::max(std::abs(drop), std::abs(raise));
    return scale == 0.0 ? 0.0 : (drop - raise) / scale;
}

ChannelRates channel_rates(const Society& society, const RatePair& pair) {
    const auto occupation = [&](int index) {
        return static_cast<double>(society.occupations[static_cast<std::size_t>(index - 1)]);
    };
    const State p = state_of(society.levels, pair.from_level);
    const State m = state_of(society.levels, pair.to_level);
    const double n_p = occupation(pair.from_level);
    const double rho_p = n_p / p.g;

    double n_m_g_m = 1.0;
    double rho_m = 0.0;
    if (pair.to_level != kReservoir) {
        const double n_m = occupation(pair.to_level);
        n_m_g_m = n_m * m.g;
        rho_m = n_m / m.g;
    }
    ChannelRates rates;
    rates.drop = n_p * m.g * (pair.A + pair.B * rho_m);
    rates.raise = n_m_g_m * pair.B_raise * std::exp(-society.beta * (p.r - m.r)) * (1.0 + rho_p);
    return rates;
}

SimulationResult simulate(const Society& society, const std::vector<RatePair>& pairs,
                          const SimulationOptions& opts) {
    society.validate();
    if (!(opts.horizon > 0.0) || !(opts.burn_in >= 0.0) || !(opts.burn_in < opts.horizon) ||
        opts.batches < 2) {
        throw ValidationError("simulate: need 0 <= burn_in < horizon and at least 2 batches");
    }
    if (pairs.empty()) {
        throw ValidationError("simulate: no rate pairs");
    }
    for (const auto& p : pairs) {
        // Re-derive to validate indices, ordering and detailed balance.
        const RatePair check = make_rate_pair(society.levels, p.from_level, p.to_level, p.A, p.B);
        if (std::abs(check.B_raise - p.B_raise) > 1e-12 * std::max(1.0, std::abs(check.B_raise))) {
            throw ValidationError("simulate: B_raise inconsistent with detailed balance");
        }
    }
    check_connected(society, pairs);

    Society state = society;
    const std::size_t n_levels = state.levels.size();
    const auto n_batches = static_cast<std::size_t>(opts.batches);
    const double batch_length = (opts.horizon - opts.burn_in) / static_cast<double>(n_batches);
    std::vector<std::vector<double>> batch_sums(n_batches, std::vector<double>(n_levels, 0.0));

    auto batch_end_of = [&](std::size_t b) {
        return b + 1 == n_batches ? opts.horizon : opts.burn_in + batch_length * static_cast<double>(b + 1);
    };

    // Adds occupation * time over [t0, t1), split across batch boundaries.
    auto accumulate = [&](double t0, double t1) {
        t0 = std::max(t0, opts.burn_in);
        t1 = std::min(t1, opts.horizon);
        while (t0 < t1) {
            auto b = static_cast<std::size_t>((t0 - opts.burn_in) / batch_length);
            b = std::min(b, n_batches - 1);
            // Rounding can leave t0 on the end of batch b; step past it.
            while (b + 1 < n_batches && batch_end_of(b) <= t0) {
                ++b;
            }
            const double batch_end = batch_end_of(b);
            const double seg_end = std::min(t1, batch_end);
            for (std::size_t i = 0; i < n_levels; ++i) {
                batch_sums[b][i] += static_cast<double>(state.occupations[i]) * (seg_end - t0);
            }
            t0 = seg_end;
        }
    };

    SimulationResult result;
    std::mt19937_64 rng(opts.seed);
    std::vector<double> rates(2 * pairs.size());
    double t = 0.0;

    while (t < opts.horizon) {
        double total = 0.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const ChannelRates cr = channel_rates(state, pairs[k]);
            rates[2 * k] = cr.drop;
            rates[2 * k + 1] = cr.raise;
            total += cr.drop + cr.raise;
        }
        if (!(total > 0.0)) {
            result.warnings.push_back("total event rate is zero at t = " + std::to_string(t) +
                                      "; state held to the horizon");
            accumulate(t, opts.horizon);
            t = opts.horizon;
            break;
        }
        const double dt = -std::log(uniform_open0(rng)) / total;
        const double t_next = t + dt;
        accumulate(t, t_next);
        t = t_next;
        if (t >= opts.horizon) {
            break;
        }

        double target = uniform_open0(rng) * total;
        std::size_t chosen = rates.size() - 1;
        for (std::size_t k = 0; k < rates.size(); ++k) {
            if (target <= rates[k] && rates[k] > 0.0) {
                chosen = k;
                break;
            }
            target -= rates[k];
        }
        while (rates[chosen] == 0.0) {
            --chosen;
        }
        const RatePair& pair = pairs[chosen / 2];
        const bool is_drop = chosen % 2 == 0;
        auto& from = state.occupations[static_cast<std::size_t>(pair.from_level - 1)];
        const int delta = is_drop ? -1 : 1;
        from += delta;
        if (pair.to_level != kReservoir) {
            state.occupations[static_cast<std::size_t>(pair.to_level - 1)] -= delta;
        }
        ++result.events;
    }
    result.end_time = std::min(t, opts.horizon);

    result.occupations.resize(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            const double m = batch_sums[b][i] / batch_length;
            sum += m;
            sum_sq += m * m;
        }
        const double nb = static_cast<double>(n_batches);
        const double mean = sum / nb;
        const double var = std::max(0.0, (sum_sq - nb * mean * mean) / (nb - 1.0));
        result.occupations[i] = {mean, std::sqrt(var / nb)};
    }
    result.final_occupations = state.occupations;
    return result;
}

std::vector<RatePair> ladder_pairs(const std::vector<IncomeLevel>& levels, double A, double B) {
    std::vector<RatePair> pairs;
    for (const auto& l : levels) {
        pairs.push_back(make_rate_pair(levels, l.index, kReservoir, A, B));
        if (l.index > 1) {
            pairs.push_back(make_rate_pair(levels, l.index, l.index - 1, A, B));
        }
    }
    return pairs;
}

Scenario default_scenario() {
    Scenario s;
    s.society.levels = make_levels({1.0, 2.0, 3.0, 4.0, 5.0});
    s.society.occupations.assign(s.society.levels.size(), 0);
    s.society.beta = 1.0;
    s.pairs = ladder_pairs(s.society.levels, 1.0, 1.0);
    return s;
}

}  // namespace bosefit::kinetics
