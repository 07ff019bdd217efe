#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bosefit::kinetics {

/// Index of the zero-income reservoir state. It has r = 0, g = 1 and an
/// unbounded population, so exchanges with it change the society's size.
inline constexpr int kReservoir = 0;

/// Discrete income state r_i (index >= 1) with degeneracy g_i.
struct IncomeLevel {
    int index = 1;
    double r = 1.0;
    double g = 1.0;
};

/// Transition channel between an upper state `from_level` and a lower state
/// `to_level` (possibly kReservoir). A is the spontaneous drop coefficient, B
/// the stimulated one; the stimulated raise coefficient is fixed by detailed
/// balance, g_from B = g_to B_raise.
struct RatePair {
    int from_level = 0;
    int to_level = 0;
    double A = 0.0;
    double B = 0.0;
    double B_raise = 0.0;
};

struct Society {
    std::vector<IncomeLevel> levels;
    std::vector<std::int64_t> occupations;
    double beta = 1.0;

    /// Levels indexed 1..L with strictly increasing r > 0 and g > 0,
    /// occupations non-negative and one per level, beta > 0.
    void validate() const;
};

/// Levels with r_i = r[i-1] and unit degeneracy.
std::vector<IncomeLevel> make_levels(const std::vector<double>& incomes,
                                     const std::vector<double>& degeneracies = {});

/// Builds a RatePair and derives B_raise = g_from B / g_to, checking the
/// detailed-balance identity. Throws ValidationError for bad indices, r_from <= r_to
/// or negative coefficients.
RatePair make_rate_pair(const std::vector<IncomeLevel>& levels, int from_level, int to_level, double A,
                        double B);

/// Mean occupation 1 / (e^{beta r} - 1) of a single income state.
/// Throws DomainError unless beta * r > 0.
double mean_occupation(double r, double beta);

/// log prod_i (1 - e^{-beta r_i})^{-g_i}.
double log_partition_function(const std::vector<IncomeLevel>& levels, double beta);

/// exp(log_partition_function); +inf when that overflows.
double partition_function(const std::vector<IncomeLevel>& levels, double beta);

/// g_i / (e^{beta r_i} - 1) per level. g_i = 0 is allowed here.
std::vector<double> equilibrium_density(const std::vector<IncomeLevel>& levels, double beta);

/// Relative residual of the equilibrium condition
///   g_p e^{-beta r_p} (A + B rho) = g_m e^{-beta r_m} B_raise rho
/// with rho = 1 / (e^{beta (r_p - r_m)} - 1). Zero (to rounding) when A == B.
double equilibrium_residual(const std::vector<IncomeLevel>& levels, const RatePair& pair, double beta);

/// Current event rates of a channel.
///   drop  p -> m: n_p g_m (A + B rho_m)
///   raise m -> p: n_m g_m B_raise e^{-beta (r_p - r_m)} (1 + rho_p)
/// with rho_i = n_i / g_i the occupation per degenerate state. The reservoir
/// enters with n g = 1 and rho = 0.
struct ChannelRates {
    double drop = 0.0;
    double raise = 0.0;
};
ChannelRates channel_rates(const Society& society, const RatePair& pair);

struct SimulationOptions {
    double horizon = 1e6;
    /// Time discarded before averaging.
    double burn_in = 1e3;
    /// Number of equal-length batches for the batch-means standard error.
    int batches = 50;
    std::uint64_t seed = 0;
};

struct LevelAverage {
    double mean = 0.0;
    double std_error = 0.0;
};

struct SimulationResult {
    std::vector<LevelAverage> occupations;
    std::vector<std::int64_t> final_occupations;
    std::uint64_t events = 0;
    double end_time = 0.0;
    /// Identifier of the random engine, for reproducibility.
    std::string rng = "mt19937_64";
    std::vector<std::string> warnings;
};

/// Continuous-time Monte Carlo (Gillespie direct method) over the channels:
/// exponential waiting times at the total rate, one transition per event,
/// occupations moved by one. Time-averaged occupations are collected after
/// burn-in. Throws ValidationError for an invalid society/options or when
/// the channels leave a level disconnected. A zero total rate stops the run
/// early with a warning; the state is then held to the horizon.
SimulationResult simulate(const Society& society, const std::vector<RatePair>& pairs,
                          const SimulationOptions& opts);

/// Five levels r_i = i, g_i = 1, beta = 1, starting empty, each level tied
/// to the reservoir and to its neighbours with A = B = 1.
struct Scenario {
    Society society;
    std::vector<RatePair> pairs;
};
Scenario default_scenario();

/// Reservoir links for every level plus nearest-neighbour links, all with
/// coefficients (A, B).
std::vector<RatePair> ladder_pairs(const std::vector<IncomeLevel>& levels, double A, double B);

}  // namespace bosefit::kinetics
