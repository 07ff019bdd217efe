#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bosefit/ingest.hpp"
#include "bosefit/model.hpp"

namespace bosefit {

/// Bracket layout and generator for synthetic census tables. `edges` and
/// `params` share one income axis; `unit` says which, and the produced
/// histogram is always in dollars.
struct SynthSpec {
    ModelKind kind = ModelKind::BoseEinstein;
    ModelParams params;
    std::vector<double> edges;
    IncomeUnit unit = IncomeUnit::kilodollar;
    /// Append an open bracket [edges.back(), inf) holding the remaining mass.
    bool open_top = true;
    std::optional<int> year;
};

/// `count` brackets of width `width` starting at 0: {0, width, ..., count * width}.
std::vector<double> uniform_edges(double width, std::size_t count);

/// Probability of each bracket (bounded ones first, then the open one when
/// requested) under the model, normalized by its total population.
std::vector<double> bracket_probabilities(const SynthSpec& spec, const Accuracy& acc = {});

/// Counts equal to `households` times the bracket probabilities (fractional).
IncomeHistogram expected_histogram(const SynthSpec& spec, double households, const Accuracy& acc = {});

/// Multinomial draw of `households` over the bracket probabilities, by
/// sequential conditional binomials from a std::mt19937_64 seeded with `seed`.
/// Throws ValidationError for households == 0 or fewer than 2 bounded brackets.
IncomeHistogram sample_histogram(const SynthSpec& spec, std::uint64_t households, std::uint64_t seed,
                                 const Accuracy& acc = {});

}  // namespace bosefit
