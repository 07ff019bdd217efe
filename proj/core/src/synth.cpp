#include "bosefit/synth.hpp"

#include <algorithm>
#include <random>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

void check_spec(const SynthSpec& spec) {
    spec.params.validate();
    if (spec.edges.size() < 3) {
        throw ValidationError("synth: at least 2 bounded brackets are required");
    }
    if (spec.edges.front() < 0.0) {
        throw ValidationError("synth: edges must be >= 0");
    }
    for (std::size_t i = 1; i < spec.edges.size(); ++i) {
        if (!(spec.edges[i] > spec.edges[i - 1])) {
            throw ValidationError("synth: edges must be strictly increasing");
        }
    }
}

IncomeHistogram with_counts(const SynthSpec& spec, const std::vector<double>& counts) {
    IncomeHistogram h;
    h.year = spec.year;
    const double scale = unit_scale(spec.unit);
    const std::size_t bounded = spec.edges.size() - 1;
    for (std::size_t i = 0; i < bounded; ++i) {
        h.bins.push_back({spec.edges[i] * scale, spec.edges[i + 1] * scale, counts[i]});
    }
    if (spec.open_top) {
        h.bins.push_back({spec.edges.back() * scale, std::nullopt, counts[bounded]});
    }
    return h;
}

}  // namespace

std::vector<double> uniform_edges(double width, std::size_t count) {
    std::vector<double> edges(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        edges[i] = width * static_cast<double>(i);
    }
    return edges;
}

std::vector<double> bracket_probabilities(const SynthSpec& spec, const Accuracy& acc) {
    check_spec(spec);
    const double total = total_population(spec.params, spec.kind);
    std::vector<double> probs;
    double covered = 0.0;
    for (std::size_t i = 0; i + 1 < spec.edges.size(); ++i) {
        const double p = bin_mass(spec.kind, spec.params, spec.edges[i], spec.edges[i + 1], acc) / total;
        probs.push_back(p);
        covered += p;
    }
    if (spec.open_top) {
        // Mass below edges.front() is folded into nothing; edges start at 0 in practice.
        const double head = spec.edges.front() > 0.0
                                ? bin_mass(spec.kind, spec.params, 0.0, spec.edges.front(), acc) / total
                                : 0.0;
        probs.push_back(std::max(0.0, 1.0 - covered - head));
    }
    return probs;
}

IncomeHistogram expected_histogram(const SynthSpec& spec, double households, const Accuracy& acc) {
    if (!(households > 0.0)) {
        throw ValidationError("synth: households must be > 0");
    }
    std::vector<double> counts = bracket_probabilities(spec, acc);
    for (double& c : counts) {
        c *= households;
    }
    return with_counts(spec, counts);
}

IncomeHistogram sample_histogram(const SynthSpec& spec, std::uint64_t households, std::uint64_t seed,
                                 const Accuracy& acc) {
    if (households == 0) {
        throw ValidationError("synth: households must be > 0");
    }
    const std::vector<double> probs = bracket_probabilities(spec, acc);
    std::mt19937_64 rng(seed);

    std::vector<double> counts(probs.size(), 0.0);
    std::uint64_t remaining = households;
    double remaining_prob = 0.0;
    for (double p : probs) {
        remaining_prob += p;
    }
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        std::uint64_t draw = remaining;
        if (i + 1 < probs.size()) {
            const double q = std::clamp(probs[i] / remaining_prob, 0.0, 1.0);
            std::binomial_distribution<std::uint64_t> binom(remaining, q);
            draw = binom(rng);
        }
        counts[i] = static_cast<double>(draw);
        remaining -= draw;
        remaining_prob -= probs[i];
    }
    return with_counts(spec, counts);
}

}  // namespace bosefit
