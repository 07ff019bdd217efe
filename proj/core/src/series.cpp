#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>

#include "bosefit/errors.hpp"
#include "bosefit/fit.hpp"

namespace bosefit {

namespace {

void run_fit(const NormalizedData& data, const FitOptions& opts, std::optional<FitResult>& out,
             std::string& error) {
    try {
        out = fit(data.points, opts);
    } catch (const std::exception& e) {
        error = e.what();
    }
}

}  // namespace

double YearEntry::population() const {
    if (!be) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return total_population(be->params, ModelKind::BoseEinstein);
}

YearSeries fit_years(std::span<const IncomeHistogram> histograms, const SeriesOptions& opts) {
    std::set<int> seen;
    for (const auto& h : histograms) {
        if (!h.year) {
            throw ValidationError("fit_years: every histogram needs a year");
        }
        if (!seen.insert(*h.year).second) {
            throw ValidationError("fit_years: duplicate year " + std::to_string(*h.year));
        }
    }

    std::vector<std::future<YearEntry>> jobs;
    jobs.reserve(histograms.size());
    for (const auto& h : histograms) {
        jobs.push_back(std::async(std::launch::async, [&h, &opts] {
            YearEntry entry;
            entry.year = *h.year;
            NormalizedData data;
            try {
                data = normalize(h, opts.normalize);
            } catch (const std::exception& e) {
                entry.be_error = entry.gamma_error = e.what();
                return entry;
            }
            entry.dropped_share = data.dropped_share;
            run_fit(data, opts.be, entry.be, entry.be_error);
            run_fit(data, opts.gamma, entry.gamma, entry.gamma_error);
            return entry;
        }));
    }

    YearSeries series;
    for (auto& job : jobs) {
        series.entries.push_back(job.get());
    }
    std::sort(series.entries.begin(), series.entries.end(),
              [](const YearEntry& a, const YearEntry& b) { return a.year < b.year; });
    return series;
}

}  // namespace bosefit
