#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bosefit {

/// One census bracket in dollars. `upper` is empty for the open (top-coded)
/// bracket. Counts may be fractional (tables in thousands of households).
struct IncomeBin {
    double lower = 0.0;
    std::optional<double> upper;
    double count = 0.0;

    bool is_open() const { return !upper.has_value(); }
    double width() const;

    bool operator==(const IncomeBin&) const = default;
};

/// Contiguous, sorted brackets with at most one open bracket, which is last.
struct IncomeHistogram {
    std::optional<int> year;
    std::vector<IncomeBin> bins;

    double total_households() const;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    bool operator==(const IncomeHistogram&) const = default;
};

/// Income axis used for points and parameters. Files are always in dollars.
enum class IncomeUnit { dollar, kilodollar };

double unit_scale(IncomeUnit unit);
std::string_view to_string(IncomeUnit unit);
IncomeUnit parse_income_unit(std::string_view text);

enum class TopBinPolicy { drop };
enum class Representative { midpoint, mass_integrated };
enum class Weighting { uniform, poisson };

std::string_view to_string(Representative mode);
Representative parse_representative(std::string_view text);

/// Normalized density sample for one bounded bracket. `rho` is the bracket's
/// share of all households divided by its width, so sum(rho * width) plus the
/// dropped open-bracket share is 1.
struct DensityPoint {
    double r = 0.0;
    double rho = 0.0;
    double weight = 1.0;
    double bin_lo = 0.0;
    double bin_hi = 0.0;

    double width() const { return bin_hi - bin_lo; }
};

struct NormalizeOptions {
    TopBinPolicy top_bin = TopBinPolicy::drop;
    IncomeUnit unit = IncomeUnit::kilodollar;
    Weighting weighting = Weighting::uniform;
};

struct NormalizedData {
    std::optional<int> year;
    std::vector<DensityPoint> points;
    /// Share of households in the dropped open bracket.
    double dropped_share = 0.0;
    double total_households = 0.0;
    IncomeUnit unit = IncomeUnit::kilodollar;
};

/// Parses the bracket CSV:
///
///     # year: 2013          (optional metadata comment)
///     lower,upper,households
///     0,5000,4367
///     ...
///     200000,,1500          (open bracket, last row only)
///
/// Lines starting with '#' are comments and blank lines are skipped. When
/// `source_name` ends in `_<year>.csv` that year overrides the metadata.
/// Throws ParseError (with line number) or ValidationError.
IncomeHistogram parse_table(std::istream& in, std::string_view source_name = {});
IncomeHistogram parse_table(std::string_view text, std::string_view source_name = {});
IncomeHistogram parse_table_file(const std::filesystem::path& path);

/// Writes the CSV schema above; parse_table(serialize_table(h)) == h.
std::string serialize_table(const IncomeHistogram& h);

std::optional<int> year_from_filename(std::string_view name);

/// Converts bracket counts to density points on the requested income axis.
/// An empty histogram yields no points; bins with a zero total throw
/// DegenerateDataError.
NormalizedData normalize(const IncomeHistogram& h, const NormalizeOptions& opts = {});

/// Location of a bounded bracket on the income axis. Both modes report the
/// midpoint; in mass_integrated mode the fitter compares bracket averages
/// instead of evaluating the density there. Throws ValidationError for the
/// open bracket.
double representative(const IncomeBin& bin, Representative mode = Representative::midpoint);

}  // namespace bosefit
