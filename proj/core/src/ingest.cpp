#include "bosefit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "bosefit/errors.hpp"

namespace bosefit {

namespace {

constexpr std::string_view kHeader = "lower,upper,households";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, const char* name, std::size_t line) {
    double value = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(std::string("invalid ") + name + " '" + std::string(field) + "'", line);
    }
    return value;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::optional<int> year_from_comment(std::string_view comment) {
    static const std::regex pattern(R"(^#\s*year\s*:\s*(\d{4})\s*$)");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(comment.begin(), comment.end(), m, pattern)) {
        return std::stoi(m[1].str());
    }
    return std::nullopt;
}

}  // namespace

double IncomeBin::width() const {
    if (is_open()) {
        throw ValidationError("open bracket has no width");
    }
    return *upper - lower;
}

double IncomeHistogram::total_households() const {
    double total = 0.0;
    for (const auto& b : bins) {
        total += b.count;
    }
    return total;
}

void IncomeHistogram::validate() const {
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const IncomeBin& b = bins[i];
        const std::string where = "bin " + std::to_string(i + 1) + ": ";
        if (!(b.lower >= 0.0)) {
            throw ValidationError(where + "negative lower edge");
        }
        if (!(b.count >= 0.0)) {
            throw ValidationError(where + "negative count");
        }
        if (b.upper && !(*b.upper > b.lower)) {
            throw ValidationError(where + "upper edge must exceed lower edge");
        }
        if (i == 0) {
            continue;
        }
        const IncomeBin& prev = bins[i - 1];
        if (prev.is_open()) {
            throw ValidationError(where + "open bin must be last");
        }
        if (b.lower < prev.lower) {
            throw ValidationError(where + "bins not sorted");
        }
        if (b.lower < *prev.upper) {
            throw ValidationError(where + "overlapping bins");
        }
        if (b.lower > *prev.upper) {
            throw ValidationError(where + "gap between bins");
        }
    }
}

double unit_scale(IncomeUnit unit) { return unit == IncomeUnit::dollar ? 1.0 : 1000.0; }

std::string_view to_string(IncomeUnit unit) {
    return unit == IncomeUnit::dollar ? "dollar" : "kilodollar";
}

IncomeUnit parse_income_unit(std::string_view text) {
    if (text == "dollar") {
        return IncomeUnit::dollar;
    }
    if (text == "kilodollar") {
        return IncomeUnit::kilodollar;
    }
    throw ValidationError("unknown unit '" + std::string(text) + "' (expected dollar or kilodollar)");
}

std::string_view to_string(Representative mode) {
    return mode == Representative::midpoint ? "point" : "mass";
}

Representative parse_representative(std::string_view text) {
    if (text == "point" || text == "midpoint") {
        return Representative::midpoint;
    }
    if (text == "mass" || text == "mass-integrated") {
        return Representative::mass_integrated;
    }
    throw ValidationError("unknown residual mode '" + std::string(text) + "' (expected point or mass)");
}

std::optional<int> year_from_filename(std::string_view name) {
    static const std::regex pattern(R"(_(\d{4})\.csv$)");
    const std::string file = std::filesystem::path(name).filename().string();
    std::smatch m;
    if (std::regex_search(file, m, pattern)) {
        return std::stoi(m[1].str());
    }
    return std::nullopt;
}

IncomeHistogram parse_table(std::istream& in, std::string_view source_name) {
    IncomeHistogram h;
    bool seen_header = false;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (auto y = year_from_comment(line)) {
                h.year = y;
            }
            continue;
        }
        if (!seen_header) {
            if (line != kHeader) {
                throw ParseError("expected header '" + std::string(kHeader) + "'", line_no);
            }
            seen_header = true;
            continue;
        }

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            throw ParseError("expected 3 comma-separated fields", line_no);
        }
        IncomeBin bin;
        bin.lower = parse_number(line.substr(0, c1), "lower", line_no);
        const std::string_view upper = line.substr(c1 + 1, c2 - c1 - 1);
        if (!upper.empty()) {
            bin.upper = parse_number(upper, "upper", line_no);
        }
        bin.count = parse_number(line.substr(c2 + 1), "households", line_no);
        h.bins.push_back(bin);

        try {
            h.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!seen_header) {
        throw ParseError("missing header '" + std::string(kHeader) + "'", 0);
    }
    if (auto y = year_from_filename(source_name)) {
        h.year = y;
    }
    return h;
}

IncomeHistogram parse_table(std::string_view text, std::string_view source_name) {
    std::istringstream in{std::string(text)};
    return parse_table(in, source_name);
}

IncomeHistogram parse_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string(), 0);
    }
    return parse_table(in, path.string());
}

std::string serialize_table(const IncomeHistogram& h) {
    std::string out;
    if (h.year) {
        out += "# year: " + std::to_string(*h.year) + "\n";
    }
    out += kHeader;
    out += '\n';
    for (const auto& b : h.bins) {
        out += format_number(b.lower);
        out += ',';
        if (b.upper) {
            out += format_number(*b.upper);
        }
        out += ',';
        out += format_number(b.count);
        out += '\n';
    }
    return out;
}

double representative(const IncomeBin& bin, Representative /*mode*/) {
    if (bin.is_open()) {
        throw ValidationError("open bracket has no representative income");
    }
    return 0.5 * (bin.lower + *bin.upper);
}

NormalizedData normalize(const IncomeHistogram& h, const NormalizeOptions& opts) {
    h.validate();
    NormalizedData out;
    out.year = h.year;
    out.unit = opts.unit;
    out.total_households = h.total_households();
    if (h.bins.empty()) {
        return out;
    }
    if (!(out.total_households > 0.0)) {
        throw DegenerateDataError("normalize: histogram has no households");
    }

    const double scale = unit_scale(opts.unit);
    const double total = out.total_households;
    for (const auto& b : h.bins) {
        const double share = b.count / total;
        if (b.is_open()) {
            // TopBinPolicy::drop is the only policy.
            out.dropped_share += share;
            continue;
        }
        DensityPoint p;
        p.bin_lo = b.lower / scale;
        p.bin_hi = *b.upper / scale;
        p.r = representative(b) / scale;
        p.rho = share / p.width();
        if (opts.weighting == Weighting::poisson) {
            const double floor = 1.0 / (total * p.width());
            const double sd = std::sqrt(share * (1.0 - share) / total) / p.width();
            const double var = std::max(sd * sd, floor * floor);
            p.weight = 1.0 / var;
        }
        out.points.push_back(p);
    }
    return out;
}

}  // namespace bosefit
