#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "bosefit/errors.hpp"
#include "bosefit/fit.hpp"
#include "bosefit/ingest.hpp"
#include "bosefit/kinetics.hpp"
#include "bosefit/model.hpp"
#include "bosefit/report.hpp"
#include "bosefit/synth.hpp"

namespace bosefit::cli {

namespace {

using nlohmann::json;

/// Thrown for bad input files or flag combinations; maps to exit 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string model = "be";
    std::optional<double> fix_alpha;
    std::string residuals = "mass";
    std::string top_bin = "drop";
    std::string unit = "kilodollar";
    std::string weights = "uniform";
    std::string out;
    std::string format = "json";
    int max_iterations = 200;
};

struct LoadedTable {
    std::string path;
    IncomeHistogram histogram;
    NormalizedData data;
};

void add_unit(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--unit", f.unit, "Income unit for reported values")
        ->check(CLI::IsMember({"dollar", "kilodollar"}))
        ->capture_default_str();
}

void add_table_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--residuals", f.residuals, "Residual mode")
        ->check(CLI::IsMember({"point", "mass"}))
        ->capture_default_str();
    cmd->add_option("--top-bin", f.top_bin, "Policy for the open top bracket")
        ->check(CLI::IsMember({"drop"}))
        ->capture_default_str();
    cmd->add_option("--weights", f.weights, "Residual weights")
        ->check(CLI::IsMember({"uniform", "poisson"}))
        ->capture_default_str();
    add_unit(cmd, f);
    cmd->add_option("--max-iterations", f.max_iterations, "Iteration limit of the fitter")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--out", f.out, "Write the report to this path instead of stdout");
}

NormalizeOptions normalize_options(const CommonFlags& f) {
    NormalizeOptions o;
    o.top_bin = TopBinPolicy::drop;
    o.unit = IncomeUnit::kilodollar;
    o.weighting = f.weights == "poisson" ? Weighting::poisson : Weighting::uniform;
    return o;
}

FitOptions fit_options(const CommonFlags& f) {
    FitOptions o;
    o.model = parse_model_kind(f.model);
    o.fix_alpha = f.fix_alpha;
    o.residual_mode = parse_representative(f.residuals);
    o.max_iterations = f.max_iterations;
    return o;
}

LoadedTable load_table(const std::string& path, const NormalizeOptions& opts) {
    try {
        LoadedTable t{path, parse_table_file(path), {}};
        t.data = normalize(t.histogram, opts);
        return t;
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const DegenerateDataError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::vector<LoadedTable> load_tables(const std::vector<std::string>& paths, const NormalizeOptions& opts,
                                     std::ostream& err) {
    std::vector<LoadedTable> tables;
    bool failed = false;
    for (const auto& p : paths) {
        try {
            tables.push_back(load_table(p, opts));
            if (tables.back().data.dropped_share > 0.0) {
                err << "warning: " << p << ": dropped open top bracket holding "
                    << tables.back().data.dropped_share << " of households\n";
            }
        } catch (const InputError& e) {
            err << "error: " << e.what() << '\n';
            failed = true;
        }
    }
    if (failed) {
        throw InputError("input validation failed");
    }
    // Output order: by year, then by file name.
    std::stable_sort(tables.begin(), tables.end(), [](const LoadedTable& a, const LoadedTable& b) {
        const int ya = a.data.year.value_or(std::numeric_limits<int>::max());
        const int yb = b.data.year.value_or(std::numeric_limits<int>::max());
        return ya != yb ? ya < yb : a.path < b.path;
    });
    return tables;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot write " + path);
    }
    file << text;
}

struct FitOutcome {
    std::optional<FitResult> result;
    std::string error;
    // Failure caused by the data rather than by the optimizer.
    bool bad_input = false;
};

FitOutcome fit_safely(const NormalizedData& data, const FitOptions& opts) {
    try {
        return {fit(data.points, opts), {}, false};
    } catch (const ValidationError& e) {
        return {std::nullopt, e.what(), true};
    } catch (const DegenerateDataError& e) {
        return {std::nullopt, e.what(), true};
    } catch (const std::exception& e) {
        return {std::nullopt, e.what(), false};
    }
}

// Fits each table concurrently; results come back in table order.
std::vector<FitOutcome> fit_all(const std::vector<LoadedTable>& tables, const FitOptions& opts) {
    std::vector<std::future<FitOutcome>> jobs;
    for (const auto& t : tables) {
        jobs.push_back(std::async(std::launch::async, [&t, &opts] { return fit_safely(t.data, opts); }));
    }
    std::vector<FitOutcome> results;
    for (auto& j : jobs) {
        results.push_back(j.get());
    }
    return results;
}

std::string fit_csv_header() {
    return "year,model,c,alpha,beta,r_squared,converged,iterations,objective,dropped_top_share\n";
}

std::string fit_csv_row(const FitReport& r) {
    return (r.year ? std::to_string(*r.year) : std::string()) + ',' + std::string(to_string(r.model)) +
           ',' + format_double(r.params.c) + ',' + format_double(r.params.alpha) + ',' +
           format_double(r.params.beta) + ',' + format_double(r.r_squared) + ',' +
           (r.converged ? "true" : "false") + ',' + std::to_string(r.iterations) + ',' +
           format_double(r.objective) + ',' + format_double(r.dropped_top_share) + '\n';
}

int run_fit(const std::vector<std::string>& files, const CommonFlags& f, std::ostream& out,
            std::ostream& err) {
    const NormalizeOptions nopts = normalize_options(f);
    const FitOptions fopts = fit_options(f);
    const auto tables = load_tables(files, nopts, err);
    const auto outcomes = fit_all(tables, fopts);
    const IncomeUnit unit = parse_income_unit(f.unit);

    int status = kSuccess;
    json reports = json::array();
    std::string csv = fit_csv_header();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (!outcomes[i].result) {
            err << "error: " << tables[i].path << ": fit failed: " << outcomes[i].error << '\n';
            status = std::max(status, outcomes[i].bad_input ? int{kInputError} : int{kNonConvergence});
            continue;
        }
        const FitReport report =
            make_fit_report(*outcomes[i].result, tables[i].data, fopts, unit, nopts.weighting, tables[i].path);
        if (!report.converged) {
            err << "warning: " << tables[i].path << ": fit did not converge ("
                << outcomes[i].result->stop_reason << ")\n";
            status = std::max(status, int{kNonConvergence});
        }
        reports.push_back(to_json(report));
        csv += fit_csv_row(report);
    }
    if (f.format == "csv") {
        emit(csv, f.out, out);
    } else {
        const json doc = reports.size() == 1 ? reports[0] : reports;
        emit(doc.dump(2) + "\n", f.out, out);
    }
    return status;
}

int run_compare(const std::vector<std::string>& files, const CommonFlags& f, std::ostream& out,
                std::ostream& err) {
    const NormalizeOptions nopts = normalize_options(f);
    const auto tables = load_tables(files, nopts, err);

    FitOptions be = fit_options(f);
    be.model = ModelKind::BoseEinstein;
    be.fix_alpha = f.fix_alpha;
    FitOptions gam = fit_options(f);
    gam.model = ModelKind::Gamma;
    gam.fix_alpha = 1.0;

    const auto be_fits = fit_all(tables, be);
    const auto gamma_fits = fit_all(tables, gam);

    int status = kSuccess;
    std::string csv = "year,r2_be,r2_gamma\n";
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto r2 = [&](const FitOutcome& o, const char* name) {
            if (!o.result) {
                err << "error: " << tables[i].path << ": " << name << " fit failed: " << o.error << '\n';
                status = std::max(status, o.bad_input ? int{kInputError} : int{kNonConvergence});
                return std::numeric_limits<double>::quiet_NaN();
            }
            if (!o.result->converged) {
                err << "warning: " << tables[i].path << ": " << name << " fit did not converge\n";
                status = std::max(status, int{kNonConvergence});
            }
            return o.result->r_squared;
        };
        const double r2_be = r2(be_fits[i], "be");
        const double r2_gamma = r2(gamma_fits[i], "gamma");
        const auto& year = tables[i].data.year;
        csv += (year ? std::to_string(*year) : std::string()) + ',' + format_double(r2_be) + ',' +
               format_double(r2_gamma) + '\n';
    }
    emit(csv, f.out, out);
    return status;
}

int run_series(const std::vector<std::string>& files, const CommonFlags& f, std::ostream& out,
               std::ostream& err) {
    std::vector<IncomeHistogram> histograms;
    for (const auto& t : load_tables(files, normalize_options(f), err)) {
        if (!t.histogram.year) {
            throw InputError(t.path + ": no year (use a '# year: YYYY' comment or *_YYYY.csv name)");
        }
        histograms.push_back(t.histogram);
    }
    SeriesOptions opts;
    opts.normalize = normalize_options(f);
    opts.be = fit_options(f);
    opts.be.model = ModelKind::BoseEinstein;
    opts.gamma.residual_mode = opts.be.residual_mode;
    opts.gamma.max_iterations = opts.be.max_iterations;

    YearSeries series;
    try {
        series = fit_years(histograms, opts);
    } catch (const ValidationError& e) {
        throw InputError(e.what());
    }
    int status = kSuccess;
    for (const auto& e : series.entries) {
        const bool ok = e.be && e.be->converged && e.gamma && e.gamma->converged;
        if (!ok) {
            err << "warning: " << e.year << ": "
                << (e.be_error.empty() ? (e.gamma_error.empty() ? "fit did not converge" : e.gamma_error)
                                       : e.be_error)
                << '\n';
            status = kNonConvergence;
        }
    }
    const IncomeUnit unit = parse_income_unit(f.unit);
    if (f.format == "csv") {
        emit(series_csv(series, unit), f.out, out);
    } else {
        emit(to_json(series, unit).dump(2) + "\n", f.out, out);
    }
    return status;
}

struct SynthFlags {
    std::string model = "be";
    std::optional<double> c;
    double alpha = 1.5;
    double beta = 0.035;
    double bin_width = 2.5;
    std::size_t bins = 40;
    std::uint64_t households = 1000000;
    std::optional<std::uint64_t> seed;
    std::optional<int> year;
    bool no_open_top = false;
    bool expected = false;
    std::string unit = "kilodollar";
    std::string out;
};

int run_synth(const SynthFlags& f, std::ostream& out) {
    SynthSpec spec;
    spec.kind = parse_model_kind(f.model);
    spec.unit = parse_income_unit(f.unit);
    spec.params = {1.0, f.alpha, f.beta};
    try {
        spec.params.c = f.c.value_or(scale_for_population(1.0, f.alpha, f.beta, spec.kind));
        spec.params.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("invalid parameters: ") + e.what());
    }
    if (!(f.bin_width > 0.0)) {
        throw InputError("--bin-width must be > 0");
    }
    spec.edges = uniform_edges(f.bin_width, f.bins);
    spec.open_top = !f.no_open_top;
    spec.year = f.year;
    try {
        const IncomeHistogram h = f.expected
                                      ? expected_histogram(spec, static_cast<double>(f.households))
                                      : sample_histogram(spec, f.households, f.seed.value_or(0));
        emit(serialize_table(h), f.out, out);
    } catch (const ValidationError& e) {
        throw InputError(e.what());
    }
    return kSuccess;
}

int run_plotdata(const std::string& file, const std::string& report_path, const CommonFlags& f,
                 std::ostream& out, std::ostream& err) {
    const LoadedTable table = load_table(file, normalize_options(f));
    std::ifstream in(report_path);
    if (!in) {
        throw InputError("cannot open report " + report_path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(report_path + ": " + e.what());
    }
    if (doc.is_array()) {
        // Pick the entry for this table's year.
        const auto it = std::find_if(doc.begin(), doc.end(), [&](const json& j) {
            return j.contains("year") && !j["year"].is_null() && table.data.year &&
                   j["year"].get<int>() == *table.data.year;
        });
        if (it == doc.end()) {
            throw InputError(report_path + ": no report for the table's year");
        }
        doc = *it;
    }
    FitReport report;
    try {
        report = fit_report_from_json(doc);
    } catch (const ParseError& e) {
        throw InputError(report_path + ": " + e.what());
    }
    if (report.year && table.data.year && *report.year != *table.data.year) {
        throw InputError("year mismatch: table is " + std::to_string(*table.data.year) + ", report is " +
                         std::to_string(*report.year));
    }

    const ModelParams params = canonical_params(report);
    const auto model = model_values(table.data.points, report.model, params, report.residual_mode);
    // Points are on the kilo-dollar axis; present them on --unit.
    const double s = unit_scale(parse_income_unit(f.unit)) / 1000.0;
    std::string csv = "r,rho_empirical,rho_model\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& pt = table.data.points[i];
        csv += format_double(pt.r / s) + ',' + format_double(pt.rho * s) + ',' + format_double(model[i] * s) +
               '\n';
    }
    (void)err;
    emit(csv, f.out, out);
    return kSuccess;
}

struct SimulateFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::optional<double> burn_in;
    std::optional<int> batches;
    std::string out;
};

kinetics::Scenario load_scenario(const std::string& path, kinetics::SimulationOptions& opts) {
    kinetics::Scenario s = kinetics::default_scenario();
    if (path.empty()) {
        return s;
    }
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config " + path);
    }
    try {
        const json cfg = json::parse(in);
        if (!cfg.is_object()) {
            throw InputError(path + ": config must be a JSON object");
        }
        if (cfg.contains("levels")) {
            std::vector<double> r;
            std::vector<double> g;
            for (const auto& l : cfg.at("levels")) {
                r.push_back(l.at("r").get<double>());
                g.push_back(l.value("g", 1.0));
            }
            s.society.levels = kinetics::make_levels(r, g);
            s.society.occupations.assign(r.size(), 0);
            s.pairs = kinetics::ladder_pairs(s.society.levels, 1.0, 1.0);
        }
        s.society.beta = cfg.value("beta", s.society.beta);
        if (cfg.contains("occupations")) {
            s.society.occupations = cfg.at("occupations").get<std::vector<std::int64_t>>();
        }
        if (cfg.contains("pairs")) {
            s.pairs.clear();
            for (const auto& p : cfg.at("pairs")) {
                s.pairs.push_back(kinetics::make_rate_pair(s.society.levels, p.at("from").get<int>(),
                                                           p.at("to").get<int>(), p.value("A", 1.0),
                                                           p.value("B", 1.0)));
            }
        }
        opts.horizon = cfg.value("horizon", opts.horizon);
        opts.burn_in = cfg.value("burn_in", opts.burn_in);
        opts.batches = cfg.value("batches", opts.batches);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw InputError(path + ": " + e.what());
    }
    return s;
}

int run_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
    if (!f.seed) {
        throw InputError("simulate: --seed is required");
    }
    kinetics::SimulationOptions opts;
    const kinetics::Scenario scenario = load_scenario(f.config, opts);
    opts.seed = *f.seed;
    if (f.horizon) {
        opts.horizon = *f.horizon;
    }
    if (f.burn_in) {
        opts.burn_in = *f.burn_in;
    }
    if (f.batches) {
        opts.batches = *f.batches;
    }
    kinetics::SimulationResult result;
    try {
        result = kinetics::simulate(scenario.society, scenario.pairs, opts);
    } catch (const ValidationError& e) {
        throw InputError(e.what());
    }
    for (const auto& w : result.warnings) {
        err << "warning: " << w << '\n';
    }
    emit(to_json(scenario.society, opts, result).dump(2) + "\n", f.out, out);
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fit and verify Bose-Einstein household income densities", "bosefit"};
    app.require_subcommand(1);

    CommonFlags fit_flags;
    std::vector<std::string> fit_files;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one density family to each table");
    fit_cmd->add_option("files", fit_files, "Bracket CSV files")->required();
    fit_cmd->add_option("--model", fit_flags.model, "Density family")
        ->check(CLI::IsMember({"be", "gamma"}))
        ->capture_default_str();
    fit_cmd->add_option("--fix-alpha", fit_flags.fix_alpha, "Pin the exponent alpha");
    fit_cmd->add_option("--format", fit_flags.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    add_table_flags(fit_cmd, fit_flags);

    CommonFlags cmp_flags;
    cmp_flags.format = "csv";
    std::vector<std::string> cmp_files;
    auto* cmp_cmd = app.add_subcommand("compare", "R^2 of BE vs gamma (alpha = 1) per table, as CSV");
    cmp_cmd->add_option("files", cmp_files, "Bracket CSV files")->required();
    cmp_cmd->add_option("--fix-alpha", cmp_flags.fix_alpha, "Pin alpha of the BE fit");
    cmp_cmd->add_option("--format", cmp_flags.format, "Report format")->check(CLI::IsMember({"csv"}));
    add_table_flags(cmp_cmd, cmp_flags);

    CommonFlags ser_flags;
    std::vector<std::string> ser_files;
    auto* ser_cmd = app.add_subcommand("series", "Per-year parameter series for BE and gamma fits");
    ser_cmd->add_option("files", ser_files, "Bracket CSV files, one per year")->required();
    ser_cmd->add_option("--fix-alpha", ser_flags.fix_alpha, "Pin alpha of the BE fits");
    ser_cmd->add_option("--format", ser_flags.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    add_table_flags(ser_cmd, ser_flags);

    SynthFlags syn;
    auto* syn_cmd = app.add_subcommand("synth", "Sample a synthetic bracket table from a model");
    syn_cmd->add_option("--model", syn.model, "Density family")
        ->check(CLI::IsMember({"be", "gamma"}))
        ->capture_default_str();
    syn_cmd->add_option("--c", syn.c, "Scale c (default: normalized to unit population)");
    syn_cmd->add_option("--alpha", syn.alpha, "Exponent alpha")->capture_default_str();
    syn_cmd->add_option("--beta", syn.beta, "Inverse income scale beta, per --unit")->capture_default_str();
    syn_cmd->add_option("--bin-width", syn.bin_width, "Bracket width, in --unit")->capture_default_str();
    syn_cmd->add_option("--bins", syn.bins, "Number of bounded brackets")->capture_default_str();
    syn_cmd->add_option("--households", syn.households, "Households to sample")->capture_default_str();
    syn_cmd->add_option("--seed", syn.seed, "Random seed")->required();
    syn_cmd->add_option("--year", syn.year, "Year written as metadata");
    syn_cmd->add_flag("--no-open-top", syn.no_open_top, "Omit the open top bracket");
    syn_cmd->add_flag("--expected", syn.expected, "Write expected (fractional) counts instead of a sample");
    syn_cmd->add_option("--unit", syn.unit, "Unit of --beta and --bin-width")
        ->check(CLI::IsMember({"dollar", "kilodollar"}))
        ->capture_default_str();
    syn_cmd->add_option("--out", syn.out, "Output path");

    CommonFlags plot_flags;
    std::string plot_file;
    std::string plot_report;
    auto* plot_cmd = app.add_subcommand("plotdata", "Empirical and model density per bracket, as CSV");
    plot_cmd->add_option("file", plot_file, "Bracket CSV file")->required();
    plot_cmd->add_option("--report", plot_report, "Fit report (JSON) for this table")->required();
    plot_cmd->add_option("--top-bin", plot_flags.top_bin, "Policy for the open top bracket")
        ->check(CLI::IsMember({"drop"}));
    add_unit(plot_cmd, plot_flags);
    plot_cmd->add_option("--out", plot_flags.out, "Output path");

    SimulateFlags sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Kinetic Monte Carlo of income-level occupations");
    sim_cmd->add_option("config", sim.config, "JSON config (default: five-level scenario)");
    sim_cmd->add_option("--seed", sim.seed, "Random seed (required)");
    sim_cmd->add_option("--horizon", sim.horizon, "Simulated time");
    sim_cmd->add_option("--burn-in", sim.burn_in, "Time discarded before averaging");
    sim_cmd->add_option("--batches", sim.batches, "Batches for standard errors");
    std::string sim_format = "json";
    sim_cmd->add_option("--format", sim_format, "Report format")->check(CLI::IsMember({"json"}));
    sim_cmd->add_option("--out", sim.out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (fit_cmd->parsed()) {
            return run_fit(fit_files, fit_flags, out, err);
        }
        if (cmp_cmd->parsed()) {
            return run_compare(cmp_files, cmp_flags, out, err);
        }
        if (ser_cmd->parsed()) {
            return run_series(ser_files, ser_flags, out, err);
        }
        if (syn_cmd->parsed()) {
            return run_synth(syn, out);
        }
        if (plot_cmd->parsed()) {
            return run_plotdata(plot_file, plot_report, plot_flags, out, err);
        }
        if (sim_cmd->parsed()) {
            return run_simulate(sim, out, err);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNonConvergence;
    }
    return kInputError;
}

}  // namespace bosefit::cli
