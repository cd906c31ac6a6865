#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hashpop/errors.hpp"
#include "hashpop/fitting.hpp"
#include "hashpop/moments.hpp"
#include "hashpop/pipeline.hpp"
#include "hashpop/simulator.hpp"
#include "hashpop/types.hpp"

namespace {

using namespace hashpop;

std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

// const:<c> | gamma:<a>,<b>,<c> | tab:<csv with t,w columns>
PopularitySpec parse_pop(const std::string& arg) {
    const auto colon = arg.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--pop", "expected kind:args, e.g. gamma:3,0.5,0.05");
    const std::string kind = arg.substr(0, colon);
    const std::string rest = arg.substr(colon + 1);
    if (kind == "const") {
        return ConstantPopularity{std::stod(rest)};
    }
    if (kind == "gamma") {
        const auto v = split_numbers(rest);
        if (v.size() != 3)
            throw CLI::ValidationError("--pop", "gamma needs a,b,c");
        return GammaKernelPopularity{v[0], v[1], v[2]};
    }
    if (kind == "tab") {
        std::ifstream in(rest);
        if (!in) throw schema_error("cannot open tabulated popularity file " + rest);
        TabulatedPopularity tab;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == 't' || line[0] == '#') continue;
            const auto v = split_numbers(line);
            if (v.size() != 2) throw schema_error("tabulated file rows must be t,w");
            tab.times.push_back(v[0]);
            tab.rates.push_back(v[1]);
        }
        return tab;
    }
    throw CLI::ValidationError("--pop", "unknown popularity kind '" + kind + "'");
}

// degenerate:<k> | discrete:<k>:<p>,<k>:<p>,... | empirical:<file, one count
// per line> | lognormal:<mu>,<sigma> | pareto:<alpha>,<m_min>
DegreeDistribution parse_dist(const std::string& arg) {
    const auto colon = arg.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--dist", "expected kind:args, e.g. degenerate:5");
    const std::string kind = arg.substr(0, colon);
    const std::string rest = arg.substr(colon + 1);
    if (kind == "degenerate") return DegenerateDegree{std::stoll(rest)};
    if (kind == "discrete") {
        DiscreteDegree d;
        std::stringstream ss(rest);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            const auto sep = pair.find(':');
            if (sep == std::string::npos)
                throw CLI::ValidationError("--dist", "discrete entries must be k:p");
            d.support.push_back(std::stoll(pair.substr(0, sep)));
            d.probs.push_back(std::stod(pair.substr(sep + 1)));
        }
        return d;
    }
    if (kind == "empirical") {
        std::ifstream in(rest);
        if (!in) throw schema_error("cannot open empirical degree file " + rest);
        EmpiricalSampleDegree e;
        long long v;
        while (in >> v) e.counts.push_back(v);
        return e;
    }
    if (kind == "lognormal") {
        const auto v = split_numbers(rest);
        if (v.size() != 2) throw CLI::ValidationError("--dist", "lognormal needs mu,sigma");
        return LogNormalDiscretizedDegree{v[0], v[1]};
    }
    if (kind == "pareto") {
        const auto v = split_numbers(rest);
        if (v.size() != 2) throw CLI::ValidationError("--dist", "pareto needs alpha,m_min");
        return ParetoDiscreteDegree{v[0], static_cast<long long>(v[1])};
    }
    throw CLI::ValidationError("--dist", "unknown degree kind '" + kind + "'");
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void write_trace_csv(const EventTrace& trace, const std::string& path) {
    std::ostringstream out;
    out << "t,jump,x\n";
    long long x = 0;
    for (std::size_t i = 0; i < trace.event_times.size(); ++i) {
        x += trace.jump_sizes[i];
        out << format_double(trace.event_times[i]) << ',' << trace.jump_sizes[i]
            << ',' << x << '\n';
    }
    atomic_write(path, out.str());
}

void write_fit_json(const FitResult& fit, const std::string& path) {
    std::ostringstream out;
    out << "{\n"
        << "  \"a\": " << format_double(fit.a) << ",\n"
        << "  \"b\": " << format_double(fit.b) << ",\n"
        << "  \"c\": " << format_double(fit.c) << ",\n"
        << "  \"rmse\": " << format_double(fit.rmse) << ",\n"
        << "  \"r_squared\": " << format_double(fit.r_squared) << ",\n"
        << "  \"iterations\": " << fit.iterations << ",\n"
        << "  \"converged\": " << (fit.converged ? "true" : "false") << "\n"
        << "}\n";
    atomic_write(path, out.str());
}

int run(int argc, char** argv) {
    CLI::App app{"Master-equation model of hashtag popularity: simulation, "
                 "moments, fitting and dataset validation"};
    app.require_subcommand(1);
    app.set_config("--config");

    std::string pop_arg = "const:0.01";
    std::string dist_arg = "degenerate:1";
    std::string format_arg = "csv";
    std::string out_dir = ".";
    std::string input;
    long long n_users = 1000;
    double mean_f = 1.0, mean_f2 = 1.0;
    double horizon = 10.0, level = 0.95;
    std::uint64_t seed = 0;
    int bins = 0, smooth_k = 5, points = 100;
    bool fit_raw = false, svg = false;

    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--n-users", n_users, "community size N");
        cmd->add_option("--pop", pop_arg, "popularity function, kind:args");
        cmd->add_option("--dist", dist_arg, "degree distribution, kind:args");
        cmd->add_option("--horizon", horizon, "simulation horizon");
        cmd->add_option("--seed", seed, "rng seed");
        cmd->add_option("--out-dir", out_dir, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "simulate one event trace");
    add_model(sim);

    auto* synth = app.add_subcommand("synth", "synthesize a tweet-record dataset");
    add_model(synth);
    synth->add_option("--format", format_arg, "csv or jsonl");

    auto* fit_cmd = app.add_subcommand("fit", "extract and fit the popularity function");
    fit_cmd->add_option("--input", input, "dataset file")->required();
    fit_cmd->add_option("--format", format_arg, "csv or jsonl");
    fit_cmd->add_option("--bins", bins, "popularity bins (0 = auto)");
    fit_cmd->add_option("--smooth-k", smooth_k, "moving-average window (odd)");
    fit_cmd->add_flag("--raw", fit_raw, "fit the unsmoothed series");
    fit_cmd->add_option("--out-dir", out_dir, "output directory");

    auto* mom = app.add_subcommand("moments", "analytic mean/variance/band curves");
    mom->add_option("--n-users", n_users, "community size N");
    mom->add_option("--mean-f", mean_f, "mean follower count")->required();
    mom->add_option("--mean-f2", mean_f2, "mean squared follower count")->required();
    mom->add_option("--pop", pop_arg, "popularity function, kind:args");
    mom->add_option("--horizon", horizon, "grid end time");
    mom->add_option("--points", points, "grid size");
    mom->add_option("--level", level, "confidence level");
    mom->add_option("--out-dir", out_dir, "output directory");

    auto* val = app.add_subcommand("validate", "full calibration/validation pipeline");
    val->add_option("--input", input, "dataset file")->required();
    val->add_option("--format", format_arg, "csv or jsonl");
    val->add_option("--bins", bins, "popularity bins (0 = auto)");
    val->add_option("--smooth-k", smooth_k, "moving-average window (odd)");
    val->add_option("--level", level, "confidence level");
    val->add_flag("--svg", svg, "also render panels.svg");
    val->add_option("--out-dir", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        const NetworkParams params{n_users, 1.0, 1.0};
        const auto trace = simulate_events(params, parse_pop(pop_arg),
                                           parse_dist(dist_arg), horizon, seed);
        write_trace_csv(trace, out_path(out_dir, "trace.csv"));
        std::cout << trace.event_times.size() << " events, X(horizon) = "
                  << trace.total() << "\n";
        return 0;
    }

    if (synth->parsed()) {
        const NetworkParams params{n_users, 1.0, 1.0};
        const auto ds = synthesize_dataset(params, parse_pop(pop_arg),
                                           parse_dist(dist_arg), horizon, seed);
        const DataFormat fmt = parse_format(format_arg);
        const std::string name =
            fmt == DataFormat::csv ? "dataset.csv" : "dataset.jsonl";
        write_dataset(ds, out_path(out_dir, name), fmt);
        std::cout << ds.records.size() << " records written\n";
        return 0;
    }

    if (fit_cmd->parsed()) {
        std::vector<std::string> diags;
        const Dataset ds = load_dataset(input, parse_format(format_arg), &diags);
        for (const auto& d : diags) std::cerr << "skipped " << d << "\n";
        const NetworkParams network = compute_network_params(ds);
        const int n_bins = bins > 0 ? bins : default_bin_count(ds.records.size());
        const TimeSeries raw =
            empirical_popularity(ds.records, network.n_users, n_bins);
        const TimeSeries smooth = moving_average(raw, smooth_k);
        const TimeSeries& target = fit_raw ? raw : smooth;
        const FitResult fit = lm_fit_gamma(target, initial_guess(target));
        write_fit_json(fit, out_path(out_dir, "fit.json"));

        std::ostringstream out;
        out << "t,w_raw,w_smooth,w_fit\n";
        const PopularitySpec fitted = GammaKernelPopularity{fit.a, fit.b, fit.c};
        for (std::size_t i = 0; i < raw.times.size(); ++i)
            out << format_double(raw.times[i]) << ',' << format_double(raw.values[i])
                << ',' << format_double(smooth.values[i]) << ','
                << format_double(evaluate_popularity(fitted, raw.times[i])) << '\n';
        atomic_write(out_path(out_dir, "w.csv"), out.str());

        std::cout << "a=" << fit.a << " b=" << fit.b << " c=" << fit.c
                  << (fit.converged ? "" : " (not converged)") << "\n";
        return fit.converged ? 0 : 3;
    }

    if (mom->parsed()) {
        const NetworkParams params{n_users, mean_f, mean_f2};
        const PopularitySpec spec = parse_pop(pop_arg);
        std::vector<double> grid;
        for (int i = 1; i <= points; ++i)
            grid.push_back(horizon * static_cast<double>(i) /
                           static_cast<double>(points));
        const MomentCurves curves = confidence_band(params, spec, grid, level);
        std::ostringstream out;
        out << "t,mean,variance,band_low,band_high\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            out << format_double(curves.times[i]) << ','
                << format_double(curves.mean[i]) << ','
                << format_double(curves.variance[i]) << ','
                << format_double(curves.band_low[i]) << ','
                << format_double(curves.band_high[i]) << '\n';
        atomic_write(out_path(out_dir, "moments.csv"), out.str());
        return 0;
    }

    // validate
    std::vector<std::string> diags;
    const Dataset ds = load_dataset(input, parse_format(format_arg), &diags);
    for (const auto& d : diags) std::cerr << "skipped " << d << "\n";
    ValidateOptions options;
    options.n_bins = bins;
    options.smooth_k = smooth_k;
    options.level = level;
    const ValidationReport report = validate(ds, options);
    write_report(report, out_path(out_dir, "report.json"));
    write_curves_csv(report, out_path(out_dir, "curves.csv"));
    write_w_csv(report, out_path(out_dir, "w.csv"));
    if (svg) write_svg(report, out_path(out_dir, "panels.svg"));
    std::cout << "coverage=" << report.coverage_fraction
              << " a=" << report.fit.a << " b=" << report.fit.b
              << " c=" << report.fit.c
              << (report.fit.converged ? "" : " (not converged)") << "\n";
    return report.fit.converged ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hashpop::schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const hashpop::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const hashpop::no_signal_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
