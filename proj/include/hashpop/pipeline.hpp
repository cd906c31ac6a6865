#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hashpop/fitting.hpp"
#include "hashpop/moments.hpp"
#include "hashpop/simulator.hpp"
#include "hashpop/types.hpp"

namespace hashpop {

enum class DataFormat { csv, jsonl };

DataFormat parse_format(const std::string& name);

struct Dataset {
    std::vector<TweetRecord> records;  // time-sorted, timestamps from 0
    std::string source_path;
    double epoch = 0.0;  // original timestamp of the first record
};

// Load a tweet-record file. Rows that fail validation are skipped and
// reported as line-numbered diagnostics.
Dataset load_dataset(const std::string& path, DataFormat format,
                     std::vector<std::string>* diagnostics = nullptr);

void write_dataset(const Dataset& ds, const std::string& path,
                   DataFormat format);

// N = distinct users; <f>, <f^2> from one follower count per user (the
// latest observed).
NetworkParams compute_network_params(const Dataset& ds);

// Step series of the cumulative follower sum, the empirical X(t).
TimeSeries empirical_reads(const Dataset& ds);

// Ground-truth generator: shoot events from simulate_events, user ids
// sampled uniformly from N synthetic ids, follower counts = jump sizes.
Dataset synthesize_dataset(const NetworkParams& params,
                           const PopularitySpec& spec,
                           const DegreeDistribution& dist, double horizon,
                           std::uint64_t seed);

struct ValidateOptions {
    int n_bins = 0;      // 0: min(200, max(20, ceil(#records / 50)))
    int smooth_k = 5;    // moving-average window, odd
    double level = 0.95;
};

int default_bin_count(std::size_t n_records);

struct ValidationReport {
    NetworkParams network;
    FitResult fit;
    TimeSeries reads;       // empirical X(t) at record times
    MomentCurves curves;    // model curves at record times
    TimeSeries w_raw;       // binned empirical popularity
    TimeSeries w_smooth;    // after the moving average
    TimeSeries w_fit;       // fitted kernel at the bin midpoints
    double coverage_fraction = 0.0;
    double long_run_limit = 0.0;  // exact large-time limit of E[X]
};

// Full calibration/validation pipeline: network params -> binned w ->
// smoothing -> initial guess -> LM fit -> confidence band -> coverage of
// the empirical reads against the band.
ValidationReport validate(const Dataset& ds, const ValidateOptions& options);

// --- output files (written atomically: tmp + rename) ----------------------

std::string report_to_json(const ValidationReport& report);
void write_report(const ValidationReport& report, const std::string& path);

// curves.csv: t,x_empirical,mean,band_low,band_high
void write_curves_csv(const ValidationReport& report, const std::string& path);

// w.csv: t,w_raw,w_smooth,w_fit
void write_w_csv(const ValidationReport& report, const std::string& path);

// Minimal two-panel SVG (w panel and reads panel).
void write_svg(const ValidationReport& report, const std::string& path);

void atomic_write(const std::string& path, const std::string& content);

// Deterministic shortest-round-trip decimal rendering used by every writer.
std::string format_double(double v);

}  // namespace hashpop
