#include "hashpop/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "hashpop/errors.hpp"

namespace hashpop {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool parse_iso8601(const std::string& raw, double& out) {
    // YYYY-MM-DDTHH:MM:SS[.frac][Z|+00:00], UTC only.
    const std::string s = trim(raw);
    int y, mo, d, h, mi;
    double sec;
    char t_sep;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf%n", &y, &mo, &d, &t_sep, &h,
                    &mi, &sec, &consumed) != 7)
        return false;
    if (t_sep != 'T' && t_sep != ' ') return false;
    const std::string tail = trim(s.substr(static_cast<std::size_t>(consumed)));
    if (!(tail.empty() || tail == "Z" || tail == "+00:00")) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59 || sec < 0.0 || sec >= 61.0)
        return false;
    out = static_cast<double>(days_from_civil(y, static_cast<unsigned>(mo),
                                              static_cast<unsigned>(d))) *
              86400.0 +
          h * 3600.0 + mi * 60.0 + sec;
    return true;
}

bool parse_number(const std::string& raw, double& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

enum class StampKind { unknown, epoch_seconds, iso8601 };

// Parses a timestamp, enforcing one consistent encoding per file.
bool parse_stamp(const std::string& raw, StampKind& kind, double& out,
                 std::string& error) {
    double v;
    if (parse_number(raw, v)) {
        if (kind == StampKind::iso8601) {
            error = "mixed epoch-seconds and ISO-8601 timestamps";
            return false;
        }
        kind = StampKind::epoch_seconds;
        out = v;
        return true;
    }
    if (parse_iso8601(raw, v)) {
        if (kind == StampKind::epoch_seconds) {
            error = "mixed epoch-seconds and ISO-8601 timestamps";
            return false;
        }
        kind = StampKind::iso8601;
        out = v;
        return true;
    }
    error = "unparseable created_at value '" + trim(raw) + "'";
    return false;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

void finalize_dataset(Dataset& ds) {
    if (ds.records.empty())
        throw empty_input_error("load_dataset: no valid rows in " + ds.source_path);
    std::stable_sort(ds.records.begin(), ds.records.end(),
                     [](const TweetRecord& a, const TweetRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    ds.epoch = ds.records.front().timestamp;
    for (auto& r : ds.records) r.timestamp -= ds.epoch;
}

}  // namespace

DataFormat parse_format(const std::string& name) {
    if (name == "csv") return DataFormat::csv;
    if (name == "jsonl") return DataFormat::jsonl;
    throw schema_error("unknown dataset format '" + name + "' (expected csv or jsonl)");
}

Dataset load_dataset(const std::string& path, DataFormat format,
                     std::vector<std::string>* diagnostics) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("load_dataset: cannot open " + path);

    Dataset ds;
    ds.source_path = path;
    StampKind kind = StampKind::unknown;
    std::string line;
    long line_no = 0;

    auto reject = [&](const std::string& why) {
        if (diagnostics)
            diagnostics->push_back("line " + std::to_string(line_no) + ": " + why);
    };

    if (format == DataFormat::csv) {
        if (!std::getline(in, line))
            throw empty_input_error("load_dataset: empty file " + path);
        ++line_no;
        auto header = split_csv_line(trim(line));
        for (auto& h : header) h = trim(h);
        if (header != std::vector<std::string>{"created_at", "user_id", "followers_count"})
            throw schema_error(
                "load_dataset: expected header created_at,user_id,followers_count in " +
                path);
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty()) continue;
            const auto fields = split_csv_line(stripped);
            if (fields.size() != 3) {
                reject("expected 3 fields, got " + std::to_string(fields.size()));
                continue;
            }
            double stamp;
            std::string why;
            if (!parse_stamp(fields[0], kind, stamp, why)) {
                if (why.rfind("mixed", 0) == 0)
                    throw schema_error("load_dataset: " + why + " in " + path);
                reject(why);
                continue;
            }
            double followers;
            if (!parse_number(fields[2], followers) || followers < 0.0 ||
                followers != std::floor(followers)) {
                reject("followers_count must be a non-negative integer");
                continue;
            }
            ds.records.push_back(
                {stamp, trim(fields[1]), static_cast<long long>(followers)});
        }
    } else {
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty()) continue;
            nlohmann::json obj = nlohmann::json::parse(stripped, nullptr, false);
            if (obj.is_discarded() || !obj.is_object()) {
                reject("not a JSON object");
                continue;
            }
            if (!obj.contains("created_at") || !obj.contains("user_id") ||
                !obj.contains("followers_count")) {
                reject("missing created_at, user_id or followers_count");
                continue;
            }
            double stamp;
            std::string why;
            if (obj["created_at"].is_number()) {
                if (!parse_stamp(std::to_string(obj["created_at"].get<double>()),
                                 kind, stamp, why)) {
                    throw schema_error("load_dataset: " + why + " in " + path);
                }
                stamp = obj["created_at"].get<double>();
            } else if (obj["created_at"].is_string()) {
                if (!parse_stamp(obj["created_at"].get<std::string>(), kind, stamp,
                                 why)) {
                    if (why.rfind("mixed", 0) == 0)
                        throw schema_error("load_dataset: " + why + " in " + path);
                    reject(why);
                    continue;
                }
            } else {
                reject("created_at must be a string or a number");
                continue;
            }
            if (!obj["user_id"].is_string()) {
                reject("user_id must be a string");
                continue;
            }
            if (!obj["followers_count"].is_number_integer() ||
                obj["followers_count"].get<long long>() < 0) {
                reject("followers_count must be a non-negative integer");
                continue;
            }
            ds.records.push_back({stamp, obj["user_id"].get<std::string>(),
                                  obj["followers_count"].get<long long>()});
        }
    }
    finalize_dataset(ds);
    return ds;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
        out << content;
        if (!out) throw std::runtime_error("atomic_write: failed writing " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic_write: rename to " + path + " failed");
}

void write_dataset(const Dataset& ds, const std::string& path,
                   DataFormat format) {
    std::ostringstream out;
    if (format == DataFormat::csv) {
        out << "created_at,user_id,followers_count\n";
        for (const auto& r : ds.records)
            out << format_double(r.timestamp + ds.epoch) << ',' << r.user_id << ','
                << r.follower_count << '\n';
    } else {
        for (const auto& r : ds.records) {
            nlohmann::json obj;
            obj["created_at"] = r.timestamp + ds.epoch;
            obj["user_id"] = r.user_id;
            obj["followers_count"] = r.follower_count;
            out << obj.dump() << '\n';
        }
    }
    atomic_write(path, out.str());
}

NetworkParams compute_network_params(const Dataset& ds) {
    if (ds.records.empty()) throw empty_input_error("compute_network_params: empty dataset");
    // Records are time-sorted, so the last write per user is the latest.
    std::unordered_map<std::string, long long> latest;
    for (const auto& r : ds.records) latest[r.user_id] = r.follower_count;
    double m = 0.0, m2 = 0.0;
    for (const auto& [_, f] : latest) {
        m += static_cast<double>(f);
        m2 += static_cast<double>(f) * static_cast<double>(f);
    }
    const double n = static_cast<double>(latest.size());
    return {static_cast<long long>(latest.size()), m / n, m2 / n};
}

TimeSeries empirical_reads(const Dataset& ds) {
    if (ds.records.empty()) throw empty_input_error("empirical_reads: empty dataset");
    TimeSeries out;
    long long cum = 0;
    for (const auto& r : ds.records) {
        cum += r.follower_count;
        if (!out.times.empty() && r.timestamp == out.times.back())
            out.values.back() = static_cast<double>(cum);
        else {
            out.times.push_back(r.timestamp);
            out.values.push_back(static_cast<double>(cum));
        }
    }
    return out;
}

Dataset synthesize_dataset(const NetworkParams& params,
                           const PopularitySpec& spec,
                           const DegreeDistribution& dist, double horizon,
                           std::uint64_t seed) {
    const EventTrace trace = simulate_events(params, spec, dist, horizon, seed);
    if (trace.event_times.empty())
        throw empty_input_error("synthesize_dataset: model produced no events");
    Rng id_rng(splitmix64(seed ^ 0x517cc1b727220a95ULL));
    Dataset ds;
    ds.source_path = "<synthetic>";
    ds.epoch = 0.0;
    ds.records.reserve(trace.event_times.size());
    for (std::size_t i = 0; i < trace.event_times.size(); ++i) {
        const auto idx = std::min<long long>(
            params.n_users - 1,
            static_cast<long long>(id_rng.uniform01() *
                                   static_cast<double>(params.n_users)));
        char name[24];
        std::snprintf(name, sizeof(name), "u%08lld", idx);
        // keep the simulation clock: t = 0 is the hashtag's birth, not the
        // first observed shoot, so the fitted kernel is not phase-shifted
        ds.records.push_back({trace.event_times[i], name, trace.jump_sizes[i]});
    }
    return ds;
}

int default_bin_count(std::size_t n_records) {
    return static_cast<int>(
        std::min<std::size_t>(200, std::max<std::size_t>(20, (n_records + 49) / 50)));
}

ValidationReport validate(const Dataset& ds, const ValidateOptions& options) {
    ValidationReport report;
    report.network = compute_network_params(ds);
    const int n_bins =
        options.n_bins > 0 ? options.n_bins : default_bin_count(ds.records.size());

    // Observed distinct users undercount the community: anyone who never
    // shot the hashtag is invisible. Under the model each user's shoot count
    // is Poisson(Lambda/N), so N_obs = N (1 - exp(-Lambda/N)) with
    // Lambda ~= total shoots, which pins down N. Without the correction the
    // fitted peak rate c absorbs the factor N/N_obs.
    const long long n_obs = report.network.n_users;
    const double shoots = static_cast<double>(ds.records.size());
    if (shoots > static_cast<double>(n_obs)) {
        double lo = static_cast<double>(n_obs), hi = lo;
        auto visible = [&](double n) { return n * -std::expm1(-shoots / n); };
        while (visible(hi) < static_cast<double>(n_obs) && hi < 1e15) hi *= 2.0;
        if (hi < 1e15) {
            for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (visible(mid) < static_cast<double>(n_obs) ? lo : hi) = mid;
            }
            report.network.n_users = std::llround(0.5 * (lo + hi));
        }
    }

    report.w_raw = empirical_popularity(ds.records, report.network.n_users, n_bins);
    report.w_smooth = moving_average(report.w_raw, options.smooth_k);

    InitialGuess guess;
    try {
        guess = initial_guess(report.w_smooth);
    } catch (const no_signal_error& e) {
        throw no_signal_error(std::string("validate: empirical popularity is flat (") +
                              e.what() + ")");
    }
    report.fit = lm_fit_gamma(report.w_smooth, guess);

    const PopularitySpec fitted =
        GammaKernelPopularity{report.fit.a, report.fit.b, report.fit.c};
    report.w_fit.times = report.w_raw.times;
    for (double t : report.w_fit.times)
        report.w_fit.values.push_back(evaluate_popularity(fitted, t));

    report.reads = empirical_reads(ds);
    report.curves =
        confidence_band(report.network, fitted, report.reads.times, options.level);

    std::size_t inside = 0;
    for (std::size_t i = 0; i < report.reads.times.size(); ++i) {
        const double x = report.reads.values[i];
        if (x >= report.curves.band_low[i] && x <= report.curves.band_high[i])
            ++inside;
    }
    report.coverage_fraction =
        static_cast<double>(inside) / static_cast<double>(report.reads.times.size());
    report.long_run_limit =
        asymptotic_moments(report.network, fitted).mean_limit_exact;
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::json j;
    j["network"] = {{"n_users", report.network.n_users},
                    {"mean_followers", report.network.mean_followers},
                    {"mean_sq_followers", report.network.mean_sq_followers}};
    nlohmann::json cov = nlohmann::json::array();
    for (const auto& row : report.fit.covariance)
        cov.push_back({row[0], row[1], row[2]});
    j["fit"] = {{"a", report.fit.a},
                {"b", report.fit.b},
                {"c", report.fit.c},
                {"covariance", cov},
                {"rmse", report.fit.rmse},
                {"r_squared", report.fit.r_squared},
                {"iterations", report.fit.iterations},
                {"converged", report.fit.converged}};
    j["coverage_fraction"] = report.coverage_fraction;
    j["long_run_limit"] = report.long_run_limit;
    j["band"] = {{"level", report.curves.level},
                 {"note", "Gaussian approximation; reliable once Lambda(t) >= ~30"}};
    return j.dump(2) + "\n";
}

void write_report(const ValidationReport& report, const std::string& path) {
    atomic_write(path, report_to_json(report));
}

void write_curves_csv(const ValidationReport& report, const std::string& path) {
    std::ostringstream out;
    out << "t,x_empirical,mean,band_low,band_high\n";
    for (std::size_t i = 0; i < report.reads.times.size(); ++i)
        out << format_double(report.reads.times[i]) << ','
            << format_double(report.reads.values[i]) << ','
            << format_double(report.curves.mean[i]) << ','
            << format_double(report.curves.band_low[i]) << ','
            << format_double(report.curves.band_high[i]) << '\n';
    atomic_write(path, out.str());
}

void write_w_csv(const ValidationReport& report, const std::string& path) {
    std::ostringstream out;
    out << "t,w_raw,w_smooth,w_fit\n";
    for (std::size_t i = 0; i < report.w_raw.times.size(); ++i)
        out << format_double(report.w_raw.times[i]) << ','
            << format_double(report.w_raw.values[i]) << ','
            << format_double(report.w_smooth.values[i]) << ','
            << format_double(report.w_fit.values[i]) << '\n';
    atomic_write(path, out.str());
}

namespace {

struct PanelScale {
    double t_lo, t_hi, v_lo, v_hi;
    double x0, y0, width, height;

    double px(double t) const { return x0 + (t - t_lo) / (t_hi - t_lo) * width; }
    double py(double v) const {
        return y0 + height - (v - v_lo) / (v_hi - v_lo) * height;
    }
};

void polyline(std::ostringstream& out, const PanelScale& s,
              const std::vector<double>& t, const std::vector<double>& v,
              const char* style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << format_double(s.px(t[i])) << ',' << format_double(s.py(v[i])) << ' ';
    out << "\"/>\n";
}

}  // namespace

void write_svg(const ValidationReport& report, const std::string& path) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
           "viewBox=\"0 0 640 640\">\n";

    // Panel 1: raw/smoothed/fitted popularity.
    double w_hi = 1e-12;
    for (double v : report.w_raw.values) w_hi = std::max(w_hi, v);
    PanelScale p1{0.0, report.w_raw.times.back() * 1.02, 0.0, w_hi * 1.05,
                  40.0, 20.0, 580.0, 260.0};
    out << "<rect x=\"40\" y=\"20\" width=\"580\" height=\"260\" fill=\"none\" "
           "stroke=\"black\"/>\n";
    polyline(out, p1, report.w_raw.times, report.w_raw.values,
             "stroke=\"#bbbbbb\" stroke-width=\"1\"");
    polyline(out, p1, report.w_smooth.times, report.w_smooth.values,
             "stroke=\"#d62728\" stroke-width=\"1.5\"");
    polyline(out, p1, report.w_fit.times, report.w_fit.values,
             "stroke=\"#1f77b4\" stroke-width=\"1.5\"");

    // Panel 2: empirical reads, model mean, confidence band, long-run limit.
    double x_hi = report.long_run_limit;
    for (double v : report.curves.band_high) x_hi = std::max(x_hi, v);
    for (double v : report.reads.values) x_hi = std::max(x_hi, v);
    PanelScale p2{0.0, report.reads.times.back() * 1.02, 0.0, x_hi * 1.05,
                  40.0, 340.0, 580.0, 260.0};
    out << "<rect x=\"40\" y=\"340\" width=\"580\" height=\"260\" fill=\"none\" "
           "stroke=\"black\"/>\n";
    out << "<polygon fill=\"#aec7e8\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < report.curves.times.size(); ++i)
        out << format_double(p2.px(report.curves.times[i])) << ','
            << format_double(p2.py(report.curves.band_high[i])) << ' ';
    for (std::size_t i = report.curves.times.size(); i-- > 0;)
        out << format_double(p2.px(report.curves.times[i])) << ','
            << format_double(p2.py(report.curves.band_low[i])) << ' ';
    out << "\"/>\n";
    polyline(out, p2, report.curves.times, report.curves.mean,
             "stroke=\"#1f77b4\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"");
    polyline(out, p2, report.reads.times, report.reads.values,
             "stroke=\"#d62728\" stroke-width=\"1.5\"");
    out << "<line x1=\"40\" x2=\"620\" y1=\"" << format_double(p2.py(report.long_run_limit))
        << "\" y2=\"" << format_double(p2.py(report.long_run_limit))
        << "\" stroke=\"#1f77b4\" stroke-dasharray=\"2,3\"/>\n";
    out << "</svg>\n";
    atomic_write(path, out.str());
}

}  // namespace hashpop
