#include "hashpop/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hashpop/errors.hpp"
#include "hashpop/moments.hpp"

namespace hashpop {

long long EventTrace::value_at(double t) const {
    long long x = 0;
    for (std::size_t i = 0; i < event_times.size() && event_times[i] <= t; ++i)
        x += jump_sizes[i];
    return x;
}

long long EventTrace::total() const {
    long long x = 0;
    for (long long j : jump_sizes) x += j;
    return x;
}

EventTrace simulate_events(const NetworkParams& params,
                           const PopularitySpec& spec,
                           const DegreeDistribution& dist, double horizon,
                           std::uint64_t seed) {
    params.check();
    check(spec);
    check(dist);
    if (!(horizon > 0.0)) throw std::domain_error("simulate_events: horizon must be positive");
    const double w_max = peak_rate(spec);
    if (!std::isfinite(w_max))
        throw std::domain_error("simulate_events: popularity rate unbounded on horizon");

    EventTrace trace;
    if (w_max <= 0.0) return trace;

    const double majorant = static_cast<double>(params.n_users) * w_max;
    DegreeSampler sampler(dist);
    Rng rng(seed);
    double t = 0.0;
    for (;;) {
        t += rng.exponential(majorant);
        if (t > horizon) break;
        if (rng.uniform01() * w_max <= evaluate_popularity(spec, t)) {
            trace.event_times.push_back(t);
            trace.jump_sizes.push_back(sampler(rng));
        }
    }
    return trace;
}

EventTrace simulate_micro(const NetworkParams& params,
                          const PopularitySpec& spec,
                          const DegreeDistribution& dist, double dt,
                          double horizon, std::uint64_t seed) {
    params.check();
    check(spec);
    check(dist);
    if (!(dt > 0.0)) throw std::domain_error("simulate_micro: dt must be positive");
    if (!(horizon > 0.0)) throw std::domain_error("simulate_micro: horizon must be positive");
    const double w_max = peak_rate(spec);
    if (w_max * dt > 1.0)
        throw std::domain_error("simulate_micro: w_max*dt exceeds 1, not a probability");

    EventTrace trace;
    DegreeSampler sampler(dist);
    Rng rng(seed);
    const long long n_steps = static_cast<long long>(std::ceil(horizon / dt));
    for (long long step = 0; step < n_steps; ++step) {
        const double t0 = static_cast<double>(step) * dt;
        const double t1 = std::min(t0 + dt, horizon);
        const double p = evaluate_popularity(spec, 0.5 * (t0 + t1)) * (t1 - t0);
        const long long shooters = rng.binomial(params.n_users, p);
        // Spread simultaneous shooters inside the step to keep times ascending.
        for (long long i = 0; i < shooters; ++i) {
            trace.event_times.push_back(
                t0 + (t1 - t0) * static_cast<double>(i + 1) /
                         static_cast<double>(shooters + 1));
            trace.jump_sizes.push_back(sampler(rng));
        }
    }
    return trace;
}

double DistributionGrid::row_mean(std::size_t row, bool leak_corrected) const {
    double m = 0.0, mass = 0.0;
    for (std::size_t x = 0; x < pmf[row].size(); ++x) {
        m += static_cast<double>(x) * pmf[row][x];
        mass += pmf[row][x];
    }
    return leak_corrected && mass > 0.0 ? m / mass : m;
}

double DistributionGrid::row_variance(std::size_t row, bool leak_corrected) const {
    const double m = row_mean(row, leak_corrected);
    double v = 0.0, mass = 0.0;
    for (std::size_t x = 0; x < pmf[row].size(); ++x) {
        const double d = static_cast<double>(x) - m;
        v += d * d * pmf[row][x];
        mass += pmf[row][x];
    }
    return leak_corrected && mass > 0.0 ? v / mass : v;
}

DistributionGrid evolve_master_equation(const NetworkParams& params,
                                        const PopularitySpec& spec,
                                        const DegreeDistribution& dist,
                                        long long x_max,
                                        const std::vector<double>& times,
                                        double dt, double leak_tol) {
    params.check();
    check(spec);
    if (std::holds_alternative<LogNormalDiscretizedDegree>(dist) ||
        std::holds_alternative<ParetoDiscreteDegree>(dist))
        throw unsupported_variant_error(
            "evolve_master_equation: degree law must have finite integer support");
    const DiscreteDegree jump = to_discrete(dist);
    if (x_max < 0) throw std::domain_error("evolve_master_equation: x_max must be >= 0");
    if (times.empty()) throw std::domain_error("evolve_master_equation: empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0))
            throw std::domain_error("evolve_master_equation: times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::domain_error("evolve_master_equation: times must be ascending");
    }

    const double n = static_cast<double>(params.n_users);
    const double w_max = peak_rate(spec);
    if (dt <= 0.0) dt = w_max > 0.0 ? 1.0 / (50.0 * n * w_max) : times.back();

    const std::size_t dim = static_cast<std::size_t>(x_max) + 1;
    std::vector<double> state(dim, 0.0);
    state[0] = 1.0;

    auto deriv = [&](const std::vector<double>& p, double t, std::vector<double>& out) {
        const double rate = n * evaluate_popularity(spec, t);
        for (std::size_t x = 0; x < dim; ++x) {
            double conv = 0.0;
            for (std::size_t i = 0; i < jump.support.size(); ++i) {
                const long long src = static_cast<long long>(x) - jump.support[i];
                if (src >= 0) conv += jump.probs[i] * p[static_cast<std::size_t>(src)];
            }
            out[x] = -rate * (p[x] - conv);
        }
    };

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    auto rk4_step = [&](double t, double h) {
        deriv(state, t, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        deriv(tmp, t + 0.5 * h, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        deriv(tmp, t + 0.5 * h, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = state[i] + h * k3[i];
        deriv(tmp, t + h, k4);
        for (std::size_t i = 0; i < dim; ++i)
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };

    DistributionGrid grid;
    grid.x_max = x_max;
    grid.times = times;
    grid.pmf.reserve(times.size());
    grid.leak.reserve(times.size());

    double t = 0.0;
    for (double target : times) {
        while (t < target) {
            const double span = target - t;
            const long long slices =
                std::max<long long>(1, static_cast<long long>(std::ceil(span / dt)));
            const double h = span / static_cast<double>(slices);
            for (long long i = 0; i < slices; ++i) {
                rk4_step(t, h);
                t += h;
            }
            t = target;
        }
        std::vector<double> row = state;
        double mass = 0.0;
        for (double& v : row) {
            if (v < 0.0) v = 0.0;
            mass += v;
        }
        const double leak = 1.0 - mass;
        if (leak > leak_tol) {
            const double lambda = cumulative_intensity(params, spec, target);
            const double mean = params.mean_followers * lambda;
            const double sd = std::sqrt(params.mean_sq_followers * lambda);
            const long long suggested = std::max<long long>(
                2 * x_max, static_cast<long long>(
                               std::ceil(mean + 12.0 * sd)) + jump.support.back());
            throw truncation_error(
                "evolve_master_equation: probability leak " + std::to_string(leak) +
                    " exceeds tolerance at t=" + std::to_string(target) +
                    "; increase x_max to about " + std::to_string(suggested),
                suggested);
        }
        grid.pmf.push_back(std::move(row));
        grid.leak.push_back(leak);
    }
    return grid;
}

EnsembleStats ensemble_statistics(const NetworkParams& params,
                                  const PopularitySpec& spec,
                                  const DegreeDistribution& dist,
                                  double horizon,
                                  const std::vector<double>& grid,
                                  long long replications, std::uint64_t seed) {
    if (replications < 2)
        throw std::domain_error("ensemble_statistics: need at least 2 replications");
    EnsembleStats stats;
    stats.times = grid;
    stats.replications = replications;
    const std::size_t m = grid.size();
    std::vector<double> mean(m, 0.0), m2(m, 0.0);
    for (long long r = 0; r < replications; ++r) {
        const EventTrace trace = simulate_events(
            params, spec, dist, horizon,
            splitmix64(seed + static_cast<std::uint64_t>(r)));
        // Single sweep over the trace per replication.
        std::size_t ev = 0;
        long long x = 0;
        for (std::size_t g = 0; g < m; ++g) {
            while (ev < trace.event_times.size() && trace.event_times[ev] <= grid[g])
                x += trace.jump_sizes[ev++];
            const double v = static_cast<double>(x);
            const double delta = v - mean[g];
            mean[g] += delta / static_cast<double>(r + 1);
            m2[g] += delta * (v - mean[g]);
        }
    }
    stats.sample_mean = mean;
    stats.sample_var.resize(m);
    stats.standard_error.resize(m);
    for (std::size_t g = 0; g < m; ++g) {
        stats.sample_var[g] = m2[g] / static_cast<double>(replications - 1);
        stats.standard_error[g] =
            std::sqrt(stats.sample_var[g] / static_cast<double>(replications));
    }
    return stats;
}

}  // namespace hashpop
