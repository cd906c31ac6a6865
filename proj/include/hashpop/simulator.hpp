#pragma once

#include <cstdint>
#include <vector>

#include "hashpop/types.hpp"

namespace hashpop {

// A realized shoot history: event times and the follower count added by
// each shooter. X(t) is the running sum of jumps.
struct EventTrace {
    std::vector<double> event_times;      // strictly ascending
    std::vector<long long> jump_sizes;    // same length

    // X(t): sum of jumps with event time <= t.
    long long value_at(double t) const;
    long long total() const;
};

// Inhomogeneous compound Poisson simulation by thinning against the exact
// majorant N * peak_rate(spec).
EventTrace simulate_events(const NetworkParams& params,
                           const PopularitySpec& spec,
                           const DegreeDistribution& dist, double horizon,
                           std::uint64_t seed);

// Time-stepped re-enactment: in each step of length dt every one of the N
// users shoots with probability w(t)*dt. Converges to simulate_events in
// distribution as dt -> 0.
EventTrace simulate_micro(const NetworkParams& params,
                          const PopularitySpec& spec,
                          const DegreeDistribution& dist, double dt,
                          double horizon, std::uint64_t seed);

// P(x, t) on 0..x_max for a list of output times.
struct DistributionGrid {
    long long x_max = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> pmf;  // one row per time
    std::vector<double> leak;              // 1 - row sum

    double row_mean(std::size_t row, bool leak_corrected = true) const;
    double row_variance(std::size_t row, bool leak_corrected = true) const;
};

// Direct RK4 integration of dP(x,t)/dt = -N w(t) [P(x,t) - sum_i P(x-i,t) f(i)]
// from P(., 0) = delta_0 on the truncated state space 0..x_max.
// dt <= 0 selects the default step 1 / (50 * N * peak_rate).
DistributionGrid evolve_master_equation(const NetworkParams& params,
                                        const PopularitySpec& spec,
                                        const DegreeDistribution& dist,
                                        long long x_max,
                                        const std::vector<double>& times,
                                        double dt = 0.0,
                                        double leak_tol = 1e-6);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> sample_mean;
    std::vector<double> sample_var;
    std::vector<double> standard_error;  // sqrt(sample_var / replications)
    long long replications = 0;
};

// Monte Carlo moments of X(t) over independent replications of
// simulate_events; replication r uses seed splitmix64(seed + r).
EnsembleStats ensemble_statistics(const NetworkParams& params,
                                  const PopularitySpec& spec,
                                  const DegreeDistribution& dist,
                                  double horizon,
                                  const std::vector<double>& grid,
                                  long long replications, std::uint64_t seed);

}  // namespace hashpop
