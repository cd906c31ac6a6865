#pragma once

#include <vector>

#include "hashpop/types.hpp"

namespace hashpop {

// Analytic mean/variance/band curves on a time grid.
struct MomentCurves {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> band_low;
    std::vector<double> band_high;
    double level = 0.0;
};

// Lambda(t) = N * integral_0^t w(s) ds. Closed form for constant and
// gamma-kernel popularity, trapezoid on the knot grid for tabulated.
double cumulative_intensity(const NetworkParams& params,
                            const PopularitySpec& spec, double t);

// E[X(t)] = <f> * Lambda(t).
double mean_reads(const NetworkParams& params, const PopularitySpec& spec,
                  double t);

// Var[X(t)] = <f^2> * Lambda(t) = (<f^2>/<f>) * E[X(t)].
double variance_reads(const NetworkParams& params, const PopularitySpec& spec,
                      double t);

struct AsymptoticMoments {
    double mean_limit_exact;
    double mean_limit_stirling;
    double var_limit_exact;
    double var_limit_stirling;
};

// Large-time limits of the gamma-kernel moments, exact (via log_gamma) and
// in the Stirling form N*b*c*<f>*sqrt(2*pi*(a+1)).
AsymptoticMoments asymptotic_moments(const NetworkParams& params,
                                     const PopularitySpec& spec);

// M_X(s, t) = exp((M_f(s) - 1) * Lambda(t)).
double mgf_value(const NetworkParams& params, const PopularitySpec& spec,
                 const DegreeDistribution& dist, double s, double t);

// Two-sided standard normal quantile for a coverage level in [0, 1);
// z(0.95) = 1.959964.
double normal_band_quantile(double level);

// Gaussian-approximation band mean +/- z(level)*sqrt(var), floored at 0.
// Approximate; meaningful once Lambda(t) is a few tens.
MomentCurves confidence_band(const NetworkParams& params,
                             const PopularitySpec& spec,
                             const std::vector<double>& times, double level);

}  // namespace hashpop
