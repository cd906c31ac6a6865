#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hashpop/rng.hpp"

namespace hashpop {

// One observed send/resend event: when, who, and the sender's follower
// count at send time.
struct TweetRecord {
    double timestamp = 0.0;  // seconds since dataset epoch, first record at 0
    std::string user_id;
    long long follower_count = 0;
};

// Community summary driving every moment formula: N, <f>, <f^2>.
struct NetworkParams {
    long long n_users = 0;
    double mean_followers = 0.0;
    double mean_sq_followers = 0.0;

    void check() const;
};

// --- popularity function w(t) -------------------------------------------

struct ConstantPopularity {
    double c = 0.0;  // in [0, 1]
};

// c * e^a / (a*b)^a * t^a * e^{-t/b}; peak value c at t = a*b.
struct GammaKernelPopularity {
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;
};

// Piecewise-linear rate between knots; no extrapolation.
struct TabulatedPopularity {
    std::vector<double> times;
    std::vector<double> rates;
};

using PopularitySpec =
    std::variant<ConstantPopularity, GammaKernelPopularity, TabulatedPopularity>;

void check(const PopularitySpec& spec);

double evaluate_popularity(const PopularitySpec& spec, double t);

struct PopularityLandmarks {
    double t_max;
    double w_max;
    double t_inf;
};

// Closed-form peak and inflection point of the gamma kernel.
PopularityLandmarks popularity_landmarks(const PopularitySpec& spec);

// Exact majorant of w on its domain (c for constant/gamma, max knot for
// tabulated); used by the thinning simulator.
double peak_rate(const PopularitySpec& spec);

// --- out-degree (follower-count) distribution f(y) -----------------------

struct DegenerateDegree {
    long long k = 0;
};

struct DiscreteDegree {
    std::vector<long long> support;
    std::vector<double> probs;
};

struct EmpiricalSampleDegree {
    std::vector<long long> counts;
};

// Continuous log-normal with mass rounded to the nearest integer.
struct LogNormalDiscretizedDegree {
    double mu = 0.0;
    double sigma = 1.0;
};

// p(k) proportional to k^{-alpha} on integers k >= m_min.
struct ParetoDiscreteDegree {
    double alpha = 2.0;  // > 1
    long long m_min = 1;
};

using DegreeDistribution = std::variant<DegenerateDegree, DiscreteDegree,
                                        EmpiricalSampleDegree,
                                        LogNormalDiscretizedDegree,
                                        ParetoDiscreteDegree>;

void check(const DegreeDistribution& dist);

struct DegreeMoments {
    double mean;
    double mean_sq;
};

DegreeMoments degree_moments(const DegreeDistribution& dist);

// E[e^{s y}] over the degree law; throws std::domain_error when divergent.
double degree_mgf(const DegreeDistribution& dist, double s);

// Finite pmf over integer support; parametric variants are discretized by
// probability-mass rounding and renormalized, tails truncated below
// tail_tol total mass.
DiscreteDegree to_discrete(const DegreeDistribution& dist,
                           double tail_tol = 1e-12);

// Reusable inverse-CDF sampler (builds the cumulative table once).
class DegreeSampler {
  public:
    explicit DegreeSampler(const DegreeDistribution& dist);
    long long operator()(Rng& rng) const;

  private:
    std::vector<long long> support_;
    std::vector<double> cdf_;
};

long long sample_degree(const DegreeDistribution& dist, Rng& rng);

// --- plain time series ----------------------------------------------------

struct TimeSeries {
    std::vector<double> times;   // strictly ascending
    std::vector<double> values;  // same length

    void check() const;
};

}  // namespace hashpop
