#pragma once

#include <array>
#include <vector>

#include "hashpop/types.hpp"

namespace hashpop {

// Empirical w(t): fraction of distinct users active per equal-width bin,
// divided by the bin width so the result is a rate. Times are bin midpoints.
TimeSeries empirical_popularity(const std::vector<TweetRecord>& records,
                                long long n_users, int n_bins);

// Centered k-point moving average; windows shrink symmetrically at the
// edges. k must be odd.
TimeSeries moving_average(const TimeSeries& series, int k);

struct InitialGuess {
    double a0;
    double b0;
    double c0;
};

// Peak height, peak location and width-at-half-maximum heuristics,
// consistent with t_max = a*b.
InitialGuess initial_guess(const TimeSeries& series);

struct FitOptions {
    int max_iterations = 200;
    double lambda0 = 1e-3;
    double rel_obj_tol = 1e-10;
    double grad_tol = 1e-8;
};

struct FitResult {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    std::array<std::array<double, 3>, 3> covariance{};  // linearized, (a,b,c)
    double rmse = 0.0;
    double r_squared = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;  // SSE after each accepted step
};

// Levenberg-Marquardt least squares of the gamma kernel against a series.
// Constraints a,b > 0 and c in [0,1] are enforced by fitting a = e^alpha,
// b = e^beta, c = logistic(g) unconstrained.
FitResult lm_fit_gamma(const TimeSeries& series, const InitialGuess& guess,
                       const FitOptions& options = {});

struct GoodnessOfFit {
    double rmse;
    double r_squared;
};

GoodnessOfFit goodness_of_fit(const TimeSeries& series, const FitResult& fit);

}  // namespace hashpop
