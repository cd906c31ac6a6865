#include "hashpop/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hashpop/errors.hpp"
#include "hashpop/special_functions.hpp"

namespace hashpop {

namespace {

// Inverse standard normal CDF, Acklam's rational approximation
// (relative error below 1.2e-9, refined by one Halley step).
double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_normal_cdf: p must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against erfc.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

// log of N*c*b*e^a/a^a, the gamma-kernel intensity prefactor.
double log_gamma_kernel_prefactor(const NetworkParams& params,
                                  const GammaKernelPopularity& g) {
    return std::log(static_cast<double>(params.n_users)) + std::log(g.c) +
           std::log(g.b) + g.a - g.a * std::log(g.a);
}

}  // namespace

double cumulative_intensity(const NetworkParams& params,
                            const PopularitySpec& spec, double t) {
    params.check();
    check(spec);
    if (!(t >= 0.0)) throw std::domain_error("cumulative_intensity: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double n = static_cast<double>(params.n_users);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantPopularity>) {
                return n * s.c * t;
            } else if constexpr (std::is_same_v<T, GammaKernelPopularity>) {
                if (s.c == 0.0) return 0.0;
                // N c b e^a/a^a * gamma(a+1, t/b), all in log space.
                const double log_coef = log_gamma_kernel_prefactor(params, s) +
                                        log_gamma(s.a + 1.0);
                return std::exp(log_coef) * regularized_lower_gamma(s.a + 1.0, t / s.b);
            } else {
                if (s.times.front() > 0.0 || t > s.times.back())
                    throw std::domain_error(
                        "cumulative_intensity: tabulated popularity must cover [0, t]");
                double integral = 0.0;
                for (std::size_t i = 1; i < s.times.size(); ++i) {
                    const double t0 = s.times[i - 1];
                    if (t0 >= t) break;
                    const double t1 = std::min(s.times[i], t);
                    const double w1 = evaluate_popularity(spec, t1);
                    integral += 0.5 * (s.rates[i - 1] + w1) * (t1 - t0);
                }
                return n * integral;
            }
        },
        spec);
}

double mean_reads(const NetworkParams& params, const PopularitySpec& spec,
                  double t) {
    return params.mean_followers * cumulative_intensity(params, spec, t);
}

double variance_reads(const NetworkParams& params, const PopularitySpec& spec,
                      double t) {
    return params.mean_sq_followers * cumulative_intensity(params, spec, t);
}

AsymptoticMoments asymptotic_moments(const NetworkParams& params,
                                     const PopularitySpec& spec) {
    params.check();
    const auto* g = std::get_if<GammaKernelPopularity>(&spec);
    if (!g)
        throw unsupported_variant_error(
            "asymptotic_moments: limits exist only for the gamma kernel");
    check(spec);
    const double n = static_cast<double>(params.n_users);
    double lambda_inf = 0.0;
    if (g->c > 0.0)
        lambda_inf = std::exp(log_gamma_kernel_prefactor(params, *g) +
                              log_gamma(g->a + 1.0));
    const double stirling_lambda =
        n * g->b * g->c * std::sqrt(2.0 * M_PI * (g->a + 1.0));
    return {lambda_inf * params.mean_followers,
            stirling_lambda * params.mean_followers,
            lambda_inf * params.mean_sq_followers,
            stirling_lambda * params.mean_sq_followers};
}

double mgf_value(const NetworkParams& params, const PopularitySpec& spec,
                 const DegreeDistribution& dist, double s, double t) {
    const double mf = degree_mgf(dist, s);
    return std::exp((mf - 1.0) * cumulative_intensity(params, spec, t));
}

double normal_band_quantile(double level) {
    if (!(level >= 0.0 && level < 1.0))
        throw std::domain_error("normal_band_quantile: level must lie in [0,1)");
    if (level == 0.0) return 0.0;
    return inverse_normal_cdf(0.5 + level / 2.0);
}

MomentCurves confidence_band(const NetworkParams& params,
                             const PopularitySpec& spec,
                             const std::vector<double>& times, double level) {
    const double z = normal_band_quantile(level);
    MomentCurves curves;
    curves.times = times;
    curves.level = level;
    curves.mean.reserve(times.size());
    curves.variance.reserve(times.size());
    curves.band_low.reserve(times.size());
    curves.band_high.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::domain_error("confidence_band: times must be strictly ascending");
        const double lambda = cumulative_intensity(params, spec, times[i]);
        const double mean = params.mean_followers * lambda;
        const double var = params.mean_sq_followers * lambda;
        const double half = z * std::sqrt(var);
        curves.mean.push_back(mean);
        curves.variance.push_back(var);
        curves.band_low.push_back(std::max(0.0, mean - half));
        curves.band_high.push_back(mean + half);
    }
    return curves;
}

}  // namespace hashpop
