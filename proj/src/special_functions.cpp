#include "hashpop/special_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "hashpop/errors.hpp"

namespace hashpop {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kRelTol = 1e-15;

// Lanczos g = 7, n = 9 coefficients.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7,
};

}  // namespace

double log_gamma(double z) {
    if (!(z > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    if (z < 0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::log(M_PI / std::sin(M_PI * z)) - log_gamma(1.0 - z);
    }
    const double x = z - 1.0;
    double sum = kLanczos[0];
    for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (x + static_cast<double>(i));
    const double t = x + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(sum);
}

GammaEvalResult regularized_lower_gamma_ex(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("regularized_lower_gamma: s must be positive");
    if (!(x >= 0.0)) throw std::domain_error("regularized_lower_gamma: x must be >= 0");
    if (x == 0.0) return {0.0, true, 0};

    const double log_prefactor = -x + s * std::log(x) - log_gamma(s);

    if (x < s + 1.0) {
        // Power series for P(s, x).
        double term = 1.0 / s;
        double sum = term;
        for (int n = 1; n <= kMaxIterations; ++n) {
            term *= x / (s + static_cast<double>(n));
            sum += term;
            if (std::abs(term) < std::abs(sum) * kRelTol)
                return {sum * std::exp(log_prefactor), true, n};
        }
        return {sum * std::exp(log_prefactor), false, kMaxIterations};
    }

    // Modified Lentz continued fraction for Q(s, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kRelTol)
            return {1.0 - std::exp(log_prefactor) * h, true, i};
    }
    return {1.0 - std::exp(log_prefactor) * h, false, kMaxIterations};
}

double regularized_lower_gamma(double s, double x) {
    const GammaEvalResult r = regularized_lower_gamma_ex(s, x);
    if (!r.converged)
        throw numeric_error("regularized_lower_gamma: no convergence", r.terms_used);
    return r.value;
}

double lower_incomplete_gamma(double s, double x) {
    return regularized_lower_gamma(s, x) * std::exp(log_gamma(s));
}

double stirling_gamma(double z) {
    if (!(z > 0.0)) throw std::domain_error("stirling_gamma: argument must be positive");
    const double log_value = 0.5 * std::log(2.0 * M_PI / z) + z * (std::log(z) - 1.0);
    const double value = std::exp(log_value);
    if (!std::isfinite(value))
        throw numeric_error("stirling_gamma: result overflows double precision");
    return value;
}

}  // namespace hashpop
