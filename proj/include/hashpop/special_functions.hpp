#pragma once

namespace hashpop {

struct GammaEvalResult {
    double value = 0.0;
    bool converged = false;
    int terms_used = 0;
};

// ln Gamma(z) for z > 0 (Lanczos), relative error below 1e-12 for z <= 170.
double log_gamma(double z);

// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s).
// Power series for x < s + 1, continued fraction otherwise.
GammaEvalResult regularized_lower_gamma_ex(double s, double x);
double regularized_lower_gamma(double s, double x);

// gamma(s, x) = integral_0^x e^{-u} u^{s-1} du.
double lower_incomplete_gamma(double s, double x);

// sqrt(2*pi/z) * (z/e)^z, evaluated in log space.
double stirling_gamma(double z);

}  // namespace hashpop
