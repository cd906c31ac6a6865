// Independent reference implementations used only by tests. Nothing here may
// call the library code paths it is checking.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Adaptive Simpson quadrature with absolute/relative tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb),
                                tol, 60);
}

// Poisson pmf vector over 0..x_max.
inline std::vector<double> poisson_pmf(double lambda, std::size_t x_max) {
    std::vector<double> p(x_max + 1);
    p[0] = std::exp(-lambda);
    for (std::size_t k = 1; k <= x_max; ++k)
        p[k] = p[k - 1] * lambda / static_cast<double>(k);
    return p;
}

// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace oracle
