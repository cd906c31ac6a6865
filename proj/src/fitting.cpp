#include "hashpop/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "hashpop/errors.hpp"

namespace hashpop {

namespace {

double gamma_kernel(double t, double a, double b, double c) {
    if (t <= 0.0) return 0.0;
    return c * std::exp(a + a * std::log(t / (a * b)) - t / b);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Theta {
    double alpha, beta, ghat;  // a = e^alpha, b = e^beta, c = logistic(ghat)
};

void residuals(const TimeSeries& series, const Theta& th, std::vector<double>& r) {
    const double a = std::exp(th.alpha);
    const double b = std::exp(th.beta);
    const double c = logistic(th.ghat);
    for (std::size_t i = 0; i < series.times.size(); ++i)
        r[i] = gamma_kernel(series.times[i], a, b, c) - series.values[i];
}

double sse_of(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

// Solve a 3x3 system by Gaussian elimination with partial pivoting.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& out) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double v = rhs[row];
        for (int k = row + 1; k < 3; ++k) v -= m[row][k] * out[k];
        out[row] = v / m[row][row];
    }
    return true;
}

bool invert3(const std::array<std::array<double, 3>, 3>& m,
             std::array<std::array<double, 3>, 3>& inv) {
    for (int col = 0; col < 3; ++col) {
        std::array<double, 3> e{0.0, 0.0, 0.0};
        e[col] = 1.0;
        std::array<double, 3> x{};
        if (!solve3(m, e, x)) return false;
        for (int row = 0; row < 3; ++row) inv[row][col] = x[row];
    }
    return true;
}

void jacobian(const TimeSeries& series, const Theta& th,
              std::vector<std::array<double, 3>>& jac) {
    const std::size_t n = series.times.size();
    std::vector<double> base(n), bumped(n);
    residuals(series, th, base);
    const double* comps[3] = {&th.alpha, &th.beta, &th.ghat};
    for (int j = 0; j < 3; ++j) {
        Theta bump = th;
        const double h = 1e-6 * (1.0 + std::abs(*comps[j]));
        (j == 0 ? bump.alpha : j == 1 ? bump.beta : bump.ghat) += h;
        residuals(series, bump, bumped);
        for (std::size_t i = 0; i < n; ++i) jac[i][j] = (bumped[i] - base[i]) / h;
    }
}

}  // namespace

TimeSeries empirical_popularity(const std::vector<TweetRecord>& records,
                                long long n_users, int n_bins) {
    if (records.empty()) throw empty_input_error("empirical_popularity: no records");
    if (n_bins < 1) throw std::domain_error("empirical_popularity: n_bins must be >= 1");
    if (n_users < 1) throw std::domain_error("empirical_popularity: n_users must be >= 1");
    double t_last = 0.0;
    for (const auto& r : records) t_last = std::max(t_last, r.timestamp);
    if (!(t_last > 0.0))
        throw std::domain_error("empirical_popularity: records span zero time");

    const double width = t_last / static_cast<double>(n_bins);
    std::vector<std::unordered_set<std::string>> users_in_bin(
        static_cast<std::size_t>(n_bins));
    for (const auto& r : records) {
        auto bin = static_cast<std::size_t>(r.timestamp / width);
        if (bin >= users_in_bin.size()) bin = users_in_bin.size() - 1;
        users_in_bin[bin].insert(r.user_id);
    }

    TimeSeries out;
    out.times.reserve(users_in_bin.size());
    out.values.reserve(users_in_bin.size());
    for (std::size_t b = 0; b < users_in_bin.size(); ++b) {
        out.times.push_back((static_cast<double>(b) + 0.5) * width);
        out.values.push_back(static_cast<double>(users_in_bin[b].size()) /
                             (static_cast<double>(n_users) * width));
    }
    return out;
}

TimeSeries moving_average(const TimeSeries& series, int k) {
    series.check();
    if (k < 1 || k % 2 == 0)
        throw std::domain_error("moving_average: window size must be odd and positive");
    const std::size_t n = series.values.size();
    const std::size_t half = static_cast<std::size_t>(k / 2);
    TimeSeries out;
    out.times = series.times;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += series.values[j];
        out.values[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

InitialGuess initial_guess(const TimeSeries& series) {
    series.check();
    const auto it = std::max_element(series.values.begin(), series.values.end());
    if (it == series.values.end() || !(*it > 0.0))
        throw no_signal_error("initial_guess: series has no positive values");
    const double c0 = *it;
    const std::size_t peak = static_cast<std::size_t>(it - series.values.begin());
    double t_peak = series.times[peak];
    if (!(t_peak > 0.0)) t_peak = series.times.back() > 0.0 ? series.times.back() * 0.05
                                                            : 1.0;

    // Width at half maximum around the peak.
    std::size_t left = peak, right = peak;
    while (left > 0 && series.values[left - 1] >= 0.5 * c0) --left;
    while (right + 1 < series.values.size() && series.values[right + 1] >= 0.5 * c0)
        ++right;
    const double width = series.times[right] - series.times[left];

    double b0 = width * width / (4.0 * t_peak);
    b0 = std::max(b0, t_peak / 10.0);
    const double a0 = t_peak / b0;
    return {a0, b0, c0};
}

FitResult lm_fit_gamma(const TimeSeries& series, const InitialGuess& guess,
                       const FitOptions& options) {
    series.check();
    if (series.times.size() < 4)
        throw std::domain_error("lm_fit_gamma: need at least 4 points for 3 parameters");
    if (!(guess.a0 > 0.0) || !(guess.b0 > 0.0) || !(guess.c0 > 0.0))
        throw std::domain_error("lm_fit_gamma: initial guess must be positive");

    const std::size_t n = series.times.size();
    Theta th{std::log(guess.a0), std::log(guess.b0),
             logit(std::clamp(guess.c0, 1e-9, 1.0 - 1e-9))};

    std::vector<double> r(n), r_new(n);
    residuals(series, th, r);
    double sse = sse_of(r);

    FitResult result;
    result.objective_history.push_back(sse);

    std::vector<std::array<double, 3>> jac(n);
    double lambda = options.lambda0;
    bool converged = false;
    int iter = 0;

    for (; iter < options.max_iterations && !converged; ++iter) {
        jacobian(series, th, jac);
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> g{};
        for (std::size_t i = 0; i < n; ++i) {
            for (int p = 0; p < 3; ++p) {
                g[p] += jac[i][p] * r[i];
                for (int q = 0; q < 3; ++q) jtj[p][q] += jac[i][p] * jac[i][q];
            }
        }
        const double gnorm = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
        if (gnorm < options.grad_tol) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (!accepted) {
            auto damped = jtj;
            for (int p = 0; p < 3; ++p)
                damped[p][p] += lambda * std::max(jtj[p][p], 1e-12);
            std::array<double, 3> step{};
            if (!solve3(damped, {-g[0], -g[1], -g[2]}, step))
                throw rank_deficiency_error("lm_fit_gamma: singular normal equations");
            const Theta trial{th.alpha + step[0], th.beta + step[1], th.ghat + step[2]};
            residuals(series, trial, r_new);
            const double sse_new = sse_of(r_new);
            if (sse_new < sse) {
                accepted = true;
                const double decrease = (sse - sse_new) / std::max(sse, 1e-300);
                th = trial;
                r.swap(r_new);
                sse = sse_new;
                result.objective_history.push_back(sse);
                lambda = std::max(lambda / 10.0, 1e-14);
                if (decrease < options.rel_obj_tol) converged = true;
            } else {
                lambda *= 10.0;
                if (lambda > 1e14) break;  // stalled; outer loop will retry/expire
            }
        }
        if (!accepted) break;
    }

    result.a = std::exp(th.alpha);
    result.b = std::exp(th.beta);
    result.c = logistic(th.ghat);
    result.iterations = iter;
    result.converged = converged;

    // Linearized covariance, mapped from (alpha, beta, ghat) to (a, b, c).
    jacobian(series, th, jac);
    std::array<std::array<double, 3>, 3> jtj{};
    for (std::size_t i = 0; i < n; ++i)
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) jtj[p][q] += jac[i][p] * jac[i][q];
    std::array<std::array<double, 3>, 3> inv{};
    if (n > 3 && invert3(jtj, inv)) {
        const double sigma2 = sse / static_cast<double>(n - 3);
        const double d[3] = {result.a, result.b, result.c * (1.0 - result.c)};
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                result.covariance[p][q] = d[p] * inv[p][q] * d[q] * sigma2;
    }

    result.rmse = std::sqrt(sse / static_cast<double>(n));
    double mean_v = 0.0;
    for (double v : series.values) mean_v += v;
    mean_v /= static_cast<double>(n);
    double ss_tot = 0.0;
    for (double v : series.values) ss_tot += (v - mean_v) * (v - mean_v);
    result.r_squared = ss_tot > 0.0 ? 1.0 - sse / ss_tot
                                    : std::numeric_limits<double>::quiet_NaN();
    return result;
}

GoodnessOfFit goodness_of_fit(const TimeSeries& series, const FitResult& fit) {
    series.check();
    const std::size_t n = series.times.size();
    if (n == 0) throw empty_input_error("goodness_of_fit: empty series");
    double sse = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid =
            gamma_kernel(series.times[i], fit.a, fit.b, fit.c) - series.values[i];
        sse += resid * resid;
        mean_v += series.values[i];
    }
    mean_v /= static_cast<double>(n);
    double ss_tot = 0.0;
    for (double v : series.values) ss_tot += (v - mean_v) * (v - mean_v);
    if (!(ss_tot > 0.0))
        throw std::domain_error("goodness_of_fit: r_squared undefined for a constant series");
    return {std::sqrt(sse / static_cast<double>(n)), 1.0 - sse / ss_tot};
}

}  // namespace hashpop
