#include "hashpop/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hashpop/errors.hpp"

namespace hashpop {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Standard normal CDF via erfc.
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

void NetworkParams::check() const {
    if (n_users < 1) throw std::domain_error("NetworkParams: n_users must be >= 1");
    if (!(mean_followers > 0.0) || !finite(mean_followers))
        throw std::domain_error("NetworkParams: mean_followers must be positive and finite");
    if (!finite(mean_sq_followers) ||
        mean_sq_followers < mean_followers * mean_followers * (1.0 - 1e-12))
        throw std::domain_error(
            "NetworkParams: mean_sq_followers must be finite and >= mean_followers^2");
}

void check(const PopularitySpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantPopularity>) {
                if (!(s.c >= 0.0 && s.c <= 1.0))
                    throw std::domain_error("ConstantPopularity: c must lie in [0,1]");
            } else if constexpr (std::is_same_v<T, GammaKernelPopularity>) {
                if (!(s.a > 0.0) || !(s.b > 0.0))
                    throw std::domain_error("GammaKernelPopularity: a and b must be positive");
                if (!(s.c >= 0.0 && s.c <= 1.0))
                    throw std::domain_error("GammaKernelPopularity: c must lie in [0,1]");
            } else {
                if (s.times.size() != s.rates.size() || s.times.empty())
                    throw std::domain_error("TabulatedPopularity: times/rates length mismatch");
                for (std::size_t i = 0; i < s.times.size(); ++i) {
                    if (!finite(s.times[i]) || !finite(s.rates[i]) || s.rates[i] < 0.0)
                        throw std::domain_error("TabulatedPopularity: knots must be finite, rates >= 0");
                    if (i > 0 && !(s.times[i] > s.times[i - 1]))
                        throw std::domain_error("TabulatedPopularity: times must be strictly ascending");
                }
            }
        },
        spec);
}

double evaluate_popularity(const PopularitySpec& spec, double t) {
    if (!(t >= 0.0)) throw std::domain_error("evaluate_popularity: t must be >= 0");
    return std::visit(
        [t](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantPopularity>) {
                return s.c;
            } else if constexpr (std::is_same_v<T, GammaKernelPopularity>) {
                if (t == 0.0) return 0.0;
                // c * exp(a + a*ln(t/(a b)) - t/b), stable for large a.
                return s.c * std::exp(s.a + s.a * std::log(t / (s.a * s.b)) - t / s.b);
            } else {
                if (t < s.times.front() || t > s.times.back())
                    throw std::domain_error("evaluate_popularity: t outside tabulated range");
                auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
                if (it == s.times.end()) return s.rates.back();
                const std::size_t hi = static_cast<std::size_t>(it - s.times.begin());
                if (hi == 0) return s.rates.front();
                const std::size_t lo = hi - 1;
                const double frac = (t - s.times[lo]) / (s.times[hi] - s.times[lo]);
                return s.rates[lo] + frac * (s.rates[hi] - s.rates[lo]);
            }
        },
        spec);
}

PopularityLandmarks popularity_landmarks(const PopularitySpec& spec) {
    const auto* g = std::get_if<GammaKernelPopularity>(&spec);
    if (!g)
        throw unsupported_variant_error(
            "popularity_landmarks: closed forms exist only for the gamma kernel");
    return {g->a * g->b, g->c, g->a * g->b + g->b * std::sqrt(g->a)};
}

double peak_rate(const PopularitySpec& spec) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, TabulatedPopularity>) {
                return *std::max_element(s.rates.begin(), s.rates.end());
            } else {
                return s.c;
            }
        },
        spec);
}

void check(const DegreeDistribution& dist) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DegenerateDegree>) {
                if (d.k < 0) throw std::domain_error("DegenerateDegree: k must be >= 0");
            } else if constexpr (std::is_same_v<T, DiscreteDegree>) {
                if (d.support.size() != d.probs.size() || d.support.empty())
                    throw std::domain_error("DiscreteDegree: support/probs length mismatch");
                double sum = 0.0;
                for (std::size_t i = 0; i < d.support.size(); ++i) {
                    if (d.support[i] < 0)
                        throw std::domain_error("DiscreteDegree: support must be non-negative");
                    if (i > 0 && d.support[i] <= d.support[i - 1])
                        throw std::domain_error("DiscreteDegree: support must be strictly ascending");
                    if (!(d.probs[i] >= 0.0))
                        throw std::domain_error("DiscreteDegree: probabilities must be >= 0");
                    sum += d.probs[i];
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw std::domain_error("DiscreteDegree: probabilities must sum to 1 within 1e-12");
            } else if constexpr (std::is_same_v<T, EmpiricalSampleDegree>) {
                if (d.counts.empty())
                    throw std::domain_error("EmpiricalSampleDegree: sample must be non-empty");
                for (long long c : d.counts)
                    if (c < 0) throw std::domain_error("EmpiricalSampleDegree: counts must be >= 0");
            } else if constexpr (std::is_same_v<T, LogNormalDiscretizedDegree>) {
                if (!(d.sigma > 0.0) || !finite(d.mu) || !finite(d.sigma))
                    throw std::domain_error("LogNormalDiscretizedDegree: sigma must be positive");
            } else {
                if (!(d.alpha > 1.0))
                    throw std::domain_error("ParetoDiscreteDegree: alpha must exceed 1");
                if (d.m_min < 1)
                    throw std::domain_error("ParetoDiscreteDegree: m_min must be >= 1");
            }
        },
        dist);
}

DiscreteDegree to_discrete(const DegreeDistribution& dist, double tail_tol) {
    check(dist);
    return std::visit(
        [tail_tol](const auto& d) -> DiscreteDegree {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, DegenerateDegree>) {
                return {{d.k}, {1.0}};
            } else if constexpr (std::is_same_v<T, DiscreteDegree>) {
                return d;
            } else if constexpr (std::is_same_v<T, EmpiricalSampleDegree>) {
                std::vector<long long> sorted = d.counts;
                std::sort(sorted.begin(), sorted.end());
                DiscreteDegree out;
                const double w = 1.0 / static_cast<double>(sorted.size());
                for (long long v : sorted) {
                    if (!out.support.empty() && out.support.back() == v)
                        out.probs.back() += w;
                    else {
                        out.support.push_back(v);
                        out.probs.push_back(w);
                    }
                }
                return out;
            } else if constexpr (std::is_same_v<T, LogNormalDiscretizedDegree>) {
                // Mass-rounding: p(k) = F(k + 1/2) - F(k - 1/2) on the log scale.
                auto cdf = [&](double x) {
                    if (x <= 0.0) return 0.0;
                    return norm_cdf((std::log(x) - d.mu) / d.sigma);
                };
                const long long k_hi = static_cast<long long>(
                    std::ceil(std::exp(d.mu + d.sigma * 8.0))) + 1;
                DiscreteDegree out;
                double cum = 0.0;
                for (long long k = 0; k <= k_hi; ++k) {
                    const double p = cdf(static_cast<double>(k) + 0.5) -
                                     cdf(static_cast<double>(k) - 0.5);
                    if (p > 0.0) {
                        out.support.push_back(k);
                        out.probs.push_back(p);
                    }
                    cum += p;
                    if (1.0 - cum < tail_tol && k > std::exp(d.mu)) break;
                }
                const double total = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
                for (double& p : out.probs) p /= total;
                return out;
            } else {
                // Truncate where the k^{-alpha} tail mass drops below tail_tol.
                DiscreteDegree out;
                double total = 0.0;
                for (long long k = d.m_min;; ++k) {
                    const double p = std::pow(static_cast<double>(k), -d.alpha);
                    out.support.push_back(k);
                    out.probs.push_back(p);
                    total += p;
                    // integral tail bound: sum_{j>k} j^-a <= k^{1-a}/(a-1)
                    const double tail =
                        std::pow(static_cast<double>(k), 1.0 - d.alpha) / (d.alpha - 1.0);
                    if (tail < tail_tol * total) break;
                    if (out.support.size() > 50'000'000)
                        throw numeric_error("to_discrete: Pareto tail truncation did not converge");
                }
                for (double& p : out.probs) p /= total;
                return out;
            }
        },
        dist);
}

DegreeMoments degree_moments(const DegreeDistribution& dist) {
    check(dist);
    if (const auto* p = std::get_if<ParetoDiscreteDegree>(&dist)) {
        if (p->alpha <= 2.0)
            throw divergent_moment_error("degree_moments: Pareto mean diverges for alpha <= 2");
        if (p->alpha <= 3.0)
            throw divergent_moment_error(
                "degree_moments: Pareto second moment diverges for alpha <= 3");
    }
    if (const auto* d = std::get_if<DegenerateDegree>(&dist)) {
        const double k = static_cast<double>(d->k);
        return {k, k * k};
    }
    if (const auto* e = std::get_if<EmpiricalSampleDegree>(&dist)) {
        double m = 0.0, m2 = 0.0;
        for (long long c : e->counts) {
            m += static_cast<double>(c);
            m2 += static_cast<double>(c) * static_cast<double>(c);
        }
        const double n = static_cast<double>(e->counts.size());
        return {m / n, m2 / n};
    }
    const DiscreteDegree pmf = to_discrete(dist);
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < pmf.support.size(); ++i) {
        const double k = static_cast<double>(pmf.support[i]);
        m += k * pmf.probs[i];
        m2 += k * k * pmf.probs[i];
    }
    return {m, m2};
}

double degree_mgf(const DegreeDistribution& dist, double s) {
    check(dist);
    if (s == 0.0) return 1.0;
    if (s > 0.0) {
        if (std::holds_alternative<LogNormalDiscretizedDegree>(dist))
            throw std::domain_error("degree_mgf: log-normal mgf diverges for s > 0");
        if (std::holds_alternative<ParetoDiscreteDegree>(dist))
            throw std::domain_error("degree_mgf: Pareto mgf diverges for s > 0");
    }
    const DiscreteDegree pmf = to_discrete(dist);
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.support.size(); ++i)
        m += pmf.probs[i] * std::exp(s * static_cast<double>(pmf.support[i]));
    if (!std::isfinite(m)) throw std::domain_error("degree_mgf: divergent at requested s");
    return m;
}

DegreeSampler::DegreeSampler(const DegreeDistribution& dist) {
    const DiscreteDegree pmf = to_discrete(dist);
    support_ = pmf.support;
    cdf_.resize(pmf.probs.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        cum += pmf.probs[i];
        cdf_[i] = cum;
    }
    cdf_.back() = 1.0;
}

long long DegreeSampler::operator()(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf_.begin()), support_.size() - 1);
    return support_[i];
}

long long sample_degree(const DegreeDistribution& dist, Rng& rng) {
    return DegreeSampler(dist)(rng);
}

void TimeSeries::check() const {
    if (times.size() != values.size())
        throw std::domain_error("TimeSeries: times/values length mismatch");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::domain_error("TimeSeries: times must be strictly ascending");
}

}  // namespace hashpop
