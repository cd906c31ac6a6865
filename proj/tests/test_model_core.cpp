#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hashpop/errors.hpp"
#include "hashpop/rng.hpp"
#include "hashpop/types.hpp"

using namespace hashpop;

TEST_CASE("evaluate_popularity gamma kernel peaks at c when t = a*b") {
    const PopularitySpec spec = GammaKernelPopularity{4.0, 2.0, 0.3};
    CHECK(evaluate_popularity(spec, 8.0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("evaluate_popularity gamma kernel vanishes at t = 0") {
    const PopularitySpec spec = GammaKernelPopularity{2.0, 1.0, 0.5};
    CHECK(evaluate_popularity(spec, 0.0) == 0.0);
}

TEST_CASE("evaluate_popularity constant case") {
    const PopularitySpec spec = ConstantPopularity{0.01};
    CHECK(evaluate_popularity(spec, 7.3) == 0.01);
}

TEST_CASE("evaluate_popularity rejects negative t and extrapolation") {
    const PopularitySpec g = GammaKernelPopularity{2.0, 1.0, 0.5};
    CHECK_THROWS_AS(evaluate_popularity(g, -1.0), std::domain_error);
    const PopularitySpec tab = TabulatedPopularity{{0.0, 1.0, 2.0}, {0.1, 0.2, 0.0}};
    CHECK(evaluate_popularity(tab, 0.5) == doctest::Approx(0.15));
    CHECK_THROWS_AS(evaluate_popularity(tab, 2.5), std::domain_error);
}

TEST_CASE("popularity never exceeds its peak and stays non-negative") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = 0.3 + 8.0 * rng.uniform01();
        const double b = 0.1 + 3.0 * rng.uniform01();
        const double c = rng.uniform01();
        const PopularitySpec spec = GammaKernelPopularity{a, b, c};
        for (int i = 0; i < 200; ++i) {
            const double t = 20.0 * a * b * rng.uniform01();
            const double w = evaluate_popularity(spec, t);
            CHECK(w >= 0.0);
            CHECK(w <= c * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("popularity_landmarks closed forms") {
    auto lm = popularity_landmarks(GammaKernelPopularity{4.0, 2.0, 0.3});
    CHECK(lm.t_max == doctest::Approx(8.0));
    CHECK(lm.w_max == doctest::Approx(0.3));
    CHECK(lm.t_inf == doctest::Approx(12.0));

    lm = popularity_landmarks(GammaKernelPopularity{1.0, 1.0, 1.0});
    CHECK(lm.t_max == doctest::Approx(1.0));
    CHECK(lm.t_inf == doctest::Approx(2.0));

    lm = popularity_landmarks(GammaKernelPopularity{9.0, 0.5, 0.2});
    CHECK(lm.t_max == doctest::Approx(4.5));
    CHECK(lm.t_inf == doctest::Approx(6.0));

    CHECK_THROWS_AS(popularity_landmarks(ConstantPopularity{0.1}),
                    unsupported_variant_error);
}

TEST_CASE("gamma kernel maximum dominates a dense grid") {
    const GammaKernelPopularity g{3.0, 0.7, 0.4};
    const PopularitySpec spec = g;
    const auto lm = popularity_landmarks(spec);
    const double w_peak = evaluate_popularity(spec, lm.t_max);
    const double hi = lm.t_max + 10.0 * g.b;
    for (int i = 0; i <= 10000; ++i) {
        const double t = hi * static_cast<double>(i) / 10000.0;
        CHECK(w_peak >= evaluate_popularity(spec, t) - 1e-15);
    }
}

TEST_CASE("second finite difference changes sign once, at the inflection point") {
    const GammaKernelPopularity g{4.0, 2.0, 0.3};
    const PopularitySpec spec = g;
    const auto lm = popularity_landmarks(spec);
    const int n = 10000;
    const double lo = lm.t_max;
    const double hi = lm.t_max + 10.0 * g.b;
    const double h = (hi - lo) / n;
    int sign_changes = 0;
    double change_at = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 1; i < n; ++i) {
        const double t = lo + i * h;
        const double d2 = evaluate_popularity(spec, t - h) -
                          2.0 * evaluate_popularity(spec, t) +
                          evaluate_popularity(spec, t + h);
        if (have_prev && prev * d2 < 0.0) {
            ++sign_changes;
            change_at = t;
        }
        if (d2 != 0.0) {
            prev = d2;
            have_prev = true;
        }
    }
    CHECK(sign_changes == 1);
    CHECK(std::abs(change_at - lm.t_inf) <= 2.0 * h);
}

TEST_CASE("degree_moments exact cases") {
    auto m = degree_moments(DegenerateDegree{3});
    CHECK(m.mean == doctest::Approx(3.0));
    CHECK(m.mean_sq == doctest::Approx(9.0));

    m = degree_moments(EmpiricalSampleDegree{{10, 4}});
    CHECK(m.mean == doctest::Approx(7.0));
    CHECK(m.mean_sq == doctest::Approx(58.0));

    m = degree_moments(DiscreteDegree{{1, 2}, {0.5, 0.5}});
    CHECK(m.mean == doctest::Approx(1.5));
    CHECK(m.mean_sq == doctest::Approx(2.5));
}

TEST_CASE("degree_moments satisfies Jensen for every variant") {
    const DegreeDistribution dists[] = {
        DegenerateDegree{5},
        DiscreteDegree{{0, 3, 9}, {0.2, 0.5, 0.3}},
        EmpiricalSampleDegree{{1, 1, 2, 8, 40}},
        LogNormalDiscretizedDegree{1.2, 0.8},
        ParetoDiscreteDegree{3.5, 2},
    };
    for (const auto& d : dists) {
        const auto m = degree_moments(d);
        CHECK(m.mean_sq >= m.mean * m.mean - 1e-9);
    }
}

TEST_CASE("Pareto heavy tails raise divergent-moment errors") {
    CHECK_THROWS_AS(degree_moments(ParetoDiscreteDegree{2.5, 1}),
                    divergent_moment_error);
    CHECK_THROWS_WITH_AS(degree_moments(ParetoDiscreteDegree{1.5, 1}),
                         doctest::Contains("mean"), divergent_moment_error);
}

TEST_CASE("lognormal discretization matches continuous moments roughly") {
    const double mu = 1.0, sigma = 0.5;
    const auto m = degree_moments(LogNormalDiscretizedDegree{mu, sigma});
    // Continuous reference; integer rounding shifts it slightly.
    const double cont_mean = std::exp(mu + sigma * sigma / 2.0);
    CHECK(m.mean == doctest::Approx(cont_mean).epsilon(0.05));
}

TEST_CASE("sample_degree point mass and zero-probability branch") {
    Rng rng(123);
    CHECK(sample_degree(DegenerateDegree{5}, rng) == 5);
    const DegreeDistribution d = DiscreteDegree{{0, 1}, {1.0, 0.0}};
    DegreeSampler sampler(d);
    for (int i = 0; i < 1000; ++i) CHECK(sampler(rng) == 0);
}

TEST_CASE("sample_degree frequencies converge (binomial 3-sigma window)") {
    const DegreeDistribution d = DiscreteDegree{{1, 2}, {0.5, 0.5}};
    DegreeSampler sampler(d);
    Rng rng(42);
    const int n = 100000;
    int ones = 0;
    for (int i = 0; i < n; ++i)
        if (sampler(rng) == 1) ++ones;
    const double freq = static_cast<double>(ones) / n;
    // 3 sigma of a Binomial(1e5, 0.5) proportion is ~0.0047 < 0.01.
    CHECK(std::abs(freq - 0.5) < 0.01);
}

TEST_CASE("sample_degree is bit-reproducible for a fixed seed") {
    const DegreeDistribution d = EmpiricalSampleDegree{{1, 4, 4, 9, 30}};
    DegreeSampler sampler(d);
    std::vector<long long> first, second;
    {
        Rng rng(777);
        for (int i = 0; i < 256; ++i) first.push_back(sampler(rng));
    }
    {
        Rng rng(777);
        for (int i = 0; i < 256; ++i) second.push_back(sampler(rng));
    }
    CHECK(first == second);
}

TEST_CASE("invariant checks reject malformed inputs") {
    CHECK_THROWS_AS(NetworkParams({10, 2.0, 1.0}).check(), std::domain_error);
    CHECK_THROWS_AS(check(PopularitySpec(ConstantPopularity{1.5})), std::domain_error);
    CHECK_THROWS_AS(check(PopularitySpec(GammaKernelPopularity{-1.0, 1.0, 0.5})),
                    std::domain_error);
    CHECK_THROWS_AS(
        check(PopularitySpec(TabulatedPopularity{{0.0, 0.0}, {0.1, 0.1}})),
        std::domain_error);
    CHECK_THROWS_AS(check(DegreeDistribution(DiscreteDegree{{1, 2}, {0.6, 0.6}})),
                    std::domain_error);
    CHECK_THROWS_AS(check(DegreeDistribution(EmpiricalSampleDegree{{}})),
                    std::domain_error);
    CHECK_THROWS_AS(TimeSeries({{0.0, 0.0}, {1.0, 2.0}}).check(), std::domain_error);
}
