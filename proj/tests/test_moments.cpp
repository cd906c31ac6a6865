#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hashpop/errors.hpp"
#include "hashpop/moments.hpp"
#include "hashpop/rng.hpp"
#include "oracles.hpp"

using namespace hashpop;

namespace {

const NetworkParams kParams{1000, 5.0, 50.0};

double quadrature_intensity(const NetworkParams& params,
                            const PopularitySpec& spec, double t) {
    return static_cast<double>(params.n_users) *
           oracle::integrate([&](double s) { return evaluate_popularity(spec, s); },
                             0.0, t, 1e-13);
}

}  // namespace

TEST_CASE("cumulative_intensity constant closed form") {
    CHECK(cumulative_intensity(kParams, ConstantPopularity{0.01}, 10.0) ==
          doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("cumulative_intensity vanishes at t = 0") {
    CHECK(cumulative_intensity(kParams, ConstantPopularity{0.01}, 0.0) == 0.0);
    CHECK(cumulative_intensity(kParams, GammaKernelPopularity{2.0, 1.5, 0.3}, 0.0) ==
          0.0);
    CHECK_THROWS_AS(cumulative_intensity(kParams, ConstantPopularity{0.01}, -1.0),
                    std::domain_error);
}

TEST_CASE("gamma-kernel intensity matches the quadrature oracle") {
    const NetworkParams params{500, 1.0, 1.0};
    const PopularitySpec spec = GammaKernelPopularity{2.0, 1.5, 0.3};
    const double closed = cumulative_intensity(params, spec, 4.0);
    const double quad = quadrature_intensity(params, spec, 4.0);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("gamma-kernel intensity vs quadrature over randomized configurations") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const GammaKernelPopularity g{0.5 + 5.0 * rng.uniform01(),
                                      0.2 + 2.0 * rng.uniform01(),
                                      0.05 + 0.9 * rng.uniform01()};
        const double t = (0.2 + 3.0 * rng.uniform01()) * g.a * g.b;
        const double closed = cumulative_intensity(kParams, g, t);
        const double quad = quadrature_intensity(kParams, g, t);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("tabulated intensity is the trapezoid integral") {
    const PopularitySpec tab =
        TabulatedPopularity{{0.0, 1.0, 3.0}, {0.0, 0.2, 0.1}};
    // trapezoid: 0.5*(0+0.2)*1 + 0.5*(0.2+0.1)*2 = 0.1 + 0.3
    CHECK(cumulative_intensity(kParams, tab, 3.0) ==
          doctest::Approx(1000.0 * 0.4).epsilon(1e-12));
    // partial segment ends mid-knot
    CHECK(cumulative_intensity(kParams, tab, 2.0) ==
          doctest::Approx(1000.0 * (0.1 + 0.5 * (0.2 + 0.15))).epsilon(1e-12));
}

TEST_CASE("mean_reads closed form and zero start") {
    CHECK(mean_reads(kParams, ConstantPopularity{0.01}, 10.0) ==
          doctest::Approx(500.0).epsilon(1e-14));
    CHECK(mean_reads(kParams, GammaKernelPopularity{2.0, 1.0, 0.4}, 0.0) == 0.0);
}

TEST_CASE("variance over mean equals <f^2>/<f> exactly") {
    CHECK(variance_reads(kParams, ConstantPopularity{0.01}, 10.0) ==
          doctest::Approx(5000.0).epsilon(1e-14));
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const NetworkParams params{
            1 + static_cast<long long>(rng.uniform01() * 10000),
            0.1 + 20.0 * rng.uniform01(), 0.0};
        const NetworkParams full{params.n_users, params.mean_followers,
                                 params.mean_followers * params.mean_followers *
                                     (1.0 + rng.uniform01())};
        const PopularitySpec spec =
            i % 2 == 0
                ? PopularitySpec(ConstantPopularity{0.01 + 0.9 * rng.uniform01()})
                : PopularitySpec(GammaKernelPopularity{0.5 + 4.0 * rng.uniform01(),
                                                       0.2 + 2.0 * rng.uniform01(),
                                                       0.05 + 0.9 * rng.uniform01()});
        const double t = 0.1 + 10.0 * rng.uniform01();
        const double mean = mean_reads(full, spec, t);
        const double var = variance_reads(full, spec, t);
        if (mean > 0.0)
            CHECK(var / mean == doctest::Approx(full.mean_sq_followers /
                                                full.mean_followers)
                                    .epsilon(1e-12));
    }
}

TEST_CASE("mean and variance are nondecreasing in t") {
    const PopularitySpec spec = GammaKernelPopularity{3.0, 0.5, 0.2};
    double prev_mean = 0.0, prev_var = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double t = 0.1 * i;
        const double m = mean_reads(kParams, spec, t);
        const double v = variance_reads(kParams, spec, t);
        CHECK(m >= prev_mean);
        CHECK(v >= prev_var);
        prev_mean = m;
        prev_var = v;
    }
}

TEST_CASE("asymptotic_moments: exact vs Stirling and shared Lambda factor") {
    const PopularitySpec spec = GammaKernelPopularity{50.0, 0.5, 0.3};
    const auto am = asymptotic_moments(kParams, spec);
    CHECK(std::abs(am.mean_limit_stirling / am.mean_limit_exact - 1.0) <= 0.02);
    CHECK(am.var_limit_exact / am.mean_limit_exact ==
          doctest::Approx(kParams.mean_sq_followers / kParams.mean_followers)
              .epsilon(1e-12));
    CHECK_THROWS_AS(asymptotic_moments(kParams, ConstantPopularity{0.1}),
                    unsupported_variant_error);
}

TEST_CASE("mean_reads saturates to the exact limit") {
    const GammaKernelPopularity g{2.0, 1.0, 0.3};
    const auto am = asymptotic_moments(kParams, g);
    const double t = g.a * g.b + 40.0 * g.b;
    CHECK(mean_reads(kParams, g, t) ==
          doctest::Approx(am.mean_limit_exact).epsilon(0.001));
    // The limit bounds the mean from above everywhere.
    for (int i = 1; i <= 200; ++i)
        CHECK(mean_reads(kParams, g, 0.3 * i) <=
              am.mean_limit_exact * (1.0 + 1e-12));
}

TEST_CASE("mgf_value boundary values") {
    const DegreeDistribution dist = DiscreteDegree{{1, 2, 3}, {0.5, 0.3, 0.2}};
    const PopularitySpec spec = GammaKernelPopularity{2.0, 1.0, 0.1};
    CHECK(mgf_value(kParams, spec, dist, 0.0, 5.0) == doctest::Approx(1.0));
    CHECK(mgf_value(kParams, spec, dist, -0.7, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        mgf_value(kParams, spec, LogNormalDiscretizedDegree{1.0, 0.5}, 0.1, 5.0),
        std::domain_error);
}

TEST_CASE("mgf s-derivatives at 0 reproduce the first two moments") {
    const DegreeDistribution dist = DiscreteDegree{{1, 2, 3}, {0.5, 0.3, 0.2}};
    const auto dm = degree_moments(dist);
    const NetworkParams full{200, dm.mean, dm.mean_sq};
    const PopularitySpec spec = GammaKernelPopularity{2.0, 1.0, 0.05};
    const double t = 3.0;
    const double h = 1e-5;

    const double m_plus = mgf_value(full, spec, dist, h, t);
    const double m_minus = mgf_value(full, spec, dist, -h, t);
    const double m_zero = mgf_value(full, spec, dist, 0.0, t);

    const double d1 = (m_plus - m_minus) / (2.0 * h);
    CHECK(d1 == doctest::Approx(mean_reads(full, spec, t)).epsilon(1e-6));

    const double d2 = (m_plus - 2.0 * m_zero + m_minus) / (h * h);
    const double mean = mean_reads(full, spec, t);
    const double second_moment = variance_reads(full, spec, t) + mean * mean;
    CHECK(d2 == doctest::Approx(second_moment).epsilon(1e-5));
}

TEST_CASE("normal band quantile") {
    CHECK(normal_band_quantile(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(normal_band_quantile(0.0) == 0.0);
    CHECK_THROWS_AS(normal_band_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(normal_band_quantile(-0.1), std::domain_error);
}

TEST_CASE("confidence_band values and degeneracy") {
    const PopularitySpec spec = ConstantPopularity{0.01};
    const std::vector<double> times{0.0, 10.0};
    const auto band = confidence_band(kParams, spec, times, 0.95);
    CHECK(band.band_low[0] == 0.0);
    CHECK(band.band_high[0] == 0.0);
    // t=10: mean 500, variance 5000.
    const double half = 1.959964 * std::sqrt(5000.0);
    CHECK(band.band_low[1] == doctest::Approx(500.0 - half).epsilon(1e-6));
    CHECK(band.band_high[1] == doctest::Approx(500.0 + half).epsilon(1e-6));

    const auto degenerate = confidence_band(kParams, spec, times, 0.0);
    CHECK(degenerate.band_low[1] == doctest::Approx(degenerate.mean[1]));
    CHECK(degenerate.band_high[1] == doctest::Approx(degenerate.mean[1]));
}
