#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hashpop/fitting.hpp"
#include "hashpop/moments.hpp"
#include "hashpop/pipeline.hpp"
#include "hashpop/simulator.hpp"
#include "hashpop/special_functions.hpp"
#include "hashpop/types.hpp"

namespace py = pybind11;
using namespace hashpop;

namespace {

// kwargs-friendly constructors for the two tagged unions.
PopularitySpec make_pop(const std::string& kind, py::kwargs kw) {
    if (kind == "const") return ConstantPopularity{kw["c"].cast<double>()};
    if (kind == "gamma")
        return GammaKernelPopularity{kw["a"].cast<double>(), kw["b"].cast<double>(),
                                     kw["c"].cast<double>()};
    if (kind == "tabulated")
        return TabulatedPopularity{kw["times"].cast<std::vector<double>>(),
                                   kw["rates"].cast<std::vector<double>>()};
    throw py::value_error("popularity kind must be const, gamma or tabulated");
}

DegreeDistribution make_dist(const std::string& kind, py::kwargs kw) {
    if (kind == "degenerate") return DegenerateDegree{kw["k"].cast<long long>()};
    if (kind == "discrete")
        return DiscreteDegree{kw["support"].cast<std::vector<long long>>(),
                              kw["probs"].cast<std::vector<double>>()};
    if (kind == "empirical")
        return EmpiricalSampleDegree{kw["counts"].cast<std::vector<long long>>()};
    if (kind == "lognormal")
        return LogNormalDiscretizedDegree{kw["mu"].cast<double>(),
                                          kw["sigma"].cast<double>()};
    if (kind == "pareto")
        return ParetoDiscreteDegree{kw["alpha"].cast<double>(),
                                    kw["m_min"].cast<long long>()};
    throw py::value_error(
        "degree kind must be degenerate, discrete, empirical, lognormal or pareto");
}

}  // namespace

PYBIND11_MODULE(_hashpop, m) {
    m.doc() = "Master-equation model of hashtag popularity";

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init([](long long n, double f, double f2) {
                 NetworkParams p{n, f, f2};
                 p.check();
                 return p;
             }),
             py::arg("n_users"), py::arg("mean_followers"),
             py::arg("mean_sq_followers"))
        .def_readonly("n_users", &NetworkParams::n_users)
        .def_readonly("mean_followers", &NetworkParams::mean_followers)
        .def_readonly("mean_sq_followers", &NetworkParams::mean_sq_followers);

    // the tagged unions cross the boundary as their registered alternatives
    // (pybind11's std::variant caster handles both directions)
    py::class_<ConstantPopularity>(m, "ConstantPopularity")
        .def_readonly("c", &ConstantPopularity::c);
    py::class_<GammaKernelPopularity>(m, "GammaKernelPopularity")
        .def_readonly("a", &GammaKernelPopularity::a)
        .def_readonly("b", &GammaKernelPopularity::b)
        .def_readonly("c", &GammaKernelPopularity::c);
    py::class_<TabulatedPopularity>(m, "TabulatedPopularity")
        .def_readonly("times", &TabulatedPopularity::times)
        .def_readonly("rates", &TabulatedPopularity::rates);
    py::class_<DegenerateDegree>(m, "DegenerateDegree")
        .def_readonly("k", &DegenerateDegree::k);
    py::class_<DiscreteDegree>(m, "DiscreteDegree")
        .def_readonly("support", &DiscreteDegree::support)
        .def_readonly("probs", &DiscreteDegree::probs);
    py::class_<EmpiricalSampleDegree>(m, "EmpiricalSampleDegree")
        .def_readonly("counts", &EmpiricalSampleDegree::counts);
    py::class_<LogNormalDiscretizedDegree>(m, "LogNormalDiscretizedDegree")
        .def_readonly("mu", &LogNormalDiscretizedDegree::mu)
        .def_readonly("sigma", &LogNormalDiscretizedDegree::sigma);
    py::class_<ParetoDiscreteDegree>(m, "ParetoDiscreteDegree")
        .def_readonly("alpha", &ParetoDiscreteDegree::alpha)
        .def_readonly("m_min", &ParetoDiscreteDegree::m_min);
    m.def("popularity", &make_pop, py::arg("kind"));
    m.def("degree", &make_dist, py::arg("kind"));

    m.def("evaluate_popularity", &evaluate_popularity);
    m.def("popularity_landmarks", [](const PopularitySpec& s) {
        const auto lm = popularity_landmarks(s);
        return py::make_tuple(lm.t_max, lm.w_max, lm.t_inf);
    });
    m.def("degree_moments", [](const DegreeDistribution& d) {
        const auto mo = degree_moments(d);
        return py::make_tuple(mo.mean, mo.mean_sq);
    });

    m.def("lower_incomplete_gamma", &lower_incomplete_gamma);
    m.def("log_gamma", &log_gamma);
    m.def("stirling_gamma", &stirling_gamma);

    m.def("cumulative_intensity", &cumulative_intensity);
    m.def("mean_reads", &mean_reads);
    m.def("variance_reads", &variance_reads);
    m.def("mgf_value", &mgf_value);
    m.def("asymptotic_moments", [](const NetworkParams& p, const PopularitySpec& s) {
        const auto am = asymptotic_moments(p, s);
        py::dict d;
        d["mean_limit_exact"] = am.mean_limit_exact;
        d["mean_limit_stirling"] = am.mean_limit_stirling;
        d["var_limit_exact"] = am.var_limit_exact;
        d["var_limit_stirling"] = am.var_limit_stirling;
        return d;
    });
    m.def("confidence_band",
          [](const NetworkParams& p, const PopularitySpec& s,
             const std::vector<double>& times, double level) {
              const auto c = confidence_band(p, s, times, level);
              py::dict d;
              d["times"] = c.times;
              d["mean"] = c.mean;
              d["variance"] = c.variance;
              d["band_low"] = c.band_low;
              d["band_high"] = c.band_high;
              return d;
          });

    m.def("simulate_events",
          [](const NetworkParams& p, const PopularitySpec& s,
             const DegreeDistribution& d, double horizon, std::uint64_t seed) {
              const auto tr = simulate_events(p, s, d, horizon, seed);
              return py::make_tuple(tr.event_times, tr.jump_sizes);
          });
    m.def("simulate_micro",
          [](const NetworkParams& p, const PopularitySpec& s,
             const DegreeDistribution& d, double dt, double horizon,
             std::uint64_t seed) {
              const auto tr = simulate_micro(p, s, d, dt, horizon, seed);
              return py::make_tuple(tr.event_times, tr.jump_sizes);
          });
    m.def("evolve_master_equation",
          [](const NetworkParams& p, const PopularitySpec& s,
             const DegreeDistribution& d, long long x_max,
             const std::vector<double>& times, double dt, double leak_tol) {
              const auto g = evolve_master_equation(p, s, d, x_max, times, dt, leak_tol);
              py::dict out;
              out["times"] = g.times;
              out["pmf"] = g.pmf;
              out["leak"] = g.leak;
              return out;
          },
          py::arg("params"), py::arg("spec"), py::arg("dist"), py::arg("x_max"),
          py::arg("times"), py::arg("dt") = 0.0, py::arg("leak_tol") = 1e-6);
    m.def("ensemble_statistics",
          [](const NetworkParams& p, const PopularitySpec& s,
             const DegreeDistribution& d, double horizon,
             const std::vector<double>& grid, long long reps, std::uint64_t seed) {
              const auto st = ensemble_statistics(p, s, d, horizon, grid, reps, seed);
              py::dict out;
              out["times"] = st.times;
              out["sample_mean"] = st.sample_mean;
              out["sample_var"] = st.sample_var;
              out["standard_error"] = st.standard_error;
              return out;
          });

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init([](std::vector<double> t, std::vector<double> v) {
                 TimeSeries s{std::move(t), std::move(v)};
                 s.check();
                 return s;
             }),
             py::arg("times"), py::arg("values"))
        .def_readonly("times", &TimeSeries::times)
        .def_readonly("values", &TimeSeries::values);

    m.def("moving_average", &moving_average);
    m.def("lm_fit_gamma",
          [](const TimeSeries& series) {
              const FitResult fit = lm_fit_gamma(series, initial_guess(series));
              py::dict d;
              d["a"] = fit.a;
              d["b"] = fit.b;
              d["c"] = fit.c;
              d["rmse"] = fit.rmse;
              d["r_squared"] = fit.r_squared;
              d["iterations"] = fit.iterations;
              d["converged"] = fit.converged;
              return d;
          });

    m.def("validate_file",
          [](const std::string& path, const std::string& format, int bins,
             int smooth_k, double level) {
              const Dataset ds = load_dataset(path, parse_format(format));
              ValidateOptions opt;
              opt.n_bins = bins;
              opt.smooth_k = smooth_k;
              opt.level = level;
              const ValidationReport r = validate(ds, opt);
              py::dict d;
              d["coverage_fraction"] = r.coverage_fraction;
              d["long_run_limit"] = r.long_run_limit;
              d["a"] = r.fit.a;
              d["b"] = r.fit.b;
              d["c"] = r.fit.c;
              d["converged"] = r.fit.converged;
              d["n_users"] = r.network.n_users;
              return d;
          },
          py::arg("path"), py::arg("format") = "csv", py::arg("bins") = 0,
          py::arg("smooth_k") = 5, py::arg("level") = 0.95);
}
