#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/field.hpp"
#include "gmclab/montecarlo.hpp"
#include "gmclab/regions.hpp"
#include "gmclab/stats.hpp"
#include "gmclab/version.hpp"
#include "gmclab/wavelets.hpp"

namespace py = pybind11;
using namespace gmclab;
using Complex = std::complex<double>;

namespace {

regions::Curve curve_from_name(const std::string& name) {
  if (name == "eye") return regions::Curve::kEye;
  if (name == "moment") return regions::Curve::kMoment;
  if (name == "l2") return regions::Curve::kL2Circle;
  throw std::invalid_argument("unknown curve '" + name +
                              "' (expected eye, moment or l2)");
}

chaos::TestFunction function_from_args(const field::GridSpec& grid,
                                       const std::string& kind,
                                       field::Point center, double scale) {
  return montecarlo::make_test_function({kind, center, scale}, grid);
}

py::dict regularity_dict(const wavelets::BesovEstimate& est) {
  py::dict out;
  out["s_hat"] = est.estimate.smooth_input
                     ? py::object(py::none())
                     : py::object(py::float_(est.estimate.s_hat));
  out["slope"] = est.estimate.slope;
  out["stderr"] = est.estimate.stderr_;
  out["smooth_input"] = est.estimate.smooth_input;
  out["window"] = est.window;
  out["s_predicted"] = est.s_predicted;
  py::list levels;
  for (const auto& st : est.stats) {
    py::dict row;
    row["j"] = st.j;
    row["count"] = st.count;
    row["s_j"] = st.s_j;
    row["a_j"] = st.a_j;
    levels.append(row);
  }
  out["levels"] = levels;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Numerical laboratory for complex multiplicative chaos: parameter-plane "
      "geometry, log-correlated field synthesis, wavelet regularity "
      "estimation and tail statistics.";
  mod.attr("__version__") = kVersion;

  // Parameter-plane geometry.
  mod.def("in_ea", &regions::in_ea, py::arg("beta"), py::arg("d"),
          "True when the chaos at this parameter has a subcritical limit.");
  mod.def("in_eap", &regions::in_eap, py::arg("beta"), py::arg("p"),
          py::arg("d"),
          "True when the p-th absolute moment of the chaos stays finite.");
  mod.def("besov_threshold", &regions::besov_threshold, py::arg("beta"),
          py::arg("p"), py::arg("d"),
          "Critical regularity exponent of the chaos.");
  mod.def("real_moment_cutoff", &regions::real_moment_cutoff, py::arg("beta"),
          py::arg("d"), "Largest finite moment order for real parameters.");
  mod.def("optimal_r", &regions::optimal_r, py::arg("beta"), py::arg("p"),
          py::arg("d"));
  mod.def("gamma_exponent", &regions::gamma_exponent, py::arg("r"),
          py::arg("s"), py::arg("p"), py::arg("beta"), py::arg("d"));
  mod.def(
      "boundary_polyline",
      [](const std::string& curve, double p, int d, int n_points) {
        return regions::boundary_polyline(curve_from_name(curve), p, d,
                                          n_points);
      },
      py::arg("curve"), py::arg("p") = 2.0, py::arg("d") = 1,
      py::arg("n_points") = 256,
      "Closed counterclockwise polyline of the requested boundary.");

  // Field synthesis.
  mod.def("sigma2_analytic", &field::sigma2_analytic, py::arg("d"),
          py::arg("cutoff"), "Pointwise variance of the cutoff field.");
  mod.def(
      "covariance_oracle",
      [](int d, field::Point x, field::Point y, int cutoff) {
        return field::covariance_oracle(field::CovarianceModel{d}, x, y,
                                        cutoff);
      },
      py::arg("d"), py::arg("x"), py::arg("y"), py::arg("cutoff"),
      "Exact covariance of the cutoff field by compensated mode summation.");
  mod.def(
      "field_realization",
      [](int d, int m, int cutoff, std::uint64_t seed) {
        const field::GridSpec grid(d, m);
        const auto modes = field::sample_field(grid, cutoff, seed);
        const auto r = field::render(modes);
        py::dict out;
        out["values"] = r.values;
        out["sigma2"] = r.sigma2;
        out["imag_residue"] = r.imag_residue;
        return out;
      },
      py::arg("d"), py::arg("m"), py::arg("cutoff"), py::arg("seed"),
      "Grid values of one field realization (row-major, x fastest).");
  mod.def(
      "chaos_realization",
      [](Complex beta, int d, int m, int cutoff, std::uint64_t seed) {
        const field::GridSpec grid(d, m);
        const auto modes = field::sample_field(grid, cutoff, seed);
        const auto mu =
            chaos::wick_exponential(field::render(modes), modes.sigma2, beta);
        py::dict out;
        out["values"] = mu.values;
        out["log_scale"] = mu.log_scale;
        out["sigma2"] = modes.sigma2;
        return out;
      },
      py::arg("beta"), py::arg("d"), py::arg("m"), py::arg("cutoff"),
      py::arg("seed"),
      "Grid density of the normalized exponential of one field realization.");

  // Monte Carlo sampling of the chaos paired with a test function.
  mod.def(
      "pair_samples",
      [](Complex beta, int d, int m, int cutoff, const std::string& f_kind,
         field::Point f_center, double f_scale, int count, std::uint64_t seed,
         int threads) {
        const field::GridSpec grid(d, m);
        const auto f = function_from_args(grid, f_kind, f_center, f_scale);
        return montecarlo::collect_pair_samples(beta, grid, cutoff, f, count,
                                                seed, threads);
      },
      py::arg("beta"), py::arg("d"), py::arg("m"), py::arg("cutoff"),
      py::arg("f_kind"), py::arg("f_center"), py::arg("f_scale"),
      py::arg("count"), py::arg("seed"), py::arg("threads") = 0,
      "One <mu, f> sample per realization; reproducible for any thread "
      "count.");
  mod.def(
      "scaling_pair_samples",
      [](Complex beta, int d, int m, field::Point center, double bump_scale,
         double epsilon, int cutoff, int count, std::uint64_t seed,
         int threads) {
        const field::GridSpec grid(d, m);
        const auto s = chaos::scaling_pair_samples(
            beta, grid, center, bump_scale, epsilon, cutoff, count, seed,
            threads);
        py::dict out;
        out["lhs"] = s.lhs;
        out["rhs"] = s.rhs;
        out["epsilon"] = s.epsilon;
        out["cutoff"] = s.cutoff;
        return out;
      },
      py::arg("beta"), py::arg("d"), py::arg("m"), py::arg("center"),
      py::arg("bump_scale"), py::arg("epsilon"), py::arg("cutoff"),
      py::arg("count"), py::arg("seed"), py::arg("threads") = 0,
      "Matched samples of both sides of the rescaling identity.");
  mod.def(
      "estimate_abs_moment",
      [](Complex beta, double p, int d, int m, int cutoff,
         const std::string& f_kind, field::Point f_center, double f_scale,
         int count, std::uint64_t seed, int threads) {
        const field::GridSpec grid(d, m);
        const auto f = function_from_args(grid, f_kind, f_center, f_scale);
        const auto rep = montecarlo::estimate_abs_moment(
            beta, p, grid, cutoff, f, count, seed, threads);
        py::dict out;
        out["estimate"] = rep.estimate;
        out["ci"] = py::make_tuple(rep.ci_lo, rep.ci_hi);
        out["region_ok"] = rep.region_ok;
        out["divergence_expected"] = rep.divergence_expected;
        out["ladder_cutoffs"] = rep.ladder_cutoffs;
        out["ladder_estimates"] = rep.ladder_estimates;
        out["stability"] = rep.stability;
        return out;
      },
      py::arg("beta"), py::arg("p"), py::arg("d"), py::arg("m"),
      py::arg("cutoff"), py::arg("f_kind"), py::arg("f_center"),
      py::arg("f_scale"), py::arg("count"), py::arg("seed"),
      py::arg("threads") = 0,
      "Empirical E|<mu, f>|^p with bootstrap interval and cutoff-stability "
      "probe.");

  // Wavelet analysis.
  mod.def("shipped_filters",
          [] { return wavelets::Basis::shipped_ids(); });
  mod.def(
      "besov_estimate",
      [](Complex beta, int d, int m, int cutoff, const std::string& filter,
         double p, int count, std::uint64_t seed, int depth, int threads) {
        const field::GridSpec grid(d, m);
        const auto basis = wavelets::Basis::from_id(filter);
        if (depth == 0) depth = basis.max_levels(grid);
        return regularity_dict(wavelets::besov_estimate(
            beta, grid, cutoff, basis, depth, p, count, seed, threads));
      },
      py::arg("beta"), py::arg("d"), py::arg("m"), py::arg("cutoff"),
      py::arg("filter"), py::arg("p"), py::arg("count"), py::arg("seed"),
      py::arg("depth") = 0, py::arg("threads") = 0,
      "Monte Carlo regularity estimate from wavelet level statistics.");
  mod.def(
      "wavelet_moment_scaling",
      [](Complex beta, double r, int d, int m, int cutoff,
         const std::string& filter, int count, std::uint64_t seed, int depth,
         int threads) {
        const field::GridSpec grid(d, m);
        const auto basis = wavelets::Basis::from_id(filter);
        if (depth == 0) depth = basis.max_levels(grid);
        const auto mm = wavelets::wavelet_moment_scaling(
            beta, r, grid, cutoff, basis, depth, count, seed, threads);
        py::dict out;
        out["slope"] = mm.slope;
        out["stderr"] = mm.stderr_;
        out["predicted"] = mm.predicted;
        out["levels"] = mm.levels;
        out["log2_mean_moment"] = mm.log2_mean_moment;
        return out;
      },
      py::arg("beta"), py::arg("r"), py::arg("d"), py::arg("m"),
      py::arg("cutoff"), py::arg("filter"), py::arg("count"), py::arg("seed"),
      py::arg("depth") = 0, py::arg("threads") = 0,
      "Fit of log2 E|alpha(level)|^r against the level index.");
  mod.def("predicted_moment_slope", &wavelets::predicted_moment_slope,
          py::arg("beta"), py::arg("r"), py::arg("d"));
  mod.def("predicted_level_exponent", &wavelets::predicted_level_exponent,
          py::arg("beta"), py::arg("p"), py::arg("s"), py::arg("d"));

  // Statistics.
  py::class_<stats::KsResult>(mod, "KsResult")
      .def_readonly("statistic", &stats::KsResult::statistic)
      .def_readonly("p_value", &stats::KsResult::p_value)
      .def_readonly("n1", &stats::KsResult::n1)
      .def_readonly("n2", &stats::KsResult::n2)
      .def("__repr__", [](const stats::KsResult& r) {
        return "KsResult(statistic=" + std::to_string(r.statistic) +
               ", p_value=" + std::to_string(r.p_value) + ")";
      });
  mod.def("ks_two_sample", &stats::ks_two_sample, py::arg("a"), py::arg("b"),
          "Two-sample Kolmogorov-Smirnov test.");
  mod.def("ks_one_sample_uniform", &stats::ks_one_sample_uniform,
          py::arg("a"));

  py::class_<stats::HillPoint>(mod, "HillPoint")
      .def_readonly("k", &stats::HillPoint::k)
      .def_readonly("alpha_hat", &stats::HillPoint::alpha_hat)
      .def_readonly("se", &stats::HillPoint::se)
      .def_readonly("ci_lo", &stats::HillPoint::ci_lo)
      .def_readonly("ci_hi", &stats::HillPoint::ci_hi);
  py::class_<stats::TailReport>(mod, "TailReport")
      .def_readonly("ladder", &stats::TailReport::ladder)
      .def_readonly("plateau", &stats::TailReport::plateau)
      .def_readonly("drift_z", &stats::TailReport::drift_z)
      .def_readonly("increases_toward_tail",
                    &stats::TailReport::increases_toward_tail)
      .def("no_finite_tail_below",
           [](const stats::TailReport& rep, double threshold) {
             return stats::no_finite_tail_below(rep, threshold);
           },
           py::arg("threshold"));
  mod.def(
      "tail_index",
      [](const std::vector<double>& samples, const std::vector<int>& ks,
         int resamples, std::uint64_t seed) {
        if (ks.empty()) return stats::tail_index(samples, seed);
        return stats::tail_index(samples, ks, resamples, seed);
      },
      py::arg("samples"), py::arg("ks") = std::vector<int>{},
      py::arg("resamples") = 400, py::arg("seed") = 1,
      "Hill estimator ladder with bootstrap intervals.");
  mod.def(
      "bootstrap_mean",
      [](const std::vector<double>& samples, int resamples, double level,
         std::uint64_t seed) {
        const auto ci = stats::bootstrap_mean(samples, resamples, level, seed);
        py::dict out;
        out["estimate"] = ci.estimate;
        out["lo"] = ci.lo;
        out["hi"] = ci.hi;
        return out;
      },
      py::arg("samples"), py::arg("resamples") = 1000,
      py::arg("level") = 0.95, py::arg("seed") = 1);

  // Experiment plans.
  mod.def(
      "run_plan",
      [](const std::string& plan_json, int threads) {
        const auto plan = montecarlo::plan_from_json(plan_json);
        const auto out = montecarlo::run_plan(plan, threads);
        py::dict result;
        result["report_path"] = out.report_path;
        result["sample_paths"] = out.sample_paths;
        return result;
      },
      py::arg("plan_json"), py::arg("threads") = 0,
      "Executes a serialized experiment plan; re-runs reproduce the same "
      "bytes.");
  mod.def("validate_plan",
          [](const std::string& plan_json) {
            montecarlo::validate_plan(montecarlo::plan_from_json(plan_json));
          },
          py::arg("plan_json"),
          "Raises ValueError when the plan is inconsistent.");

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });
}
