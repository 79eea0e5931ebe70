#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/field.hpp"

namespace gmclab::montecarlo {

using Complex = std::complex<double>;

// Declarative description of the test function so plans can be serialized.
struct TestFunctionSpec {
  std::string kind;  // "bump", "indicator" or "constant"
  field::Point center{0.5, 0.5};
  double scale = 0.1;  // support radius; ignored for "constant"
};

chaos::TestFunction make_test_function(const TestFunctionSpec& spec,
                                       const field::GridSpec& grid);

// A full experiment: which chaos parameters to sample, at what resolution,
// how many realizations, and what to estimate. Serialized as JSON.
struct ExperimentPlan {
  std::vector<Complex> betas;
  int d = 1;
  int m = 10;
  int cutoff = 256;
  TestFunctionSpec f;
  int count = 100;           // realizations per beta
  std::uint64_t seed = 1;
  std::string estimator;     // "samples" or "abs-moment"
  std::vector<double> p_list;  // moment orders for "abs-moment"
  std::string out_dir;
};

ExperimentPlan plan_from_json(const std::string& text);
// Canonical key-sorted serialization; equal plans produce equal strings.
std::string plan_to_json(const ExperimentPlan& plan);
// The plan identity used to stamp data files: everything except out_dir,
// so moving an experiment to another directory does not orphan its files.
std::string plan_identity_json(const ExperimentPlan& plan);
// Throws std::invalid_argument with a diagnostic on any violation; every
// beta must lie inside the existence region.
void validate_plan(const ExperimentPlan& plan);

// One pairing sample per realization: <mu_beta at the given cutoff, f>,
// realization i seeded by derive_seed(seed, i). Pure function of its
// arguments; identical for every thread count.
std::vector<Complex> collect_pair_samples(Complex beta,
                                          const field::GridSpec& grid,
                                          int cutoff,
                                          const chaos::TestFunction& f,
                                          int count, std::uint64_t seed,
                                          int threads = 0);

// Empirical E|<mu, f>|^p with a percentile-bootstrap CI and a stability probe
// across cutoff doublings N/4 -> N/2 -> N (same per-realization seeds, so the
// three columns are pathwise coupled refinements).
struct EstimateReport {
  Complex beta;
  double p = 0.0;
  int count = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool region_ok = false;          // in the validated finite-moment region
  bool divergence_expected = false;  // !region_ok
  std::array<int, 3> ladder_cutoffs{};
  std::array<double, 3> ladder_estimates{};
  double stability = 0.0;  // relative change over the last doubling
  double wall_seconds = 0.0;
};

EstimateReport estimate_abs_moment(Complex beta, double p,
                                   const field::GridSpec& grid, int cutoff,
                                   const chaos::TestFunction& f, int count,
                                   std::uint64_t seed, int threads = 0);

// Executes the plan: one canonical-sorted samples CSV per beta plus a JSON
// report. Re-running with any worker count reproduces the CSVs byte for
// byte; a partially written run is resumed from the rows already on disk.
struct RunOutputs {
  std::string report_path;
  std::vector<std::string> sample_paths;
};

RunOutputs run_plan(const ExperimentPlan& plan, int threads = 0);

}  // namespace gmclab::montecarlo
