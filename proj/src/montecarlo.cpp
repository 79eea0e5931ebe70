#include "gmclab/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

#include "gmclab/io.hpp"
#include "gmclab/parallel.hpp"
#include "gmclab/regions.hpp"
#include "gmclab/rng.hpp"
#include "gmclab/stats.hpp"
#include "gmclab/version.hpp"

namespace gmclab::montecarlo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// How many realizations the cutoff-ladder stability probe re-renders at the
// coarser cutoffs (re-renders are deterministic, so capping the probe keeps
// big runs affordable without hurting reproducibility).
constexpr int kLadderCap = 10000;

constexpr std::uint64_t kBetaSeedTag = 0x42000000ULL;
constexpr std::uint64_t kBootstrapSeedTag = 0xB007ULL;

std::uint64_t beta_master_seed(std::uint64_t plan_seed, std::size_t beta_index) {
  return rng::derive_seed(plan_seed, kBetaSeedTag + beta_index);
}

Complex one_pair_sample(Complex beta, const field::GridSpec& grid, int cutoff,
                        const chaos::TestFunction& f, std::uint64_t seed_i) {
  const field::SpectralField modes = field::sample_field(grid, cutoff, seed_i);
  const field::Realization x = field::render(modes);
  const chaos::Realization mu = chaos::wick_exponential(x, modes.sigma2, beta);
  return chaos::pair(mu, f);
}

json plan_to_json_object(const ExperimentPlan& plan, bool with_out_dir) {
  json betas = json::array();
  for (const Complex& b : plan.betas)
    betas.push_back(json::array({b.real(), b.imag()}));
  json obj{{"betas", betas},
           {"d", plan.d},
           {"m", plan.m},
           {"cutoff", plan.cutoff},
           {"f",
            {{"kind", plan.f.kind},
             {"center", {plan.f.center[0], plan.f.center[1]}},
             {"scale", plan.f.scale}}},
           {"count", plan.count},
           {"seed", plan.seed},
           {"estimator", plan.estimator},
           {"p_list", plan.p_list}};
  if (with_out_dir) obj["out_dir"] = plan.out_dir;
  return obj;
}

}  // namespace

chaos::TestFunction make_test_function(const TestFunctionSpec& spec,
                                       const field::GridSpec& grid) {
  if (spec.kind == "bump")
    return chaos::TestFunction::smooth_bump(grid, spec.center, spec.scale);
  if (spec.kind == "indicator")
    return chaos::TestFunction::indicator(grid, spec.center, spec.scale);
  if (spec.kind == "constant") return chaos::TestFunction::constant_one(grid);
  throw std::invalid_argument("unknown test function kind '" + spec.kind +
                              "' (expected bump, indicator or constant)");
}

ExperimentPlan plan_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentPlan plan;
  for (const auto& b : j.at("betas")) {
    if (!b.is_array() || b.size() != 2)
      throw std::invalid_argument("each beta must be a [re, im] pair");
    plan.betas.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  }
  plan.d = j.at("d").get<int>();
  plan.m = j.at("m").get<int>();
  plan.cutoff = j.at("cutoff").get<int>();
  if (j.contains("f")) {
    const auto& f = j.at("f");
    plan.f.kind = f.at("kind").get<std::string>();
    if (f.contains("center")) {
      plan.f.center = {f.at("center").at(0).get<double>(),
                       f.at("center").at(1).get<double>()};
    }
    plan.f.scale = f.value("scale", plan.f.scale);
  }
  plan.count = j.at("count").get<int>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.estimator = j.at("estimator").get<std::string>();
  if (j.contains("p_list"))
    plan.p_list = j.at("p_list").get<std::vector<double>>();
  plan.out_dir = j.value("out_dir", "");
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  return plan_to_json_object(plan, true).dump();
}

std::string plan_identity_json(const ExperimentPlan& plan) {
  return plan_to_json_object(plan, false).dump();
}

void validate_plan(const ExperimentPlan& plan) {
  if (plan.betas.empty()) throw std::invalid_argument("plan lists no betas");
  const field::GridSpec grid(plan.d, plan.m);  // validates d and m
  if (plan.cutoff < 1 || plan.cutoff > grid.n() / 2)
    throw std::invalid_argument(
        "cutoff must lie in [1, n/2] so the modes fit on the grid");
  for (const Complex& b : plan.betas) {
    if (!regions::in_ea(b, plan.d))
      throw std::invalid_argument(
          "beta (" + io::format_double(b.real()) + ", " +
          io::format_double(b.imag()) + ") lies outside the existence region "
          "for d = " + std::to_string(plan.d) +
          "; the chaos has no subcritical limit there");
  }
  if (plan.count < 1) throw std::invalid_argument("count must be positive");
  if (plan.estimator != "samples" && plan.estimator != "abs-moment")
    throw std::invalid_argument("estimator must be 'samples' or 'abs-moment'");
  if (plan.estimator == "abs-moment") {
    if (plan.p_list.empty())
      throw std::invalid_argument("abs-moment estimator needs a p_list");
    for (double p : plan.p_list)
      if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("moment orders must be finite and >= 1");
    if (plan.count < 30)
      throw std::invalid_argument(
          "interval-bearing estimators need at least 30 realizations");
    if (plan.cutoff % 4 != 0)
      throw std::invalid_argument(
          "abs-moment stability ladder needs a cutoff divisible by 4");
  }
  if (plan.f.kind != "constant" &&
      !(plan.f.scale > 0.0 && plan.f.scale < 0.5))
    throw std::invalid_argument(
        "test function support radius must lie in (0, 0.5) on the torus");
  if (plan.out_dir.empty())
    throw std::invalid_argument("plan needs an out_dir");
  make_test_function(plan.f, grid);  // validates the kind
}

std::vector<Complex> collect_pair_samples(Complex beta,
                                          const field::GridSpec& grid,
                                          int cutoff,
                                          const chaos::TestFunction& f,
                                          int count, std::uint64_t seed,
                                          int threads) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  std::vector<Complex> out(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), threads,
                         [&](std::size_t i) {
                           out[i] = one_pair_sample(
                               beta, grid, cutoff, f, rng::derive_seed(seed, i));
                         });
  return out;
}

namespace {

struct Ladder {
  std::array<int, 3> cutoffs;
  // values[c][i]: pairing of realization i rendered at cutoffs[c]; the
  // same seed per i, so columns are pathwise coupled refinements.
  std::array<std::vector<Complex>, 3> values;
};

Ladder collect_ladder(Complex beta, const field::GridSpec& grid, int cutoff,
                      const chaos::TestFunction& f, int count,
                      std::uint64_t seed, int threads) {
  if (cutoff % 4 != 0 || cutoff < 4)
    throw std::invalid_argument("stability ladder needs a cutoff divisible by 4");
  Ladder ladder;
  ladder.cutoffs = {cutoff / 4, cutoff / 2, cutoff};
  for (auto& v : ladder.values) v.resize(static_cast<std::size_t>(count));
  parallel_for(
      static_cast<std::size_t>(count), threads, [&](std::size_t i) {
        const std::uint64_t seed_i = rng::derive_seed(seed, i);
        for (int c = 0; c < 3; ++c)
          ladder.values[static_cast<std::size_t>(c)][i] =
              one_pair_sample(beta, grid, ladder.cutoffs[static_cast<std::size_t>(c)], f, seed_i);
      });
  return ladder;
}

double abs_moment_mean(const std::vector<Complex>& values, double p,
                       std::size_t limit) {
  const std::size_t n = std::min(values.size(), limit);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::pow(std::abs(values[i]), p);
  return acc / static_cast<double>(n);
}

EstimateReport report_from_samples(Complex beta, double p, int d, int count,
                                   std::uint64_t seed,
                                   const std::vector<Complex>& full,
                                   const Ladder& ladder) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw std::invalid_argument("moment order must be finite and >= 1");
  if (count < 30)
    throw std::invalid_argument(
        "interval-bearing estimators need at least 30 realizations");
  EstimateReport rep;
  rep.beta = beta;
  rep.p = p;
  rep.count = count;
  rep.seed = seed;
  rep.region_ok = regions::in_eap(beta, p, d);
  rep.divergence_expected = !rep.region_ok;
  std::vector<double> powered(full.size());
  for (std::size_t i = 0; i < full.size(); ++i)
    powered[i] = std::pow(std::abs(full[i]), p);
  const stats::BootstrapCi ci = stats::bootstrap_mean(
      powered, 1000, 0.95, rng::derive_seed(seed, kBootstrapSeedTag));
  rep.estimate = ci.estimate;
  rep.ci_lo = ci.lo;
  rep.ci_hi = ci.hi;
  rep.ladder_cutoffs = ladder.cutoffs;
  const std::size_t cap = static_cast<std::size_t>(kLadderCap);
  for (int c = 0; c < 3; ++c)
    rep.ladder_estimates[static_cast<std::size_t>(c)] =
        abs_moment_mean(ladder.values[static_cast<std::size_t>(c)], p, cap);
  const double last = rep.ladder_estimates[2];
  const double prev = rep.ladder_estimates[1];
  rep.stability = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
  return rep;
}

}  // namespace

EstimateReport estimate_abs_moment(Complex beta, double p,
                                   const field::GridSpec& grid, int cutoff,
                                   const chaos::TestFunction& f, int count,
                                   std::uint64_t seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const Ladder ladder =
      collect_ladder(beta, grid, cutoff, f, std::min(count, kLadderCap), seed,
                     threads);
  std::vector<Complex> full = ladder.values[2];
  if (count > kLadderCap) {
    // The ladder holds the capped prefix; extend the full-cutoff column.
    full.resize(static_cast<std::size_t>(count));
    parallel_for(
        static_cast<std::size_t>(count - kLadderCap), threads,
        [&](std::size_t off) {
          const std::size_t i = static_cast<std::size_t>(kLadderCap) + off;
          full[i] = one_pair_sample(beta, grid, cutoff, f,
                                    rng::derive_seed(seed, i));
        });
  }
  EstimateReport rep =
      report_from_samples(beta, p, grid.d, count, seed, full, ladder);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

namespace {

json estimate_to_json(const EstimateReport& rep) {
  return json{{"beta", {rep.beta.real(), rep.beta.imag()}},
              {"p", rep.p},
              {"count", rep.count},
              {"estimate", rep.estimate},
              {"ci", {rep.ci_lo, rep.ci_hi}},
              {"region_ok", rep.region_ok},
              {"divergence_expected", rep.divergence_expected},
              {"ladder_cutoffs", rep.ladder_cutoffs},
              {"ladder_estimates", rep.ladder_estimates},
              {"stability", rep.stability}};
}

}  // namespace

RunOutputs run_plan(const ExperimentPlan& plan, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_plan(plan);
  io::ensure_directory(plan.out_dir);
  const field::GridSpec grid(plan.d, plan.m);
  const chaos::TestFunction f = make_test_function(plan.f, grid);
  const json identity = json::parse(plan_identity_json(plan));

  RunOutputs outputs;
  std::vector<std::vector<Complex>> all_samples;

  for (std::size_t bi = 0; bi < plan.betas.size(); ++bi) {
    const Complex beta = plan.betas[bi];
    const std::uint64_t seed_b = beta_master_seed(plan.seed, bi);
    const fs::path path =
        fs::path(plan.out_dir) / ("samples_" + std::to_string(bi) + ".csv");
    const std::string config =
        json{{"beta_index", bi}, {"experiment", identity}}.dump();

    std::vector<io::SampleRow> rows;
    if (fs::exists(path)) {
      io::SamplesFile existing = io::read_samples_csv(path.string());
      if (!existing.rows.empty() || !existing.config.empty()) {
        if (existing.config != config)
          throw std::invalid_argument(
              "'" + path.string() +
              "' was produced by a different plan; refusing to resume");
        for (const io::SampleRow& row : existing.rows)
          if (row.index >= static_cast<std::uint64_t>(plan.count))
            throw std::runtime_error("'" + path.string() +
                                     "' has an out-of-range row index");
        rows = std::move(existing.rows);
      }
    }

    std::vector<char> have(static_cast<std::size_t>(plan.count), 0);
    for (const io::SampleRow& row : rows) have[row.index] = 1;
    std::vector<std::uint64_t> missing;
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(plan.count); ++i)
      if (!have[i]) missing.push_back(i);

    if (!missing.empty()) {
      // Completed rows are appended (and flushed) as they finish so an
      // interrupted run can resume; the canonical rewrite below fixes the
      // ordering afterwards.
      std::ofstream append(path, std::ios::app);
      if (!append)
        throw std::runtime_error("cannot open '" + path.string() + "'");
      if (rows.empty()) {
        append << "# samples v1\n# config " << config << "\nindex,seed,re,im\n";
        append.flush();
      }
      std::mutex io_mutex;
      std::vector<io::SampleRow> fresh(missing.size());
      parallel_for(
          missing.size(), threads, [&](std::size_t pos) {
            const std::uint64_t idx = missing[pos];
            const std::uint64_t seed_i = rng::derive_seed(seed_b, idx);
            const Complex z = one_pair_sample(beta, grid, plan.cutoff, f, seed_i);
            const io::SampleRow row{idx, seed_i, z.real(), z.imag()};
            fresh[pos] = row;
            std::lock_guard<std::mutex> lock(io_mutex);
            append << io::sample_row_line(row) << '\n';
            append.flush();
          });
      rows.insert(rows.end(), fresh.begin(), fresh.end());
    }

    std::sort(rows.begin(), rows.end(),
              [](const io::SampleRow& a, const io::SampleRow& b) {
                return a.index < b.index;
              });
    io::write_samples_csv(path.string(), config, rows);
    outputs.sample_paths.push_back(path.string());

    std::vector<Complex> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      values[i] = Complex{rows[i].re, rows[i].im};
    all_samples.push_back(std::move(values));
  }

  json results = json::array();
  for (std::size_t bi = 0; bi < plan.betas.size(); ++bi) {
    const Complex beta = plan.betas[bi];
    const std::uint64_t seed_b = beta_master_seed(plan.seed, bi);
    if (plan.estimator == "abs-moment") {
      const Ladder ladder =
          collect_ladder(beta, grid, plan.cutoff, f,
                         std::min(plan.count, kLadderCap), seed_b, threads);
      for (double p : plan.p_list) {
        const EstimateReport rep = report_from_samples(
            beta, p, plan.d, plan.count, seed_b, all_samples[bi], ladder);
        results.push_back(estimate_to_json(rep));
      }
    } else {
      Complex mean{0.0, 0.0};
      for (const Complex& z : all_samples[bi]) mean += z;
      mean /= static_cast<double>(all_samples[bi].size());
      results.push_back(json{{"beta", {beta.real(), beta.imag()}},
                             {"count", plan.count},
                             {"mean", {mean.real(), mean.imag()}},
                             {"samples", outputs.sample_paths[bi]}});
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  json report{{"version", kVersion},
              {"kind", plan.estimator},
              {"plan", plan_to_json_object(plan, true)},
              {"generated_at", io::timestamp_utc()},
              {"wall_seconds", wall},
              {"results", results}};
  const fs::path report_path = fs::path(plan.out_dir) / "report.json";
  io::write_text_atomic(report_path.string(), report.dump(2) + "\n");
  outputs.report_path = report_path.string();
  return outputs;
}

}  // namespace gmclab::montecarlo
