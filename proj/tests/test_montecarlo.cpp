#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <unistd.h>

#include "gmclab/io.hpp"
#include "gmclab/montecarlo.hpp"

using namespace gmclab;
namespace fs = std::filesystem;
using Complex = std::complex<double>;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int c = 0;
    path = fs::temp_directory_path() /
           ("gmclab_mc_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(c++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

montecarlo::ExperimentPlan small_plan(const std::string& out_dir) {
  montecarlo::ExperimentPlan plan;
  plan.betas = {Complex{0.0, 0.8}, Complex{0.5, 0.2}};
  plan.d = 1;
  plan.m = 8;
  plan.cutoff = 32;
  plan.f = {"bump", {0.5, 0.5}, 0.15};
  plan.count = 40;
  plan.seed = 2024;
  plan.estimator = "abs-moment";
  plan.p_list = {2.0};
  plan.out_dir = out_dir;
  return plan;
}

}  // namespace

TEST_CASE("plan serialization round-trip") {
  auto plan = small_plan("/tmp/somewhere");
  const std::string text = montecarlo::plan_to_json(plan);
  const auto back = montecarlo::plan_from_json(text);
  CHECK(back.betas == plan.betas);
  CHECK(back.d == plan.d);
  CHECK(back.m == plan.m);
  CHECK(back.cutoff == plan.cutoff);
  CHECK(back.f.kind == plan.f.kind);
  CHECK(back.f.center == plan.f.center);
  CHECK(back.f.scale == plan.f.scale);
  CHECK(back.count == plan.count);
  CHECK(back.seed == plan.seed);
  CHECK(back.estimator == plan.estimator);
  CHECK(back.p_list == plan.p_list);
  CHECK(back.out_dir == plan.out_dir);
  // Serialization is canonical: a re-serialized plan is byte-identical.
  CHECK(montecarlo::plan_to_json(back) == text);

  // The identity stamp ignores the output directory.
  auto moved = plan;
  moved.out_dir = "/tmp/elsewhere";
  CHECK(montecarlo::plan_identity_json(moved) ==
        montecarlo::plan_identity_json(plan));
  CHECK(montecarlo::plan_to_json(moved) != montecarlo::plan_to_json(plan));

  CHECK_THROWS_AS(montecarlo::plan_from_json("not json"), std::exception);
}

TEST_CASE("plan validation rejects bad inputs") {
  TempDir dir;
  auto plan = small_plan(dir.sub("out"));
  CHECK_NOTHROW(montecarlo::validate_plan(plan));

  auto bad = plan;
  bad.betas = {};
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.betas = {Complex{0.0, 1.2}};  // outside the existence region
  CHECK_THROWS_WITH_AS(montecarlo::validate_plan(bad),
                       doctest::Contains("outside the existence region"),
                       std::invalid_argument);

  bad = plan;
  bad.cutoff = 1000;  // beyond the grid Nyquist limit
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.estimator = "median";
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.p_list = {};
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.p_list = {0.5};
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.count = 10;  // too few for interval estimates
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.f.kind = "spline";
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.f.scale = 0.6;  // support would wrap around the torus
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.out_dir = "";
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);

  bad = plan;
  bad.cutoff = 30;  // the stability ladder halves it twice
  CHECK_THROWS_AS(montecarlo::validate_plan(bad), std::invalid_argument);
}

TEST_CASE("pair samples are a pure function of the seed") {
  const field::GridSpec grid(1, 8);
  const auto f = chaos::TestFunction::smooth_bump(grid, {0.5, 0.0}, 0.2);
  const Complex beta{0.0, 0.7};
  const auto one = montecarlo::collect_pair_samples(beta, grid, 32, f, 48, 5, 1);
  const auto four = montecarlo::collect_pair_samples(beta, grid, 32, f, 48, 5, 4);
  CHECK(one == four);
  CHECK(one.size() == 48);
  // A different master seed decorrelates every row.
  const auto other = montecarlo::collect_pair_samples(beta, grid, 32, f, 48, 6, 1);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] != other[i]);
  // Extending the run keeps the existing prefix.
  const auto longer =
      montecarlo::collect_pair_samples(beta, grid, 32, f, 64, 5, 2);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(longer[i] == one[i]);
}

TEST_CASE("moment estimate report fields") {
  const field::GridSpec grid(1, 8);
  const auto f = chaos::TestFunction::smooth_bump(grid, {0.5, 0.0}, 0.2);

  const auto rep =
      montecarlo::estimate_abs_moment({0.0, 0.8}, 2.0, grid, 32, f, 60, 9);
  CHECK(rep.count == 60);
  CHECK(rep.region_ok);
  CHECK_FALSE(rep.divergence_expected);
  CHECK(rep.estimate > 0.0);
  CHECK(rep.ci_lo <= rep.estimate);
  CHECK(rep.estimate <= rep.ci_hi);
  CHECK(rep.ladder_cutoffs == std::array<int, 3>{8, 16, 32});
  CHECK(rep.ladder_estimates[2] == doctest::Approx(rep.estimate).epsilon(1e-12));
  const double expected_stability =
      std::abs(rep.ladder_estimates[2] - rep.ladder_estimates[1]) /
      rep.ladder_estimates[2];
  CHECK(rep.stability == doctest::Approx(expected_stability));

  // Real beta = 1 has no finite second moment: flagged, not refused.
  const auto div =
      montecarlo::estimate_abs_moment({1.0, 0.0}, 2.0, grid, 32, f, 60, 9);
  CHECK_FALSE(div.region_ok);
  CHECK(div.divergence_expected);

  CHECK_THROWS_AS(
      montecarlo::estimate_abs_moment({0.0, 0.8}, 2.0, grid, 30, f, 60, 9),
      std::invalid_argument);
  CHECK_THROWS_AS(
      montecarlo::estimate_abs_moment({0.0, 0.8}, 0.5, grid, 32, f, 60, 9),
      std::invalid_argument);
  CHECK_THROWS_AS(
      montecarlo::estimate_abs_moment({0.0, 0.8}, 2.0, grid, 32, f, 10, 9),
      std::invalid_argument);
}

TEST_CASE("run_plan writes canonical files and resumes cleanly") {
  TempDir dir;
  auto plan = small_plan(dir.sub("run_a"));
  const auto out = montecarlo::run_plan(plan, 1);
  REQUIRE(out.sample_paths.size() == plan.betas.size());
  REQUIRE(fs::exists(out.report_path));

  SUBCASE("sample files carry the plan identity and sorted rows") {
    for (const auto& p : out.sample_paths) {
      const auto file = io::read_samples_csv(p);
      CHECK(file.rows.size() == static_cast<std::size_t>(plan.count));
      for (std::size_t i = 0; i < file.rows.size(); ++i)
        CHECK(file.rows[i].index == i);
      CHECK(file.config.find(montecarlo::plan_identity_json(plan)) !=
            std::string::npos);
    }
  }

  SUBCASE("thread counts cannot change the bytes") {
    auto plan4 = plan;
    plan4.out_dir = dir.sub("run_b");
    const auto out4 = montecarlo::run_plan(plan4, 4);
    for (std::size_t i = 0; i < out.sample_paths.size(); ++i)
      CHECK(io::read_text(out.sample_paths[i]) ==
            io::read_text(out4.sample_paths[i]));
    CHECK(io::json_reports_equal(out.report_path, out4.report_path));
  }

  SUBCASE("a second run over finished files is byte-identical") {
    const std::string before = io::read_text(out.sample_paths[0]);
    const auto again = montecarlo::run_plan(plan, 2);
    CHECK(io::read_text(again.sample_paths[0]) == before);
    CHECK(io::json_reports_equal(out.report_path, again.report_path));
  }

  SUBCASE("an interrupted run resumes to the same bytes") {
    const std::string intact = io::read_text(out.sample_paths[0]);
    // Keep a prefix of complete rows plus one torn fragment.
    std::string cut = intact.substr(0, intact.size() * 2 / 3);
    io::write_text_atomic(out.sample_paths[0], cut);
    fs::remove(out.report_path);
    const auto resumed = montecarlo::run_plan(plan, 3);
    CHECK(io::read_text(resumed.sample_paths[0]) == intact);
  }

  SUBCASE("resume against a different plan is refused") {
    auto other = plan;
    other.seed = 999;
    CHECK_THROWS_WITH_AS(montecarlo::run_plan(other, 1),
                         doctest::Contains("different plan"),
                         std::invalid_argument);
  }
}

TEST_CASE("test function factory") {
  const field::GridSpec grid(1, 8);
  CHECK_NOTHROW(montecarlo::make_test_function({"bump", {0.5, 0.0}, 0.1}, grid));
  CHECK_NOTHROW(
      montecarlo::make_test_function({"indicator", {0.5, 0.0}, 0.1}, grid));
  const auto one = montecarlo::make_test_function({"constant", {0, 0}, 0}, grid);
  CHECK(chaos::integral(one) == 1.0);
  CHECK_THROWS_AS(montecarlo::make_test_function({"spline", {0, 0}, 0.1}, grid),
                  std::invalid_argument);
}
