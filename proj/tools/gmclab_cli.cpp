// Command-line front end: region geometry exports, the distributional
// scaling check, moment and regularity estimation, and a quick self test.
// Exit codes: 0 success, 2 validation or I/O failure, 3 statistical failure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmclab/chaos.hpp"
#include "gmclab/field.hpp"
#include "gmclab/io.hpp"
#include "gmclab/montecarlo.hpp"
#include "gmclab/parallel.hpp"
#include "gmclab/regions.hpp"
#include "gmclab/rng.hpp"
#include "gmclab/stats.hpp"
#include "gmclab/version.hpp"
#include "gmclab/wavelets.hpp"

namespace {

namespace fs = std::filesystem;
using gmclab::io::format_double;
using nlohmann::json;
using Complex = std::complex<double>;

constexpr int kExitValidation = 2;
constexpr int kExitStatistical = 3;

// Accepts "0.5", "0.8i", "0.5+0.5i", "-1.2-0.3i", "i", "-i".
Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += (c == 'I' ? 'i' : c);
  if (s.empty()) throw std::invalid_argument("empty complex number");
  const auto bad = [&]() {
    return std::invalid_argument("cannot parse complex number '" + text +
                                 "' (expected forms: 1.5, 0.8i, 0.5+0.5i)");
  };
  // parse_double is from_chars-strict and rejects a leading '+'.
  const auto parse_part = [](std::string t) {
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    return gmclab::io::parse_double(t);
  };
  if (s.back() != 'i') {
    try {
      return Complex{parse_part(s), 0.0};
    } catch (const std::exception&) {
      throw bad();
    }
  }
  s.pop_back();  // drop the trailing i
  // Split at the last sign that is not leading and not an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  std::string re_part = (split == std::string::npos) ? "" : s.substr(0, split);
  std::string im_part = (split == std::string::npos) ? s : s.substr(split);
  double re = 0.0;
  try {
    if (!re_part.empty()) re = parse_part(re_part);
    double im;
    if (im_part.empty() || im_part == "+")
      im = 1.0;
    else if (im_part == "-")
      im = -1.0;
    else
      im = parse_part(im_part);
    return Complex{re, im};
  } catch (const std::exception&) {
    throw bad();
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Stable per-configuration directory tag, so a re-run resumes its own files
// and never collides with a differently configured run.
std::string run_tag(const std::string& identity) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(identity)));
  return std::string(buf);
}

// Minimal self-contained SVG line/scatter plot.
std::string svg_plot(const std::vector<std::vector<std::array<double, 2>>>& series,
                     const std::string& title) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const double w = 640, hgt = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& pts : series)
    for (const auto& p : pts) {
      x0 = std::min(x0, p[0]);
      x1 = std::max(x1, p[0]);
      y0 = std::min(y0, p[1]);
      y1 = std::max(y1, p[1]);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
  const auto X = [&](double x) { return ml + (x - x0) / (x1 - x0) * (w - ml - mr); };
  const auto Y = [&](double y) { return hgt - mb - (y - y0) / (y1 - y0) * (hgt - mt - mb); };
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
      "viewBox=\"0 0 640 480\">\n<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";
  // axes with min/max labels
  out += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(hgt - mb) +
         "\" x2=\"" + format_double(w - mr) + "\" y2=\"" + format_double(hgt - mb) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) +
         "\" x2=\"" + format_double(ml) + "\" y2=\"" + format_double(hgt - mb) +
         "\" stroke=\"black\"/>\n";
  const auto label = [&](double px, double py, const std::string& t,
                         const char* anchor) {
    return "<text x=\"" + format_double(px) + "\" y=\"" + format_double(py) +
           "\" text-anchor=\"" + anchor +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + t + "</text>\n";
  };
  out += label(ml, hgt - mb + 16, format_double(x0), "middle");
  out += label(w - mr, hgt - mb + 16, format_double(x1), "middle");
  out += label(ml - 6, hgt - mb, format_double(y0), "end");
  out += label(ml - 6, mt + 4, format_double(y1), "end");
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& pts = series[si];
    if (pts.empty()) continue;
    const char* color = kColors[si % 4];
    std::string attr;
    for (const auto& p : pts)
      attr += format_double(X(p[0])) + "," + format_double(Y(p[1])) + " ";
    out += "<polyline points=\"" + attr + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    if (pts.size() <= 64)
      for (const auto& p : pts)
        out += "<circle cx=\"" + format_double(X(p[0])) + "\" cy=\"" +
               format_double(Y(p[1])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

struct GlobalOpts {
  std::uint64_t seed = 20260819;
  int threads = 0;  // 0 = GMCLAB_THREADS env or hardware
  std::string out_dir = "out";
  bool verbose = false;
  bool plot = false;
};

void print_config(const GlobalOpts& g, const json& resolved) {
  if (g.verbose)
    std::printf("resolved config: %s\n", resolved.dump().c_str());
}

// ---- regions ---------------------------------------------------------

int cmd_regions(const GlobalOpts& g, const std::string& region, int d,
                double p, int resolution) {
  gmclab::io::ensure_directory(g.out_dir);
  json resolved{{"command", "regions"}, {"region", region}, {"d", d},
                {"p", p},               {"resolution", resolution}};
  print_config(g, resolved);
  const std::string config = resolved.dump();

  if (region == "ea" || region == "eap") {
    const auto curve = region == "ea" ? gmclab::regions::Curve::kEye
                                      : gmclab::regions::Curve::kMoment;
    const auto pts = gmclab::regions::boundary_polyline(curve, p, d, resolution);
    std::string name = region == "ea"
                           ? "eye_d" + std::to_string(d)
                           : "moment_d" + std::to_string(d) + "_p" + format_double(p);
    const std::string csv = (fs::path(g.out_dir) / (name + ".csv")).string();
    gmclab::io::write_polyline_csv(csv, config, pts);
    std::printf("wrote %s (%zu vertices)\n", csv.c_str(), pts.size());
    if (g.plot) {
      auto closed = pts;
      closed.push_back(pts.front());
      const std::string svg = (fs::path(g.out_dir) / (name + ".svg")).string();
      gmclab::io::write_text_atomic(
          svg, svg_plot({closed}, name + " boundary"));
      std::printf("wrote %s\n", svg.c_str());
    }
    return 0;
  }

  // besov-map: raster of the critical regularity over the existence region.
  const double rx = std::sqrt(2.0 * d), ry = std::sqrt(static_cast<double>(d));
  std::string out = "# besov map v1\n# config " + config + "\nre,im,s_star\n";
  std::size_t cells = 0;
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      const double re = -rx + (2.0 * rx) * (ix + 0.5) / resolution;
      const double im = -ry + (2.0 * ry) * (iy + 0.5) / resolution;
      const Complex beta{re, im};
      if (!gmclab::regions::in_ea(beta, d)) continue;
      const double s = gmclab::regions::besov_threshold(beta, p, d);
      out += format_double(re) + "," + format_double(im) + "," +
             format_double(s) + "\n";
      ++cells;
    }
  }
  const std::string csv =
      (fs::path(g.out_dir) /
       ("besov_map_d" + std::to_string(d) + "_p" + format_double(p) + ".csv"))
          .string();
  gmclab::io::write_text_atomic(csv, out);
  std::printf("wrote %s (%zu in-region cells)\n", csv.c_str(), cells);
  return 0;
}

// ---- verify-scaling --------------------------------------------------

int cmd_verify_scaling(const GlobalOpts& g, Complex beta, double epsilon,
                       int count, int cutoff, int m, int d, double bump_scale,
                       double threshold) {
  if (!gmclab::regions::in_ea(beta, d))
    throw std::invalid_argument(
        "beta (" + format_double(beta.real()) + ", " +
        format_double(beta.imag()) +
        ") lies outside the existence region for d = " + std::to_string(d));
  const gmclab::field::GridSpec grid(d, m);
  json resolved{{"command", "verify-scaling"},
                {"beta", {beta.real(), beta.imag()}},
                {"epsilon", epsilon},
                {"M", count},
                {"N", cutoff},
                {"m", m},
                {"d", d},
                {"bump_scale", bump_scale},
                {"threshold", threshold},
                {"seed", g.seed}};
  print_config(g, resolved);
  const std::string config = resolved.dump();

  const auto samples = gmclab::chaos::scaling_pair_samples(
      beta, grid, {0.0, 0.0}, bump_scale, epsilon, cutoff, count, g.seed,
      g.threads);
  const auto tests = gmclab::stats::ks_re_im_mod(samples.lhs, samples.rhs);
  static const char* kMarginals[] = {"re", "im", "mod"};
  const double corrected = threshold / 3.0;
  bool pass = true;
  json rows = json::array();
  std::printf("scaling check: beta=(%s,%s) eps=%s M=%d N=%d\n",
              format_double(beta.real()).c_str(),
              format_double(beta.imag()).c_str(),
              format_double(epsilon).c_str(), count, cutoff);
  for (int i = 0; i < 3; ++i) {
    const auto& t = tests[static_cast<std::size_t>(i)];
    const bool ok = t.p_value >= corrected;
    pass = pass && ok;
    std::printf("  %-3s  D=%-10s p=%-12s %s\n", kMarginals[i],
                format_double(t.statistic).c_str(),
                format_double(t.p_value).c_str(), ok ? "ok" : "REJECTED");
    rows.push_back(json{{"marginal", kMarginals[i]},
                        {"statistic", t.statistic},
                        {"p_value", t.p_value},
                        {"pass", ok}});
  }

  const fs::path dir = fs::path(g.out_dir) / ("scaling-" + run_tag(config));
  gmclab::io::ensure_directory(dir.string());
  std::string csv = "# scaling samples v1\n# config " + config +
                    "\nindex,lhs_re,lhs_im,rhs_re,rhs_im\n";
  for (std::size_t i = 0; i < samples.lhs.size(); ++i)
    csv += std::to_string(i) + "," + format_double(samples.lhs[i].real()) +
           "," + format_double(samples.lhs[i].imag()) + "," +
           format_double(samples.rhs[i].real()) + "," +
           format_double(samples.rhs[i].imag()) + "\n";
  gmclab::io::write_text_atomic((dir / "samples.csv").string(), csv);
  json report{{"version", gmclab::kVersion},
              {"kind", "scaling-check"},
              {"config", resolved},
              {"tests", rows},
              {"threshold", threshold},
              {"corrected_threshold", corrected},
              {"pass", pass},
              {"generated_at", gmclab::io::timestamp_utc()}};
  gmclab::io::write_text_atomic((dir / "report.json").string(),
                                report.dump(2) + "\n");
  std::printf("%s (report in %s)\n", pass ? "PASS" : "FAIL",
              dir.string().c_str());
  return pass ? 0 : kExitStatistical;
}

// ---- estimate-moments -------------------------------------------------

int cmd_estimate_moments(const GlobalOpts& g, Complex beta,
                         std::vector<double> p_list, const std::string& f_kind,
                         std::vector<double> f_center, double f_scale,
                         int count, int cutoff, int m, int d) {
  gmclab::montecarlo::ExperimentPlan plan;
  plan.betas = {beta};
  plan.d = d;
  plan.m = m;
  plan.cutoff = cutoff;
  plan.f = {f_kind, {f_center.at(0), f_center.at(1)}, f_scale};
  plan.count = count;
  plan.seed = g.seed;
  plan.estimator = "abs-moment";
  plan.p_list = p_list;
  const std::string identity = gmclab::montecarlo::plan_identity_json(plan);
  plan.out_dir =
      (fs::path(g.out_dir) / ("moments-" + run_tag(identity))).string();
  json resolved = json::parse(gmclab::montecarlo::plan_to_json(plan));
  resolved["command"] = "estimate-moments";
  print_config(g, resolved);

  const auto outputs = gmclab::montecarlo::run_plan(plan, g.threads);
  const json report = json::parse(gmclab::io::read_text(outputs.report_path));

  std::printf("%-6s %-14s %-30s %-8s %s\n", "p", "estimate", "ci95", "in_Eap",
              "stability(N/2->N)");
  for (const auto& row : report.at("results")) {
    const double lo = row.at("ci").at(0).get<double>();
    const double hi = row.at("ci").at(1).get<double>();
    std::printf("%-6s %-14s [%s, %s]  %-8s %s%s\n",
                format_double(row.at("p").get<double>()).c_str(),
                format_double(row.at("estimate").get<double>()).c_str(),
                format_double(lo).c_str(), format_double(hi).c_str(),
                row.at("region_ok").get<bool>() ? "yes" : "no",
                format_double(row.at("stability").get<double>()).c_str(),
                row.at("divergence_expected").get<bool>()
                    ? "  (divergence expected)"
                    : "");
  }

  // Tail diagnostics over |<mu, f>| when the sample is deep enough for the
  // default order-statistics ladder.
  if (count >= 5000) {
    const auto samples_file =
        gmclab::io::read_samples_csv(outputs.sample_paths[0]);
    std::vector<double> mods(samples_file.rows.size());
    for (std::size_t i = 0; i < mods.size(); ++i)
      mods[i] = std::hypot(samples_file.rows[i].re, samples_file.rows[i].im);
    const auto tail = gmclab::stats::tail_index(
        mods, gmclab::rng::derive_seed(g.seed, 0x7A11));
    std::printf("tail index ladder:\n");
    for (const auto& pt : tail.ladder)
      std::printf("  k=%-7d alpha=%-10s ci95=[%s, %s]\n", pt.k,
                  format_double(pt.alpha_hat).c_str(),
                  format_double(pt.ci_lo).c_str(),
                  format_double(pt.ci_hi).c_str());
    std::printf("  plateau=%s drift_z=%s increases_toward_tail=%s\n",
                tail.plateau ? "yes" : "no",
                format_double(tail.drift_z).c_str(),
                tail.increases_toward_tail ? "yes" : "no");
    json ladder = json::array();
    for (const auto& pt : tail.ladder)
      ladder.push_back(json{{"k", pt.k},
                            {"alpha_hat", pt.alpha_hat},
                            {"se", pt.se},
                            {"ci", {pt.ci_lo, pt.ci_hi}}});
    json tail_doc{{"version", gmclab::kVersion},
                  {"kind", "tail-index"},
                  {"config", resolved},
                  {"ladder", ladder},
                  {"plateau", tail.plateau},
                  {"drift_z", tail.drift_z},
                  {"increases_toward_tail", tail.increases_toward_tail},
                  {"generated_at", gmclab::io::timestamp_utc()}};
    gmclab::io::write_text_atomic(
        (fs::path(plan.out_dir) / "tail.json").string(), tail_doc.dump(2) + "\n");
  } else {
    std::printf("tail index skipped: needs at least 5000 samples\n");
  }
  std::printf("report in %s\n", plan.out_dir.c_str());
  return 0;
}

// ---- estimate-besov ----------------------------------------------------

int cmd_estimate_besov(const GlobalOpts& g, Complex beta, double p,
                       std::string filter, int depth, int count, int cutoff,
                       int m, int d) {
  if (!gmclab::regions::in_ea(beta, d))
    throw std::invalid_argument(
        "beta (" + format_double(beta.real()) + ", " +
        format_double(beta.imag()) +
        ") lies outside the existence region for d = " + std::to_string(d));
  const gmclab::field::GridSpec grid(d, m);
  if (filter.empty()) filter = (d == 1) ? "db8" : "db2";
  const auto basis = gmclab::wavelets::Basis::from_id(filter);
  if (depth <= 0) depth = basis.max_levels(grid);

  json resolved{{"command", "estimate-besov"},
                {"beta", {beta.real(), beta.imag()}},
                {"p", p},
                {"filter", filter},
                {"levels", depth},
                {"M", count},
                {"N", cutoff},
                {"m", m},
                {"d", d},
                {"seed", g.seed}};
  print_config(g, resolved);
  const std::string config = resolved.dump();

  const auto est = gmclab::wavelets::besov_estimate(
      beta, grid, cutoff, basis, depth, p, count, g.seed, g.threads);

  const fs::path dir = fs::path(g.out_dir) / ("besov-" + run_tag(config));
  gmclab::io::ensure_directory(dir.string());
  const double s_csv = est.estimate.smooth_input ? 0.0 : est.estimate.s_hat;
  gmclab::io::write_level_stats_csv((dir / "levels.csv").string(), config,
                                    est.stats, p, s_csv);

  json report{{"version", gmclab::kVersion},
              {"kind", "besov-estimate"},
              {"config", resolved},
              {"filter", filter},
              {"declared_smoothness", basis.declared_smoothness},
              {"window", {est.window.first, est.window.second}},
              {"smooth_input", est.estimate.smooth_input},
              {"generated_at", gmclab::io::timestamp_utc()}};
  if (est.estimate.smooth_input) {
    std::printf("smooth input: every detail level is empty; no finite "
                "regularity to estimate\n");
    report["s_hat"] = nullptr;
  } else {
    report["s_hat"] = est.estimate.s_hat;
    report["stderr"] = est.estimate.stderr_;
    report["slope"] = est.estimate.slope;
    const bool smoothness_ok =
        std::abs(est.estimate.s_hat) < basis.declared_smoothness;
    report["smoothness_ok"] = smoothness_ok;
    std::printf("s_hat = %s +- %s", format_double(est.estimate.s_hat).c_str(),
                format_double(est.estimate.stderr_).c_str());
    if (std::isfinite(est.s_predicted))
      std::printf("   (predicted threshold %s)",
                  format_double(est.s_predicted).c_str());
    std::printf("\n");
    if (!smoothness_ok)
      std::printf("warning: |s_hat| reaches the filter's declared smoothness "
                  "%s; use a longer filter\n",
                  format_double(basis.declared_smoothness).c_str());
  }
  if (std::isfinite(est.s_predicted)) report["s_predicted"] = est.s_predicted;
  gmclab::io::write_text_atomic((dir / "report.json").string(),
                                report.dump(2) + "\n");

  if (g.plot && !est.estimate.smooth_input) {
    std::vector<std::array<double, 2>> data, fit;
    for (const auto& st : est.stats)
      if (st.j >= est.window.first && st.j <= est.window.second)
        data.push_back({static_cast<double>(st.j), std::log2(st.s_j)});
    if (data.size() >= 2) {
      // extend the fitted line across the window
      const double x0 = data.front()[0], x1 = data.back()[0];
      double mx = 0, my = 0;
      for (const auto& q : data) {
        mx += q[0];
        my += q[1];
      }
      mx /= data.size();
      my /= data.size();
      fit.push_back({x0, my + est.estimate.slope * (x0 - mx)});
      fit.push_back({x1, my + est.estimate.slope * (x1 - mx)});
    }
    gmclab::io::write_text_atomic(
        (dir / "levels.svg").string(),
        svg_plot({data, fit}, "log2 S_j vs level (slope " +
                                  format_double(est.estimate.slope) + ")"));
  }
  std::printf("report in %s\n", dir.string().c_str());
  return 0;
}

// ---- selftest ----------------------------------------------------------

struct CheckOutcome {
  std::string name;
  bool ok;
  std::string note;
};

int cmd_selftest(const GlobalOpts& g) {
  using gmclab::rng::Block;
  std::vector<CheckOutcome> checks;
  const auto run = [&](const std::string& name, auto&& fn) {
    CheckOutcome outcome{name, false, ""};
    try {
      outcome.ok = fn(outcome.note);
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.note = e.what();
    }
    std::printf("[%s] %s%s%s\n", outcome.ok ? " ok " : "FAIL",
                name.c_str(), outcome.note.empty() ? "" : ": ",
                outcome.note.c_str());
    checks.push_back(outcome);
  };

  run("counter rng known answers", [&](std::string&) {
    const Block a = gmclab::rng::philox4x32({0, 0, 0, 0}, 0);
    const Block b = gmclab::rng::philox4x32(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        0xffffffffffffffffULL);
    const Block c = gmclab::rng::philox4x32(
        {0x243F6A88u, 0x85A308D3u, 0x13198A2Eu, 0x03707344u},
        0x299F31D0A4093822ULL);
    return a.x0 == 0x6627e8d5u && a.x1 == 0xe169c58du && a.x2 == 0xbc57ac4cu &&
           a.x3 == 0x9b00dbd8u && b.x0 == 0x408f276du && b.x1 == 0x41c83b0eu &&
           b.x2 == 0xa20bc7c6u && b.x3 == 0x6d5451fdu && c.x0 == 0xd16cfe09u &&
           c.x1 == 0x94fdccebu && c.x2 == 0x5001e420u && c.x3 == 0x24126ea1u;
  });

  run("region closed form vs support function", [&](std::string& note) {
    // The eye is a convex hull, so membership is equivalent to lying under
    // every supporting half-plane; sweep directions and compare.
    gmclab::rng::Stream stream(g.seed, gmclab::rng::kStreamGeneric);
    int disagreements = 0;
    for (int d = 1; d <= 2; ++d) {
      const double rx = std::sqrt(2.0 * d), ry = std::sqrt(double(d));
      for (int t = 0; t < 5000; ++t) {
        const Complex beta{(2.0 * stream.uniform() - 1.0) * rx * 1.1,
                           (2.0 * stream.uniform() - 1.0) * ry * 1.1};
        double margin = 1e300;
        for (int a = 0; a < 720; ++a) {
          const double th = a * (2.0 * std::numbers::pi / 720.0);
          const double ux = std::cos(th), uy = std::sin(th);
          const double support =
              std::max(std::sqrt(double(d)), std::sqrt(2.0 * d) * std::abs(ux));
          margin = std::min(margin,
                            support - (beta.real() * ux + beta.imag() * uy));
        }
        if (std::abs(margin) < 1e-3) continue;  // hull-probe resolution limit
        if ((margin > 0.0) != gmclab::regions::in_ea(beta, d)) ++disagreements;
      }
    }
    note = std::to_string(disagreements) + " disagreements";
    return disagreements == 0;
  });

  run("transform reconstruction and energy", [&](std::string& note) {
    double worst = 0.0;
    gmclab::rng::Stream stream(g.seed, gmclab::rng::kStreamSynthetic);
    for (int vm : {2, 4, 6, 8}) {
      const auto basis = gmclab::wavelets::Basis::daubechies(vm);
      for (int d = 1; d <= 2; ++d) {
        const gmclab::field::GridSpec grid(d, d == 1 ? 8 : 5);
        if (basis.max_levels(grid) < 1) continue;
        std::vector<std::complex<double>> input(grid.size());
        double energy = 0.0;
        for (auto& v : input) {
          v = {stream.normal(), stream.normal()};
          energy += std::norm(v);
        }
        energy *= std::pow(grid.h(), grid.d);
        const auto dec = gmclab::wavelets::dwt_forward(
            input, grid, basis, basis.max_levels(grid));
        double coef_energy = 0.0;
        for (const auto& v : dec.scaling) coef_energy += std::norm(v);
        for (const auto& lvl : dec.detail)
          for (const auto& band : lvl.bands)
            for (const auto& v : band) coef_energy += std::norm(v);
        worst = std::max(worst, std::abs(coef_energy - energy) /
                                    std::max(energy, 1e-300));
        const auto back = gmclab::wavelets::dwt_inverse(dec);
        for (std::size_t i = 0; i < input.size(); ++i)
          worst = std::max(worst, std::abs(back[i] - input[i]));
      }
    }
    note = "max error " + format_double(worst);
    return worst < 1e-9;
  });

  run("normalized exponential has unit mean pairing", [&](std::string& note) {
    const gmclab::field::GridSpec grid(1, 8);
    const auto f =
        gmclab::chaos::TestFunction::smooth_bump(grid, {0.5, 0.0}, 0.2);
    const Complex beta{0.0, 0.8};
    const int count = 400;
    const auto samples = gmclab::montecarlo::collect_pair_samples(
        beta, grid, 32, f, count, gmclab::rng::derive_seed(g.seed, 11),
        g.threads);
    Complex mean{0, 0};
    for (const auto& z : samples) mean += z;
    mean /= double(count);
    double var = 0.0;
    for (const auto& z : samples) var += std::norm(z - mean);
    var /= double(count - 1);
    const double sigma = std::sqrt(var / count);
    const double err = std::abs(mean - Complex{gmclab::chaos::integral(f), 0.0});
    note = "|mean - integral| = " + format_double(err) + ", 4 sigma = " +
           format_double(4.0 * sigma);
    return err <= 4.0 * sigma;
  });

  run("thread-count independence", [&](std::string& note) {
    const gmclab::field::GridSpec grid(1, 8);
    const auto f =
        gmclab::chaos::TestFunction::smooth_bump(grid, {0.5, 0.0}, 0.2);
    const Complex beta{0.5, 0.5};
    const auto one = gmclab::montecarlo::collect_pair_samples(
        beta, grid, 32, f, 64, g.seed, 1);
    const auto many = gmclab::montecarlo::collect_pair_samples(
        beta, grid, 32, f, 64, g.seed, 3);
    for (std::size_t i = 0; i < one.size(); ++i)
      if (one[i] != many[i]) {
        note = "mismatch at realization " + std::to_string(i);
        return false;
      }
    return true;
  });

  run("variance matches the mode sum", [&](std::string& note) {
    const double direct = gmclab::field::sigma2_analytic(1, 10);
    double harmonic = 0.0;
    for (int k = 10; k >= 1; --k) harmonic += 1.0 / k;
    note = "sigma2(N=10) = " + format_double(direct);
    return std::abs(direct - harmonic) < 1e-12;
  });

  bool all_ok = true;
  for (const auto& c : checks) all_ok = all_ok && c.ok;
  std::printf("%s\n", all_ok ? "selftest: all checks passed"
                             : "selftest: FAILURES detected");
  return all_ok ? 0 : kExitStatistical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for complex multiplicative chaos on the torus"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "config file (key=value; [subcommand] sections); flags win");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads,
                 "worker threads (0 = GMCLAB_THREADS env or hardware)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_flag("--verbose", g.verbose, "print the resolved configuration");
  app.add_flag("--plot", g.plot, "also emit SVG plots");

  // regions
  auto* reg = app.add_subcommand("regions", "export parameter-plane geometry");
  reg->fallthrough();
  std::string region = "ea";
  int reg_d = 2, reg_res = 512;
  double reg_p = 2.0;
  reg->add_option("--region", region, "ea, eap or besov-map")
      ->check(CLI::IsMember({"ea", "eap", "besov-map"}));
  reg->add_option("--d", reg_d, "dimension (1 or 2)");
  reg->add_option("--p", reg_p, "moment order");
  reg->add_option("--resolution", reg_res, "vertices / raster cells per axis");

  // verify-scaling
  auto* vs = app.add_subcommand("verify-scaling",
                                "distributional check of the rescaling identity");
  vs->fallthrough();
  std::string vs_beta = "0.5i";
  double vs_eps = 0.25, vs_bump = 0.05, vs_threshold = 0.01;
  int vs_count = 5000, vs_cutoff = 128, vs_m = 12, vs_d = 1;
  vs->add_option("--beta", vs_beta, "complex parameter, e.g. 0.5+0.5i");
  vs->add_option("--epsilon", vs_eps, "dyadic scale factor 2^-l");
  vs->add_option("--M", vs_count, "realizations per side");
  vs->add_option("--N", vs_cutoff, "base frequency cutoff");
  vs->add_option("--m", vs_m, "grid is 2^m points per axis");
  vs->add_option("--d", vs_d, "dimension");
  vs->add_option("--bump-scale", vs_bump, "test bump support radius");
  vs->add_option("--threshold", vs_threshold,
                 "family-wise rejection level (split over 3 marginals)");

  // estimate-moments
  auto* em = app.add_subcommand("estimate-moments",
                                "absolute-moment estimates with tail diagnostics");
  em->fallthrough();
  std::string em_beta = "0.8i", em_fkind = "bump";
  std::vector<double> em_plist{2.0};
  std::vector<double> em_fcenter{0.5, 0.5};
  double em_fscale = 0.1;
  int em_count = 5000, em_cutoff = 256, em_m = 10, em_d = 1;
  em->add_option("--beta", em_beta, "complex parameter");
  em->add_option("--p-list", em_plist, "moment orders")->expected(-1);
  em->add_option("--f-kind", em_fkind, "bump, indicator or constant")
      ->check(CLI::IsMember({"bump", "indicator", "constant"}));
  em->add_option("--f-center", em_fcenter, "test function center")->expected(2);
  em->add_option("--f-scale", em_fscale, "test function support radius");
  em->add_option("--M", em_count, "realizations");
  em->add_option("--N", em_cutoff, "frequency cutoff");
  em->add_option("--m", em_m, "grid is 2^m points per axis");
  em->add_option("--d", em_d, "dimension");

  // estimate-besov
  auto* eb = app.add_subcommand("estimate-besov",
                                "regularity exponent from level statistics");
  eb->fallthrough();
  std::string eb_beta = "0.8i", eb_filter;
  double eb_p = 2.0;
  int eb_depth = 0, eb_count = 100, eb_cutoff = 128, eb_m = 12, eb_d = 1;
  eb->add_option("--beta", eb_beta, "complex parameter");
  eb->add_option("--p", eb_p, "integrability order");
  eb->add_option("--filter", eb_filter,
                 "db2, db4, db6 or db8 (default: db8 for d=1, db2 for d=2)");
  eb->add_option("--levels", eb_depth, "pyramid depth (0 = deepest possible)");
  eb->add_option("--M", eb_count, "realizations");
  eb->add_option("--N", eb_cutoff, "frequency cutoff");
  eb->add_option("--m", eb_m, "grid is 2^m points per axis");
  eb->add_option("--d", eb_d, "dimension");

  // selftest
  auto* st = app.add_subcommand("selftest", "fast built-in property checks");
  st->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (app.got_subcommand(reg))
      return cmd_regions(g, region, reg_d, reg_p, reg_res);
    if (app.got_subcommand(vs))
      return cmd_verify_scaling(g, parse_complex(vs_beta), vs_eps, vs_count,
                                vs_cutoff, vs_m, vs_d, vs_bump, vs_threshold);
    if (app.got_subcommand(em))
      return cmd_estimate_moments(g, parse_complex(em_beta), em_plist,
                                  em_fkind, em_fcenter, em_fscale, em_count,
                                  em_cutoff, em_m, em_d);
    if (app.got_subcommand(eb))
      return cmd_estimate_besov(g, parse_complex(eb_beta), eb_p, eb_filter,
                                eb_depth, eb_count, eb_cutoff, eb_m, eb_d);
    if (app.got_subcommand(st)) return cmd_selftest(g);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
