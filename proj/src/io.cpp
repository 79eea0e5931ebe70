#include "gmclab/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gmclab/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary exports assume a little-endian host");

namespace gmclab::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  fs::create_directories(path);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_doubles(const std::string& path, const double* data,
                   std::size_t count) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw std::runtime_error("short write to '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

std::vector<double> read_doubles(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::streamsize bytes = in.tellg();
  if (bytes % static_cast<std::streamsize>(sizeof(double)) != 0)
    throw std::runtime_error("'" + path + "' is not a whole number of doubles");
  std::vector<double> data(static_cast<std::size_t>(bytes) / sizeof(double));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), bytes);
  if (!in) throw std::runtime_error("short read from '" + path + "'");
  return data;
}

json read_json_file(const std::string& path) {
  return json::parse(read_text(path));
}

}  // namespace

void write_field(const std::string& stem, const field::Realization& r) {
  write_doubles(stem + ".f64", r.values.data(), r.values.size());
  json meta{{"kind", "field"},
            {"d", r.grid.d},
            {"m", r.grid.m},
            {"cutoff", r.cutoff},
            {"seed", r.seed},
            {"sigma2", r.sigma2},
            {"imag_residue", r.imag_residue},
            {"version", kVersion}};
  write_text_atomic(stem + ".json", meta.dump(2) + "\n");
}

field::Realization read_field(const std::string& stem) {
  const json meta = read_json_file(stem + ".json");
  if (meta.value("kind", "") != "field")
    throw std::runtime_error("'" + stem + ".json' does not describe a field");
  field::GridSpec grid(meta.at("d").get<int>(), meta.at("m").get<int>());
  field::Realization r{grid,
                       meta.at("cutoff").get<int>(),
                       meta.at("seed").get<std::uint64_t>(),
                       meta.at("sigma2").get<double>(),
                       read_doubles(stem + ".f64"),
                       meta.value("imag_residue", 0.0)};
  if (r.values.size() != grid.size())
    throw std::runtime_error("'" + stem + ".f64' size does not match its grid");
  return r;
}

void write_chaos(const std::string& stem, const chaos::Realization& c) {
  std::vector<double> interleaved(2 * c.values.size());
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    interleaved[2 * i] = c.values[i].real();
    interleaved[2 * i + 1] = c.values[i].imag();
  }
  write_doubles(stem + ".f64", interleaved.data(), interleaved.size());
  json meta{{"kind", "chaos"},
            {"d", c.grid.d},
            {"m", c.grid.m},
            {"cutoff", c.cutoff},
            {"seed", c.seed},
            {"beta", {c.beta.real(), c.beta.imag()}},
            {"log_scale", c.log_scale},
            {"version", kVersion}};
  write_text_atomic(stem + ".json", meta.dump(2) + "\n");
}

chaos::Realization read_chaos(const std::string& stem) {
  const json meta = read_json_file(stem + ".json");
  if (meta.value("kind", "") != "chaos")
    throw std::runtime_error("'" + stem + ".json' does not describe a chaos");
  field::GridSpec grid(meta.at("d").get<int>(), meta.at("m").get<int>());
  const auto b = meta.at("beta");
  chaos::Realization c{grid,
                       {b.at(0).get<double>(), b.at(1).get<double>()},
                       meta.at("cutoff").get<int>(),
                       meta.at("seed").get<std::uint64_t>(),
                       meta.value("log_scale", 0.0),
                       {}};
  const std::vector<double> interleaved = read_doubles(stem + ".f64");
  if (interleaved.size() != 2 * grid.size())
    throw std::runtime_error("'" + stem + ".f64' size does not match its grid");
  c.values.resize(grid.size());
  for (std::size_t i = 0; i < c.values.size(); ++i)
    c.values[i] = {interleaved[2 * i], interleaved[2 * i + 1]};
  return c;
}

std::string sample_row_line(const SampleRow& row) {
  return std::to_string(row.index) + "," + std::to_string(row.seed) + "," +
         format_double(row.re) + "," + format_double(row.im);
}

void write_samples_csv(const std::string& path, const std::string& config,
                       const std::vector<SampleRow>& rows) {
  std::string out;
  out.reserve(64 * (rows.size() + 3));
  out += "# samples v1\n";
  out += "# config ";
  out += config;
  out += "\nindex,seed,re,im\n";
  for (const SampleRow& row : rows) {
    out += sample_row_line(row);
    out += '\n';
  }
  write_text_atomic(path, out);
}

namespace {

bool parse_sample_row(const std::string& line, SampleRow& row) {
  std::array<std::string, 4> fields;
  std::size_t start = 0;
  for (int f = 0; f < 3; ++f) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) return false;
    fields[static_cast<std::size_t>(f)] = line.substr(start, comma - start);
    start = comma + 1;
  }
  fields[3] = line.substr(start);
  try {
    std::size_t used = 0;
    row.index = std::stoull(fields[0], &used);
    if (used != fields[0].size()) return false;
    row.seed = std::stoull(fields[1], &used);
    if (used != fields[1].size()) return false;
    row.re = parse_double(fields[2]);
    row.im = parse_double(fields[3]);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

SamplesFile read_samples_csv(const std::string& path) {
  const std::string text = read_text(path);
  SamplesFile out;
  std::size_t pos = 0;
  bool saw_columns = false;
  std::vector<std::pair<std::string, bool>> lines;  // text, is_final
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool final_piece = (nl == std::string::npos);
    lines.emplace_back(
        text.substr(pos, final_piece ? std::string::npos : nl - pos),
        final_piece);
    pos = final_piece ? text.size() : nl + 1;
  }
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li].first;
    // A piece without its trailing newline is a torn append: even if it
    // parses it may be truncated mid-number, so it is always dropped (the
    // resume pass recomputes that row).
    if (lines[li].second) continue;
    if (line.empty()) continue;
    if (line.rfind("# config ", 0) == 0) {
      out.config = line.substr(9);
      continue;
    }
    if (line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "index,seed,re,im")
        throw std::runtime_error("'" + path + "' has an unexpected header");
      saw_columns = true;
      continue;
    }
    SampleRow row;
    if (!parse_sample_row(line, row))
      throw std::runtime_error("'" + path + "' has a corrupt row: " + line);
    out.rows.push_back(row);
  }
  return out;
}

void write_level_stats_csv(const std::string& path, const std::string& config,
                           const std::vector<wavelets::LevelStats>& stats,
                           double p, double s) {
  std::string out = "# level stats v1\n# config " + config + "\nj,count,S_j,A_j,p,s\n";
  for (const auto& st : stats) {
    out += std::to_string(st.j) + "," + std::to_string(st.count) + "," +
           format_double(st.s_j) + "," + format_double(st.a_j) + "," +
           format_double(p) + "," + format_double(s) + "\n";
  }
  write_text_atomic(path, out);
}

void write_polyline_csv(const std::string& path, const std::string& config,
                        const std::vector<std::array<double, 2>>& points) {
  std::string out = "# polyline v1\n# config " + config + "\nre,im\n";
  for (const auto& pt : points)
    out += format_double(pt[0]) + "," + format_double(pt[1]) + "\n";
  write_text_atomic(path, out);
}

bool json_reports_equal(const std::string& path_a, const std::string& path_b) {
  json a = read_json_file(path_a);
  json b = read_json_file(path_b);
  for (json* doc : {&a, &b}) {
    doc->erase("generated_at");
    doc->erase("wall_seconds");
    if (auto it = doc->find("plan"); it != doc->end() && it->is_object())
      it->erase("out_dir");
  }
  return a == b;
}

}  // namespace gmclab::io
