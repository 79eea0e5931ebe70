#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gmclab/chaos.hpp"
#include "gmclab/field.hpp"
#include "gmclab/wavelets.hpp"

namespace gmclab::io {

// Shortest decimal form that round-trips the exact double (std::to_chars),
// so rewriting parsed files is byte-stable.
std::string format_double(double v);
double parse_double(const std::string& text);

std::string timestamp_utc();

void ensure_directory(const std::string& path);
// Writes to a temporary sibling and renames, so readers never observe a
// half-written file.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Grid data as flat little-endian 64-bit floats (row-major, x fastest) next
// to a JSON sidecar carrying grid, cutoff, seed and normalization metadata.
// `stem` gets the extensions ".f64" and ".json".
void write_field(const std::string& stem, const field::Realization& r);
field::Realization read_field(const std::string& stem);

// Chaos densities use the same convention with re/im interleaved.
void write_chaos(const std::string& stem, const chaos::Realization& c);
chaos::Realization read_chaos(const std::string& stem);

// Sample CSVs: comment header with a config line, then (index, seed, re, im)
// rows. The config line pins the plan that produced the file; resuming
// against a different plan is refused by the caller.
struct SampleRow {
  std::uint64_t index;
  std::uint64_t seed;
  double re;
  double im;
};

struct SamplesFile {
  std::string config;
  std::vector<SampleRow> rows;
};

std::string sample_row_line(const SampleRow& row);
void write_samples_csv(const std::string& path, const std::string& config,
                       const std::vector<SampleRow>& rows);
// Tolerates a torn final line (interrupted append); any earlier malformed
// row is treated as corruption.
SamplesFile read_samples_csv(const std::string& path);

void write_level_stats_csv(const std::string& path, const std::string& config,
                           const std::vector<wavelets::LevelStats>& stats,
                           double p, double s);

void write_polyline_csv(const std::string& path, const std::string& config,
                        const std::vector<std::array<double, 2>>& points);

// Deep equality of two JSON report files ignoring the environment-dependent
// stamps: "generated_at", "wall_seconds", and the plan's "out_dir". Two runs
// of the same plan into different directories compare equal when they
// computed the same thing.
bool json_reports_equal(const std::string& path_a, const std::string& path_b);

}  // namespace gmclab::io
