#pragma once

// Command-line front end: `run` integrates one flow and writes trace.csv and
// manifest.json, `verify` runs the property suites.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuzzyflow/flow.hpp"
#include "fuzzyflow/torus.hpp"

namespace fuzzyflow::cli {

enum class MetricKind { flat, cigar, random, file };
enum class OutputFormat { csv, json, both };

struct RunSpec {
  TorusParams torus;
  std::optional<std::filesystem::path> x_path;  // for --x-choice file:<path>
  MetricKind metric = MetricKind::flat;
  double alpha = 1.0;
  double mass = 1.0;
  double spread = 1.0;
  std::uint64_t seed = 1;
  std::filesystem::path path;
  FlowConfig config;
  bool t_max_given = false;  // otherwise scaled to the metric level
  bool h_max_given = false;
  bool h_min_given = false;
  bool density_mode = false;
  std::filesystem::path out = ".";
  OutputFormat format = OutputFormat::both;
};

struct VerifySpec {
  std::vector<std::pair<int, int>> pairs;
  int seeds = 50;
  std::uint64_t seed = 1;
  XChoice x_choice = XChoice::standard;
  bool superop_only = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  // usage, validation or I/O
inline constexpr int exit_underflow = 2;

/// Parses "a..b" or "a" into an inclusive range of n.
std::pair<int, int> parse_n_range(const std::string& text);

/// Full command line, argv[0] included. Returns the process exit code;
/// diagnostics go to `err`, the summary to `out`.
int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const RunSpec& spec, std::ostream& out);
int verify(const VerifySpec& spec, std::ostream& out);

}  // namespace fuzzyflow::cli
