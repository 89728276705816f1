#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fuzzyflow/flow.hpp"
#include "fuzzyflow/metric.hpp"

namespace fuzzyflow::io {

/// {"n": int, "entries": [[re, im], ...]} row-major, 17 significant digits.
std::string metric_to_json(const CMatrix& c);
inline std::string metric_to_json(const Metric& c) { return metric_to_json(c.matrix().matrix()); }

/// Parses and validates Hermiticity (tol::herm) and strict positivity.
/// Throws ValidationError for malformed or non-Hermitian input and
/// DomainError when strict positivity fails; messages name the invariant.
Metric metric_from_json(std::string_view text);
/// Same file format, Hermiticity checked but no positivity requirement.
HermMatrix hermitian_from_json(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

inline Metric read_metric(const std::filesystem::path& path) {
  return metric_from_json(read_text(path));
}
inline void write_metric(const std::filesystem::path& path, const Metric& c) {
  write_text(path, metric_to_json(c));
}

inline constexpr std::string_view trace_csv_header =
    "t,trace,log_det,entropy,dist_flat,curvature_norm,lambda_min,lambda_max,step_used";

/// Header plus one row per recorded state, floats at 17 significant digits.
std::string trace_csv(const FlowTrace& trace);

/// Run context recorded next to the trace in the manifest.
struct RunContext {
  std::string metric_kind;
  nlohmann::ordered_json metric_params = nlohmann::ordered_json::object();
  std::optional<double> kappa;  // density mode
  std::string timestamp;        // excluded from determinism comparisons
  double wall_seconds = 0.0;    // likewise
};

nlohmann::ordered_json manifest(const FlowTrace& trace, const RunContext& ctx);

/// Manifest keys that vary from run to run.
inline constexpr std::string_view volatile_keys[] = {"timestamp", "wall_seconds"};

}  // namespace fuzzyflow::io
