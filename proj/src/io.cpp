#include "fuzzyflow/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"

namespace fuzzyflow::io {

using nlohmann::ordered_json;

std::string metric_to_json(const CMatrix& c) {
  std::string out = fmt::format("{{\"n\": {}, \"entries\": [", c.dim());
  const auto e = c.entries();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("[{:.17g}, {:.17g}]", e[i].real(), e[i].imag());
  }
  out += "]}\n";
  return out;
}

namespace {

CMatrix parse_matrix(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("metric file: invalid JSON ({})", e.what()));
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw ValidationError("metric file: expected an object with \"n\" and \"entries\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw ValidationError("metric file: \"n\" must be a positive integer");
  const auto n = j["n"].get<std::size_t>();
  const auto& entries = j["entries"];
  if (!entries.is_array() || entries.size() != n * n)
    throw ValidationError(
        fmt::format("metric file: \"entries\" must hold n^2 = {} [re, im] pairs", n * n));
  std::vector<cplx> data;
  data.reserve(n * n);
  for (const auto& pair : entries) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw ValidationError("metric file: every entry must be a [re, im] number pair");
    data.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  return CMatrix(n, std::move(data));
}

}  // namespace

HermMatrix hermitian_from_json(std::string_view text) {
  const CMatrix a = parse_matrix(text);
  try {
    return HermMatrix(a);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("metric file: Hermiticity violated: {}", e.what()));
  }
}

Metric metric_from_json(std::string_view text) {
  HermMatrix c = hermitian_from_json(text);
  try {
    return Metric(std::move(c));
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("metric file: strict positivity violated: {}", e.what()),
                      e.lambda_min());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

std::string trace_csv(const FlowTrace& trace) {
  std::string out(trace_csv_header);
  out += '\n';
  for (const auto& s : trace.samples) {
    const DiagRecord& d = s.diag;
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       s.t, d.trace_c, d.log_det_c, d.entropy, d.dist_flat, d.curvature_norm,
                       d.lambda_min, d.lambda_max, d.step_used);
  }
  return out;
}

namespace {

std::string_view x_choice_name(XChoice x) {
  switch (x) {
    case XChoice::standard:
      return "standard";
    case XChoice::mod_n:
      return "mod-n";
    case XChoice::custom:
      return "custom";
  }
  return "unknown";
}

}  // namespace

ordered_json manifest(const FlowTrace& trace, const RunContext& ctx) {
  ordered_json m;
  m["params"] = {{"n", trace.params.n},
                 {"m", trace.params.m},
                 {"x_choice", x_choice_name(trace.params.x_choice)}};
  const FlowConfig& c = trace.config;
  m["config"] = {{"t0", c.t0},
                 {"t_max", c.t_max},
                 {"h_init", c.h_init ? ordered_json(*c.h_init) : ordered_json(nullptr)},
                 {"atol", c.atol},
                 {"h_min", c.h_min},
                 {"h_max", c.h_max},
                 {"conv_tol", c.conv_tol},
                 {"guard", c.guard}};
  m["initial_metric"] = {{"kind", ctx.metric_kind}, {"params", ctx.metric_params}};
  m["density_mode"] = ctx.kappa.has_value();
  m["kappa"] = ctx.kappa ? ordered_json(*ctx.kappa) : ordered_json(nullptr);
  m["termination"] = to_string(trace.termination);
  m["c_infinity"] = trace.c_infinity;
  m["final_time"] = trace.samples.back().t;
  m["final_dist_flat"] = trace.samples.back().diag.dist_flat;
  m["accepted_steps"] = trace.accepted;
  m["rejected_steps"] = trace.rejected;
  m["violations"] = {{"log_det", trace.violations.log_det},
                     {"entropy", trace.violations.entropy},
                     {"dist_flat", trace.violations.dist_flat}};
  m["final_metric"] = ordered_json::parse(metric_to_json(trace.final_metric));
  m["timestamp"] = ctx.timestamp;
  m["wall_seconds"] = ctx.wall_seconds;
  return m;
}

}  // namespace fuzzyflow::io
