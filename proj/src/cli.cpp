#include "fuzzyflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/io.hpp"
#include "fuzzyflow/metric.hpp"
#include "fuzzyflow/verify.hpp"

namespace fuzzyflow::cli {

using nlohmann::ordered_json;

std::pair<int, int> parse_n_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {n, n};
    }
    const std::string lo_s = text.substr(0, dots);
    const std::string hi_s = text.substr(dots + 2);
    const int lo = std::stoi(lo_s, &used);
    if (used != lo_s.size()) throw std::invalid_argument(text);
    const int hi = std::stoi(hi_s, &used);
    if (used != hi_s.size()) throw std::invalid_argument(text);
    if (lo > hi) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError(fmt::format("--n: expected N or LO..HI, got '{}'", text));
  }
}

namespace {

std::string_view kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::flat:
      return "flat";
    case MetricKind::cigar:
      return "cigar";
    case MetricKind::random:
      return "random";
    case MetricKind::file:
      return "file";
  }
  return "unknown";
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

Metric initial_metric(const RunSpec& spec, const FuzzyTorus& torus, io::RunContext& ctx) {
  ctx.metric_kind = kind_name(spec.metric);
  switch (spec.metric) {
    case MetricKind::flat:
      ctx.metric_params = {{"alpha", spec.alpha}};
      return flat(torus.dim(), spec.alpha);
    case MetricKind::cigar:
      ctx.metric_params = {{"mass", spec.mass}};
      return cigar(torus, spec.mass);
    case MetricKind::random:
      if (!(spec.spread >= 0.0)) throw UsageError("--spread must be non-negative");
      ctx.metric_params = {{"spread", spec.spread}, {"seed", spec.seed}};
      return random_metric(torus.dim(), spec.spread, spec.seed);
    case MetricKind::file: {
      ctx.metric_params = {{"path", spec.path.string()}};
      Metric c = io::read_metric(spec.path);
      if (c.dim() != torus.dim())
        throw ValidationError(fmt::format("metric file: dimension {} does not match --n {}",
                                          c.dim(), torus.dim()));
      return c;
    }
  }
  throw UsageError("unknown metric kind");
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();

  TorusParams tp = spec.torus;
  if (spec.x_path) {
    tp.x_choice = XChoice::custom;
    tp.custom_x = io::hermitian_from_json(io::read_text(*spec.x_path));
  }
  const FuzzyTorus torus(tp);

  io::RunContext ctx;
  Metric c0 = initial_metric(spec, torus, ctx);
  if (spec.density_mode) {
    Density d = normalize_density(c0);
    ctx.kappa = d.kappa;
    c0 = std::move(d.rho);
  }

  FlowConfig cfg = spec.config;
  const FlowConfig scaled = FlowConfig::for_metric(c0);
  if (!spec.t_max_given) cfg.t_max = cfg.t0 + scaled.t_max;
  if (!spec.h_max_given) cfg.h_max = scaled.h_max;
  if (!spec.h_min_given) cfg.h_min = scaled.h_min;
  const FlowTrace trace = integrate(torus, c0, cfg);

  ctx.timestamp = utc_timestamp();
  ctx.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(spec.out);
  if (spec.format != OutputFormat::json)
    io::write_text(spec.out / "trace.csv", io::trace_csv(trace));
  if (spec.format != OutputFormat::csv)
    io::write_text(spec.out / "manifest.json", io::manifest(trace, ctx).dump(2) + "\n");

  const FlowSample& last = trace.samples.back();
  fmt::print(out,
             "termination={} t={:.6g} dist_flat={:.3e} violations: log_det={} entropy={} "
             "dist_flat={} (accepted {}, rejected {})\n",
             to_string(trace.termination), last.t, last.diag.dist_flat, trace.violations.log_det,
             trace.violations.entropy, trace.violations.dist_flat, trace.accepted, trace.rejected);
  return trace.termination == Termination::step_underflow ? exit_underflow : exit_ok;
}

int verify(const VerifySpec& spec, std::ostream& out) {
  verify::SuiteOptions opts;
  opts.pairs = spec.pairs;
  opts.seeds = spec.seeds;
  opts.base_seed = spec.seed;
  opts.x_choice = spec.x_choice;

  using Suite = std::vector<verify::PropertyResult> (*)(const verify::SuiteOptions&);
  std::vector<std::pair<std::string_view, Suite>> suites;
  if (!spec.superop_only) {
    suites.emplace_back("algebra", &verify::algebra_suite);
    suites.emplace_back("derivations", static_cast<Suite>(&verify::derivation_suite));
  }
  suites.emplace_back("superoperator", &verify::superop_suite);
  if (!spec.superop_only) {
    suites.emplace_back("positivity", &verify::positivity_suite);
    suites.emplace_back("functional calculus", &verify::functional_calculus_suite);
    suites.emplace_back("flow", &verify::flow_suite);
  }

  int passed = 0, total = 0;
  for (const auto& [name, suite] : suites) {
    fmt::print(out, "[{}]\n", name);
    for (const auto& r : suite(opts)) {
      ++total;
      if (r.pass()) ++passed;
      fmt::print(out, "{}  {}  worst={:.3e} {} {:.1e}  cases={}\n", r.pass() ? "PASS" : "FAIL",
                 r.name, r.worst, r.bound == verify::Bound::at_most ? "<=" : ">", r.tolerance,
                 r.cases);
    }
  }
  fmt::print(out, "{}/{} properties passed\n", passed, total);
  return passed == total ? exit_ok : exit_failure;
}

int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noncommutative Ricci flow on the fuzzy torus", "fuzzyflow"};
  app.require_subcommand(1);

  RunSpec rs;
  std::string x_choice = "standard";
  std::string metric;
  std::string format = "both";
  double h_init = 0.0;
  CLI::App* run_cmd = app.add_subcommand("run", "integrate one flow and write its trace");
  run_cmd->add_option("--n", rs.torus.n, "matrix size")->required();
  run_cmd->add_option("--m", rs.torus.m, "q = exp(2 pi i m / n), gcd(m, n) = 1")->required();
  run_cmd->add_option("--x-choice", x_choice, "standard | mod-n | file:<path>")
      ->capture_default_str();
  run_cmd->add_option("--metric", metric, "initial metric")
      ->required()
      ->check(CLI::IsMember({"flat", "cigar", "random", "file"}));
  CLI::Option* o_alpha = run_cmd->add_option("--alpha", rs.alpha, "flat: alpha * 1");
  CLI::Option* o_mass = run_cmd->add_option("--mass", rs.mass, "cigar: (M + x^2 + y^2)^-1");
  CLI::Option* o_spread = run_cmd->add_option("--spread", rs.spread, "random: entry deviation");
  CLI::Option* o_seed = run_cmd->add_option("--seed", rs.seed, "random: generator seed")
                            ->capture_default_str();
  CLI::Option* o_path = run_cmd->add_option("--path", rs.path, "file: metric JSON");
  run_cmd->add_option("--t0", rs.config.t0)->capture_default_str();
  CLI::Option* o_tmax = run_cmd->add_option(
      "--t-max", rs.config.t_max, "horizon (default 1e3 * max(1, tr(c0) / n))");
  CLI::Option* o_hinit =
      run_cmd->add_option("--h-init", h_init, "first step (default 1e-3 / ||rhs(c0)||)");
  run_cmd->add_option("--atol", rs.config.atol)->capture_default_str();
  run_cmd->add_option("--conv-tol", rs.config.conv_tol)->capture_default_str();
  auto* o_hmin = run_cmd->add_option("--h-min", rs.config.h_min,
                                     "smallest step (default 1e-12 * min(1, lambda_min(c0)))");
  CLI::Option* o_hmax =
      run_cmd->add_option("--h-max", rs.config.h_max, "largest step (default max(1, tr(c0) / n))");
  run_cmd->add_option("--guard", rs.config.guard)->capture_default_str();
  run_cmd->add_flag("--density-mode", rs.density_mode, "flow c0 / tr(c0) instead of c0");
  run_cmd->add_option("--out", rs.out, "output directory")->capture_default_str();
  run_cmd->add_option("--format", format)
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();

  VerifySpec vs;
  std::string n_range = "2..8";
  std::string verify_x = "standard";
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the property suites");
  verify_cmd->add_option("--n", n_range, "N or LO..HI")->capture_default_str();
  verify_cmd->add_option("--seeds", vs.seeds, "random cases per property")->capture_default_str();
  verify_cmd->add_option("--seed", vs.seed, "base seed")->capture_default_str();
  verify_cmd->add_option("--x-choice", verify_x)
      ->check(CLI::IsMember({"standard", "mod-n"}))
      ->capture_default_str();
  verify_cmd->add_flag("--superop", vs.superop_only, "only the Laplacian spectrum suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_failure;
  }

  try {
    if (*verify_cmd) {
      const auto [lo, hi] = parse_n_range(n_range);
      if (lo < 2) throw UsageError("--n: sizes start at 2");
      if (vs.seeds < 1) throw UsageError("--seeds must be at least 1");
      vs.pairs = verify::coprime_pairs(lo, hi);
      vs.x_choice = verify_x == "mod-n" ? XChoice::mod_n : XChoice::standard;
      return verify(vs, out);
    }

    if (x_choice == "standard") {
      rs.torus.x_choice = XChoice::standard;
    } else if (x_choice == "mod-n") {
      rs.torus.x_choice = XChoice::mod_n;
    } else if (x_choice.starts_with("file:") && x_choice.size() > 5) {
      rs.x_path = x_choice.substr(5);
    } else {
      throw UsageError(
          fmt::format("--x-choice: expected standard, mod-n or file:<path>, got '{}'", x_choice));
    }
    // Gate n and m before touching any file.
    TorusParams gate = rs.torus;
    gate.x_choice = XChoice::standard;
    validate_params(gate);

    const std::pair<MetricKind, std::vector<CLI::Option*>> kinds[] = {
        {MetricKind::flat, {o_alpha}},
        {MetricKind::cigar, {o_mass}},
        {MetricKind::random, {o_spread, o_seed}},
        {MetricKind::file, {o_path}}};
    for (const auto& [kind, opts] : kinds) {
      const bool selected = metric == kind_name(kind);
      if (selected) rs.metric = kind;
      for (CLI::Option* o : opts) {
        if (!selected && o->count() > 0)
          throw UsageError(fmt::format("{} does not apply to --metric {}", o->get_name(), metric));
      }
      // The seed has a default; the first option of each set is required.
      if (selected && opts.front()->count() == 0)
        throw UsageError(
            fmt::format("--metric {} requires {}", metric, opts.front()->get_name()));
    }

    rs.t_max_given = o_tmax->count() > 0;
    rs.h_max_given = o_hmax->count() > 0;
    rs.h_min_given = o_hmin->count() > 0;
    if (o_hinit->count() > 0) rs.config.h_init = h_init;
    rs.format = format == "csv" ? OutputFormat::csv
                : format == "json" ? OutputFormat::json
                                   : OutputFormat::both;
    return run(rs, out);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_failure;
  }
}

}  // namespace fuzzyflow::cli
