#include "fuzzyflow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"

namespace fuzzyflow {

void FlowConfig::validate() const {
  if (!(t_max > t0)) throw UsageError(fmt::format("t_max ({}) must exceed t0 ({})", t_max, t0));
  if (!(atol > 0.0) || !(conv_tol > 0.0) || !(guard > 0.0) || !(h_min > 0.0) || !(h_max > 0.0))
    throw UsageError("atol, conv_tol, guard, h_min and h_max must be positive");
  if (h_min > h_max) throw UsageError(fmt::format("h_min ({}) exceeds h_max ({})", h_min, h_max));
  if (h_init && (*h_init < h_min || *h_init > h_max))
    throw UsageError(fmt::format("h_init ({}) must lie in [h_min, h_max] = [{}, {}]", *h_init,
                                 h_min, h_max));
}

FlowConfig FlowConfig::for_metric(const Metric& c0) {
  const double level = c0.level();
  FlowConfig cfg;
  const double scale = std::max(1.0, level);
  cfg.t_max *= scale;
  cfg.h_max *= scale;
  cfg.h_min *= std::min(1.0, c0.lambda_min());
  return cfg;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::horizon:
      return "horizon";
    case Termination::step_underflow:
      return "step-underflow";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

HermMatrix centered_log(const HermMatrix& c) {
  const std::size_t n = c.dim();
  const double s = trace(c).real() / static_cast<double>(n);
  if (!(s > 0.0)) throw DomainError("log: matrix is not strictly positive (trace <= 0)", s);
  CMatrix shifted = c.matrix();
  shifted.add_identity(-s);
  const EigDecomp e = eigh(HermMatrix::symmetrized(shifted));
  const double lo = s + e.min();
  const double hi = s + e.max();
  if (!(lo > tol::pos * std::max(1.0, hi)))
    throw DomainError(fmt::format("log: matrix is not strictly positive (lambda_min = {:.6e})", lo),
                      lo);
  return apply_fn(e, [s](double mu) { return std::log1p(mu / s); });
}

HermMatrix rhs(const FuzzyTorus& torus, const HermMatrix& c) {
  HermMatrix out = torus.laplacian(centered_log(c));
  return out *= -1.0;
}

HermMatrix rhs(const FuzzyTorus& torus, const Metric& c) { return rhs(torus, c.matrix()); }

HermMatrix rk4_increment(const FuzzyTorus& torus, const HermMatrix& c, double h) {
  const HermMatrix k1 = rhs(torus, c);
  const HermMatrix k2 = rhs(torus, c + (0.5 * h) * k1);
  const HermMatrix k3 = rhs(torus, c + (0.5 * h) * k2);
  const HermMatrix k4 = rhs(torus, c + h * k3);
  return (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

HermMatrix rk4_step(const FuzzyTorus& torus, const HermMatrix& c, double h) {
  return c + rk4_increment(torus, c, h);
}

namespace {

// sum_j p_j log(n p_j) for the metric level * 1 + dev (tr dev = 0), using
// n p_j = 1 + mu_j / level with mu_j the eigenvalues of dev. Working from the
// deviation keeps full relative precision when the metric is nearly flat.
double divergence_from_deviation(const CMatrix& dev, double level) {
  const EigDecomp e = eigh(HermMatrix::symmetrized(dev));
  double rel = 0.0;
  for (double mu : e.values) {
    const double r = mu / level;
    rel += (1.0 + r) * std::log1p(r);
  }
  return rel / static_cast<double>(dev.dim());
}

CMatrix deviation(const HermMatrix& c, double level) {
  CMatrix d = c.matrix();
  d.add_identity(-level);
  return d;
}

}  // namespace

double flat_divergence(const Metric& c) {
  return divergence_from_deviation(deviation(c.matrix(), c.level()), c.level());
}

double entropy(const Metric& c) {
  return std::log(static_cast<double>(c.dim())) - flat_divergence(c);
}

double dist_flat(const Metric& c, double level) {
  CMatrix d = c.matrix().matrix();
  d.add_identity(-level);
  const double r = hs_norm(d);
  return r * r;
}

HermMatrix scalar_curvature(const FuzzyTorus& torus, const Metric& c) {
  return frechet_log(c.eig(), torus.laplacian(centered_log(c.matrix())));
}

double log_det_rate(const FuzzyTorus& torus, const Metric& c) {
  return trace(mul(mat_inv(c.eig()), rhs(torus, c))).real();
}

FlowState make_state(const FuzzyTorus& torus, double t, Metric c, double c_infinity,
                     double step_used) {
  HermMatrix r = scalar_curvature(torus, c);
  DiagRecord d;
  d.trace_c = c.trace();
  d.log_det_c = log_det(c.eig());
  d.entropy = entropy(c);
  d.dist_flat = dist_flat(c, c_infinity);
  d.curvature_norm = hs_norm(r);
  d.lambda_min = c.lambda_min();
  d.lambda_max = c.lambda_max();
  d.step_used = step_used;
  d.curvature_weight = trace(mul(c.matrix(), r)).real();
  return FlowState{t, std::move(c), std::move(r), d};
}

double stability_limit(const FuzzyTorus& torus, const Metric& c) {
  return 2.5 * c.lambda_min() / torus.laplacian_bound();
}

double positivity_floor(const Metric& c0, double guard) {
  const double floor = guard * c0.level();
  return c0.lambda_min() > floor ? floor : guard * c0.lambda_min();
}

namespace {

struct Proposal {
  std::optional<Metric> metric;
  double error_estimate = 0.0;
};

Proposal propose(const FuzzyTorus& torus, const HermMatrix& c, double h, double floor) {
  Proposal p;
  try {
    const HermMatrix full = rk4_step(torus, c, h);
    const HermMatrix half = rk4_step(torus, rk4_step(torus, c, 0.5 * h), 0.5 * h);
    p.error_estimate = hs_norm(full - half) / 15.0;
    EigDecomp eig = eigh(half);
    if (eig.min() > floor) p.metric.emplace(half, std::move(eig));
  } catch (const DomainError&) {
    // an RK stage left the positive cone; same treatment as a guard rejection
  }
  return p;
}

}  // namespace

StepResult step(const FuzzyTorus& torus, const FlowState& state, double h,
                double positivity_floor) {
  if (!(h > 0.0)) throw UsageError("step: h must be positive");
  Proposal p = propose(torus, state.c.matrix(), h, positivity_floor);
  StepResult out;
  out.error_estimate = p.error_estimate;
  if (p.metric) {
    // The flow conserves the trace, so the initial level is the current one.
    out.state = make_state(torus, state.t + h, std::move(*p.metric), state.c.level(), h);
  }
  return out;
}

FlowTrace integrate(const FuzzyTorus& torus, const Metric& c0, const FlowConfig& config) {
  config.validate();
  if (c0.dim() != torus.dim())
    throw UsageError(fmt::format("integrate: metric dimension {} does not match torus dimension {}",
                                 c0.dim(), torus.dim()));

  const double c_inf = c0.level();
  const double floor = positivity_floor(c0, config.guard);
  const double target = config.conv_tol * config.conv_tol;

  double h = config.h_max;
  if (config.h_init) {
    h = *config.h_init;
  } else {
    const double r0 = hs_norm(rhs(torus, c0));
    if (r0 > 0.0) h = std::clamp(1e-3 / r0, config.h_min, config.h_max);
  }

  FlowTrace trace{torus.params(), config,    c0,          c_inf, {},
                  {},             c0,        Termination::horizon, {}};
  FlowState current = make_state(torus, config.t0, c0, c_inf, 0.0);
  trace.samples.push_back({current.t, current.diag});
  if (config.keep_states) trace.states.push_back(current.c);

  for (;;) {
    if (current.diag.dist_flat < target) {
      trace.termination = Termination::converged;
      break;
    }
    if (current.t >= config.t_max) {
      trace.termination = Termination::horizon;
      break;
    }
    // Step doubling cannot see RK4 going unstable on the stiffest mode (both
    // estimates amplify it alike), so h is capped inside the stability interval.
    const double h_stab = stability_limit(torus, current.c);
    if (h_stab < config.h_min) {
      trace.termination = Termination::step_underflow;
      break;
    }
    const double h_want = std::min(h, h_stab);
    const double remaining = config.t_max - current.t;
    const bool clipped = h_want >= remaining;
    const double h_try = clipped ? remaining : h_want;

    Proposal p = propose(torus, current.c.matrix(), h_try, floor);
    if (!p.metric) {
      ++trace.rejected;
      h = 0.5 * h_try;
      if (h < config.h_min) {
        trace.termination = Termination::step_underflow;
        break;
      }
      continue;
    }

    const double err = p.error_estimate;
    const double factor =
        err > 0.0 ? std::clamp(0.9 * std::pow(config.atol / err, 0.2), 0.2, 5.0) : 5.0;

    if (err > config.atol) {
      ++trace.rejected;
      h = h_try * factor;
      if (h < config.h_min) {
        trace.termination = Termination::step_underflow;
        break;
      }
      continue;
    }

    // Accepted. A step clipped to land on t_max does not shrink the controller's h.
    const double t_next = clipped ? config.t_max : current.t + h_try;
    FlowState next = make_state(torus, t_next, std::move(*p.metric), c_inf, h_try);
    const DiagRecord& a = current.diag;
    const DiagRecord& b = next.diag;
    if (b.log_det_c < a.log_det_c - config.atol) ++trace.violations.log_det;
    if (b.entropy < a.entropy - config.atol) ++trace.violations.entropy;
    // ||dc|| <= atol moves ||c - c_inf||^2 by at most about 2 ||c - c_inf|| atol.
    const double dist_allow = config.atol * std::max(1.0, 2.0 * std::sqrt(a.dist_flat));
    if (b.dist_flat > a.dist_flat + dist_allow) ++trace.violations.dist_flat;

    ++trace.accepted;
    current = std::move(next);
    trace.samples.push_back({current.t, current.diag});
    if (config.keep_states) trace.states.push_back(current.c);
    if (!clipped) h = std::clamp(h_try * factor, config.h_min, config.h_max);
  }

  trace.final_metric = current.c;
  return trace;
}

// ---------------------------------------------------------------------------

double default_entropy_dt(const FuzzyTorus& torus, const Metric& rho) {
  return 0.1 * rho.lambda_min() / torus.laplacian_bound();
}

EntropyRate entropy_rate_check(const FuzzyTorus& torus, const Metric& rho,
                               std::optional<double> dt) {
  if (std::abs(rho.trace() - 1.0) > tol::fn)
    throw UsageError(
        fmt::format("entropy_rate_check: expected a density matrix, trace is {:.12g}", rho.trace()));
  const double step_dt = dt.value_or(default_entropy_dt(torus, rho));
  if (!(step_dt > 0.0)) throw UsageError("entropy_rate_check: dt must be positive");

  const HermMatrix l = centered_log(rho.matrix());
  const double analytic = trace(mul(l, torus.laplacian(l))).real();

  // One micro-step each way. Only the divergence part of S = log n - D moves,
  // and D is evaluated from (rho - s 1) + increment so the tiny changes near
  // flat are not rounded away by adding them to rho first.
  const double n = static_cast<double>(rho.dim());
  const double s = rho.level();
  const CMatrix dev = deviation(rho.matrix(), s);
  const auto divergence_after = [&](double h) {
    const HermMatrix inc = rk4_increment(torus, rho.matrix(), h);
    const double shift = trace(inc).real() / n;
    CMatrix d = dev + inc;
    d.add_identity(-shift);
    return divergence_from_deviation(d, s + shift);
  };
  const auto central = [&](double h) {
    return (divergence_after(-h) - divergence_after(h)) / (2.0 * h);
  };

  // Ridders' extrapolation: shrink the step geometrically, extrapolate each
  // row in h^2, and keep the entry whose own error estimate is smallest. A
  // fixed step is either truncation- or roundoff-limited somewhere in the
  // corpus; the tableau picks the balance per state.
  constexpr int ntab = 10;
  constexpr double con = 1.4, con2 = con * con, safe = 2.0;
  std::array<std::array<double, ntab>, ntab> a{};
  double h = step_dt;
  a[0][0] = central(h);
  double numeric = a[0][0];
  double err = std::numeric_limits<double>::infinity();
  for (int i = 1; i < ntab; ++i) {
    h /= con;
    a[0][i] = central(h);
    double fac = con2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= con2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        numeric = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= safe * err) break;
  }
  return {numeric, analytic, step_dt};
}

}  // namespace fuzzyflow
