#pragma once

// Noncommutative Ricci flow dc/dt = -Laplacian(log c): right-hand side,
// adaptive RK4 integration with step-doubling error control, scalar
// curvature, entropy, and the monotonicity bookkeeping along a trajectory.

#include <optional>
#include <string_view>
#include <vector>

#include "fuzzyflow/metric.hpp"
#include "fuzzyflow/torus.hpp"

namespace fuzzyflow {

namespace tol {
inline constexpr double curv = 1e-8;  // scalar-curvature identities
}

struct FlowConfig {
  double t0 = 0.0;
  double t_max = 1e3;
  /// Unset means 1e-3 / ||rhs(c0)||_2, clamped to [h_min, h_max].
  std::optional<double> h_init;
  double atol = 1e-9;
  double h_min = 1e-12;
  double h_max = 1.0;
  double conv_tol = 1e-8;
  double guard = 1e-6;
  /// Keep every accepted metric in the trace, not just its diagnostics.
  bool keep_states = false;

  /// Throws UsageError on t_max <= t0, h_min > h_init > h_max or a
  /// non-positive tolerance.
  void validate() const;

  /// Defaults with the horizon and the largest step multiplied by
  /// max(1, level) and the smallest step by min(1, lambda_min). The flow is
  /// covariant under c -> k c, t -> k t, so a metric at level c_inf relaxes
  /// on a time scale proportional to c_inf, and its stiffest mode on one
  /// proportional to lambda_min.
  static FlowConfig for_metric(const Metric& c0);
};

struct DiagRecord {
  double trace_c = 0.0;
  double log_det_c = 0.0;
  double entropy = 0.0;
  double dist_flat = 0.0;       // ||c - c_inf||_2^2
  double curvature_norm = 0.0;  // ||R||_2
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double step_used = 0.0;
  double curvature_weight = 0.0;  // tr(c R); zero in exact arithmetic
};

struct FlowState {
  double t;
  Metric c;
  HermMatrix curvature;
  DiagRecord diag;
};

enum class Termination { converged, horizon, step_underflow };
std::string_view to_string(Termination t);

struct Violations {
  int log_det = 0;
  int entropy = 0;
  int dist_flat = 0;
  int total() const { return log_det + entropy + dist_flat; }
};

struct FlowSample {
  double t;
  DiagRecord diag;
};

struct FlowTrace {
  TorusParams params;
  FlowConfig config;
  Metric initial;
  double c_infinity;
  std::vector<FlowSample> samples;  // initial state first, then every accepted step
  std::vector<Metric> states;       // parallel to samples when config.keep_states
  Metric final_metric;
  Termination termination;
  Violations violations;
  int accepted = 0;
  int rejected = 0;
};

/// -Laplacian(log c). Throws DomainError unless c is strictly positive.
HermMatrix rhs(const FuzzyTorus& torus, const HermMatrix& c);
HermMatrix rhs(const FuzzyTorus& torus, const Metric& c);

/// log(c / s) with s = tr(c) / n, from the eigendecomposition of c - s 1.
/// Differs from log c by the scalar log(s), which the Laplacian annihilates,
/// and keeps full relative precision when c is close to flat.
HermMatrix centered_log(const HermMatrix& c);

/// One classical RK4 step of size h (no error control).
HermMatrix rk4_step(const FuzzyTorus& torus, const HermMatrix& c, double h);
/// rk4_step(c, h) - c, without the rounding of adding it to c.
HermMatrix rk4_increment(const FuzzyTorus& torus, const HermMatrix& c, double h);

struct StepResult {
  std::optional<FlowState> state;  // empty when the positivity guard rejected the step
  double error_estimate = 0.0;
};

/// RK4 step with step doubling: advances by two half steps and estimates the
/// error as ||c_full - c_half||_2 / 15. The step is rejected when the result
/// has lambda_min <= positivity_floor (or a stage leaves the positive cone).
StepResult step(const FuzzyTorus& torus, const FlowState& state, double h,
                double positivity_floor);

/// Full state (curvature, diagnostics) for a metric at time t.
FlowState make_state(const FuzzyTorus& torus, double t, Metric c, double c_infinity,
                     double step_used);

/// Largest RK4 step that is linearly stable at c. The Jacobian of the right-hand
/// side is Laplacian o Dlog(c), whose eigenvalues are real and lie in
/// [0, laplacian_bound / lambda_min(c)]; RK4 is stable on the negative real
/// axis up to about 2.78, and 2.5 leaves some margin.
double stability_limit(const FuzzyTorus& torus, const Metric& c);

/// Smallest eigenvalue a step may produce: guard * c_inf, lowered to
/// guard * lambda_min(c0) when c0 itself already sits below that.
double positivity_floor(const Metric& c0, double guard);

FlowTrace integrate(const FuzzyTorus& torus, const Metric& c0, const FlowConfig& config);

/// R = -d/dt log c = Dlog(c)[Laplacian(log c)] at the current state.
HermMatrix scalar_curvature(const FuzzyTorus& torus, const Metric& c);

/// -sum p log p over the eigenvalues p of c / tr(c).
double entropy(const Metric& c);

/// log n - entropy(c): relative entropy of c / tr(c) to the flat density,
/// computed directly so it stays accurate when c is nearly flat.
double flat_divergence(const Metric& c);

/// ||c - level * 1||_2^2.
double dist_flat(const Metric& c, double level);

/// tr(c^{-1} dc/dt), the analytic rate of log det c.
double log_det_rate(const FuzzyTorus& torus, const Metric& c);

struct EntropyRate {
  double numeric;   // Ridders-extrapolated central differences of S over RK4 micro-steps
  double analytic;  // tr(l Laplacian(l)), l = log rho
  double dt;        // largest micro-step in the tableau
};

/// Default largest micro-step: 0.1 * lambda_min(rho) / laplacian_bound, a
/// fixed fraction of the fastest relaxation time at rho. Much larger and the
/// backward step can leave the positive cone.
double default_entropy_dt(const FuzzyTorus& torus, const Metric& rho);

/// Requires tr(rho) = 1 within tol::fn (UsageError otherwise).
EntropyRate entropy_rate_check(const FuzzyTorus& torus, const Metric& rho,
                               std::optional<double> dt = std::nullopt);

}  // namespace fuzzyflow
