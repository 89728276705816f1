#include <doctest.h>

#include <cmath>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/flow.hpp"
#include "fuzzyflow/verify.hpp"
#include "oracle.hpp"

using namespace fuzzyflow;

TEST_SUITE("flow") {
  TEST_CASE("rhs vanishes on flat metrics and is trace free") {
    const FuzzyTorus T({7, 2});
    CHECK(hs_norm(rhs(T, flat(7, 3.0))) == 0.0);
    const Metric c = cigar(T, 0.5);
    const HermMatrix r = rhs(T, c);
    CHECK(std::abs(trace(r)) < 1e-12 * hs_norm(r));
  }

  TEST_CASE("rhs matches -Laplacian(log c) from the oracle") {
    const FuzzyTorus T({8, 3});
    const oracle::Torus O(8, 3);
    const Metric c = random_metric(8, 0.7, 3);
    const oracle::Mat ref = -O.laplacian(oracle::logm(oracle::to_eigen(c.matrix())));
    CHECK(oracle::hs(oracle::to_eigen(rhs(T, c)) - ref) < 1e-11 * oracle::hs(ref));
  }

  TEST_CASE("rhs is invariant under scaling the metric") {
    const FuzzyTorus T({6, 1});
    const Metric c = random_metric(6, 1.0, 8);
    const HermMatrix a = rhs(T, c);
    const HermMatrix b = rhs(T, Metric(c.matrix() * 1e-4));
    CHECK(max_abs_diff(a, b) < 1e-12 * max_abs(a));
  }

  TEST_CASE("centered log differs from log by log of the level") {
    const Metric c = random_metric(5, 0.8, 2);
    const HermMatrix l = centered_log(c.matrix());
    CMatrix shifted = mat_log(c.matrix()).matrix();
    shifted.add_identity(-std::log(c.level()));
    CHECK(max_abs_diff(l, shifted) < 1e-13);
    CHECK_THROWS_AS(centered_log(HermMatrix::identity(3, -1.0)), DomainError);
  }

  TEST_CASE("scalar curvature against the oracle, and the rates it controls") {
    const FuzzyTorus T({7, 3});
    const oracle::Torus O(7, 3);
    const Metric c = cigar(T, 1.0);
    const oracle::Mat ce = oracle::to_eigen(c.matrix());
    const oracle::Mat ref = oracle::frechet_log(ce, O.laplacian(oracle::logm(ce)));
    const HermMatrix r = scalar_curvature(T, c);
    CHECK(oracle::hs(oracle::to_eigen(r) - ref) < 1e-10 * oracle::hs(ref));
    CHECK(std::abs(hs_inner(c.matrix(), r)) < 1e-10 * hs_norm(c.matrix()) * hs_norm(r));
    const double rate = log_det_rate(T, c);
    CHECK(rate > 0.0);
    CHECK(rate == doctest::Approx(hs_inner(mat_inv(c.matrix()), rhs(T, c)).real()).epsilon(1e-10));
  }

  TEST_CASE("entropy and divergence") {
    CHECK(entropy(flat(9, 0.3)) == doctest::Approx(std::log(9.0)).epsilon(1e-15));
    CHECK(flat_divergence(flat(9, 0.3)) == 0.0);
    const Metric c = diag_ladder(4);
    double s = 0.0;
    for (double p : {0.1, 0.2, 0.3, 0.4}) s -= p * std::log(p);
    CHECK(entropy(c) == doctest::Approx(s).epsilon(1e-14));
    CHECK(flat_divergence(c) == doctest::Approx(std::log(4.0) - s).epsilon(1e-13));
    const Metric near(HermMatrix::diagonal(std::vector<double>{1.0 + 1e-9, 1.0 - 1e-9}));
    CHECK(flat_divergence(near) == doctest::Approx(1e-18).epsilon(1e-6));
    CHECK(dist_flat(c, 2.5) == doctest::Approx(5.0));
  }

  TEST_CASE("config validation and level scaling") {
    FlowConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.t_max = cfg.t0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = FlowConfig{};
    cfg.atol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = FlowConfig{};
    cfg.h_init = 1e-14;
    CHECK_THROWS_AS(cfg.validate(), UsageError);

    const FlowConfig big = FlowConfig::for_metric(flat(3, 50.0));
    CHECK(big.t_max == 5e4);
    CHECK(big.h_max == 50.0);
    CHECK(big.h_min == FlowConfig{}.h_min);
    const FlowConfig small = FlowConfig::for_metric(Metric(HermMatrix::diagonal(std::vector<double>{1e-3, 0.5})));
    CHECK(small.t_max == FlowConfig{}.t_max);
    CHECK(small.h_min == doctest::Approx(1e-15));
  }

  TEST_CASE("positivity floor") {
    CHECK(positivity_floor(diag_ladder(4), 1e-6) == doctest::Approx(2.5e-6));
    const Metric thin(HermMatrix::diagonal(std::vector<double>{1e-9, 2.0}));
    CHECK(positivity_floor(thin, 1e-6) == doctest::Approx(1e-15));
  }

  TEST_CASE("the stability cap keeps RK4 inside its stability interval") {
    const FuzzyTorus T({13, 5});
    const Metric c = cigar(T, 1.0);
    const double h = stability_limit(T, c);
    CHECK(h == doctest::Approx(2.5 * c.lambda_min() / T.laplacian_bound()));
    // Well beyond the cap a step leaves the positive cone, at a stage or at the end.
    bool left_cone = false;
    try {
      left_cone = eigh(rk4_step(T, c.matrix(), 20.0 * h)).min() <= 0.0;
    } catch (const DomainError&) {
      left_cone = true;
    }
    CHECK(left_cone);
    CHECK(eigh(rk4_step(T, c.matrix(), h)).min() > 0.0);
    const HermMatrix inc = rk4_increment(T, c.matrix(), h);
    CHECK(max_abs_diff(c.matrix() + inc, rk4_step(T, c.matrix(), h)) < 1e-15);
  }

  TEST_CASE("step rejects non-positive sizes and steps below the floor") {
    const FuzzyTorus T({5, 2});
    const Metric c = cigar(T, 1.0);
    const FlowState s = make_state(T, 0.0, c, c.level(), 0.0);
    CHECK_THROWS_AS(step(T, s, 0.0, 0.0), UsageError);
    const StepResult ok = step(T, s, 1e-4, 0.0);
    REQUIRE(ok.state);
    CHECK(ok.state->t == 1e-4);
    CHECK(ok.error_estimate >= 0.0);
    const StepResult refused = step(T, s, 1e-4, 10.0 * c.lambda_max());
    CHECK_FALSE(refused.state);
  }

  TEST_CASE("a flat start converges immediately") {
    const FuzzyTorus T({4, 1});
    const FlowTrace tr = integrate(T, flat(4, 2.0), FlowConfig{});
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.samples.size() <= 2);
    CHECK(tr.c_infinity == 2.0);
  }

  TEST_CASE("a cigar relaxes monotonically to its flat limit") {
    const FuzzyTorus T({8, 1});
    const Metric c0 = cigar(T, 1.0);
    const FlowTrace tr = integrate(T, c0, FlowConfig::for_metric(c0));
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.violations.total() == 0);
    CHECK(tr.c_infinity == doctest::Approx(c0.level()).epsilon(1e-15));
    CHECK(max_abs_diff(tr.final_metric.matrix(), HermMatrix::identity(8, tr.c_infinity)) < 1e-8);
    for (std::size_t i = 1; i < tr.samples.size(); ++i)
      CHECK(tr.samples[i].diag.trace_c == doctest::Approx(tr.samples[0].diag.trace_c).epsilon(1e-12));
  }

  TEST_CASE("horizon and step underflow terminations") {
    const FuzzyTorus T({5, 2});
    const Metric c0 = cigar(T, 0.5);
    FlowConfig cfg;
    cfg.t_max = 1e-3;
    const FlowTrace short_run = integrate(T, c0, cfg);
    CHECK(short_run.termination == Termination::horizon);
    CHECK(short_run.samples.back().t == cfg.t_max);

    cfg = FlowConfig{};
    cfg.h_init = 1.0;
    cfg.h_min = 0.5;
    const FlowTrace under = integrate(T, c0, cfg);
    CHECK(under.termination == Termination::step_underflow);
  }

  TEST_CASE("entropy rate check") {
    const FuzzyTorus T({6, 1});
    const Metric c = random_metric(6, 0.5, 4);
    CHECK_THROWS_AS(entropy_rate_check(T, c), UsageError);
    const Density d = normalize_density(c);
    const EntropyRate er = entropy_rate_check(T, d.rho);
    CHECK(er.analytic > 0.0);
    CHECK(er.dt == doctest::Approx(default_entropy_dt(T, d.rho)));
    CHECK(std::abs(er.numeric - er.analytic) <= 1e-4 * er.analytic);
  }
}
