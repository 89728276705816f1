#include <doctest.h>

#include <cmath>
#include <string>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/metric.hpp"
#include "oracle.hpp"

using namespace fuzzyflow;

TEST_SUITE("metric") {
  TEST_CASE("strict positivity is enforced with a message naming it") {
    CHECK_THROWS_AS(Metric(HermMatrix::diagonal(std::vector<double>{1.0, 0.0})), DomainError);
    CHECK_THROWS_AS(Metric(HermMatrix::diagonal(std::vector<double>{1.0, -2.0})), DomainError);
    CHECK_THROWS_AS(Metric(HermMatrix::diagonal(std::vector<double>{1.0, 1e-14})), DomainError);
    try {
      Metric(HermMatrix::diagonal(std::vector<double>{3.0, -2.0}));
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("strict positivity") != std::string::npos);
      CHECK(e.lambda_min() == -2.0);
    }
    const Metric c(HermMatrix::diagonal(std::vector<double>{1e-6, 4.0}));
    CHECK(c.lambda_min() == 1e-6);
    CHECK(c.level() == doctest::Approx((4.0 + 1e-6) / 2.0));
  }

  TEST_CASE("flat") {
    const Metric c = flat(5, 2.5);
    CHECK(c.matrix() == HermMatrix::identity(5, 2.5));
    CHECK(c.level() == 2.5);
    CHECK_THROWS_AS(flat(5, 0.0), UsageError);
    CHECK_THROWS_AS(flat(5, -1.0), UsageError);
  }

  TEST_CASE("cigar matches (M + x^2 + y^2)^-1") {
    const FuzzyTorus T({8, 3});
    const oracle::Torus O(8, 3);
    const Metric c = cigar(T, 0.7);
    const oracle::Mat ref = (0.7 * oracle::Mat::Identity(8, 8) + O.x * O.x + O.y * O.y).inverse();
    CHECK(oracle::hs(oracle::to_eigen(c.matrix()) - ref) < 1e-14);
    CHECK(c.lambda_min() > 0.0);
    CHECK_THROWS_AS(cigar(T, 0.0), UsageError);
  }

  TEST_CASE("random metrics are reproducible from the seed") {
    const Metric a = random_metric(6, 0.5, 42);
    const Metric b = random_metric(6, 0.5, 42);
    const Metric c = random_metric(6, 0.5, 43);
    CHECK(a.matrix() == b.matrix());
    CHECK(max_abs_diff(a.matrix(), c.matrix()) > 1e-3);
    CHECK(random_metric(6, 0.0, 42).matrix() == HermMatrix::identity(6));
    CHECK_THROWS_AS(random_metric(6, -1.0, 1), UsageError);
  }

  TEST_CASE("diagonal ladder") {
    const Metric c = diag_ladder(4);
    CHECK(c.lambda_min() == 1.0);
    CHECK(c.lambda_max() == 4.0);
    CHECK(c.trace() == 10.0);
  }

  TEST_CASE("density normalization") {
    const Metric c = diag_ladder(4);
    const Density d = normalize_density(c);
    CHECK(d.kappa == doctest::Approx(0.1));
    CHECK(d.rho.trace() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.rho.lambda_max() == doctest::Approx(0.4));
    CHECK(max_abs_diff(d.rho.matrix(), c.matrix() * d.kappa) == 0.0);
  }
}
