#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/torus.hpp"
#include "fuzzyflow/verify.hpp"
#include "oracle.hpp"

using namespace fuzzyflow;

TEST_SUITE("torus") {
  TEST_CASE("parameter gates") {
    CHECK_THROWS_AS(FuzzyTorus({1, 1}), ParameterError);
    CHECK_THROWS_AS(FuzzyTorus({4, 0}), ParameterError);
    CHECK_THROWS_AS(FuzzyTorus({4, 4}), ParameterError);
    CHECK_THROWS_AS(FuzzyTorus({6, 4}), ParameterError);
    CHECK_THROWS_AS(validate_params({5, 2, XChoice::custom, std::nullopt}), ParameterError);
    CHECK_NOTHROW(FuzzyTorus({6, 5}));
    try {
      FuzzyTorus({6, 4});
    } catch (const ParameterError& e) {
      CHECK(std::string(e.what()).find("coprime") != std::string::npos);
    }
  }

  TEST_CASE("n = 2 by hand") {
    const FuzzyTorus T({2, 1});
    CHECK(std::abs(T.q() - cplx{-1.0, 0.0}) < 1e-15);
    CHECK(max_abs_diff(T.u(), CMatrix::diagonal(std::vector<double>{1.0, -1.0})) < 1e-15);
    CMatrix v(2);
    v(0, 1) = 1.0;
    v(1, 0) = 1.0;
    CHECK(max_abs_diff(T.v(), v) < 1e-15);
    CMatrix y(2);
    y(0, 0) = y(1, 1) = 0.5;
    y(0, 1) = y(1, 0) = -0.5;
    CHECK(max_abs_diff(T.y(), y) < 1e-15);
  }

  TEST_CASE("generators and derivations match the oracle") {
    verify::Rng rng(21);
    for (auto [n, m] : {std::pair{5, 2}, {8, 3}, {13, 5}}) {
      for (bool mod_n : {false, true}) {
        const FuzzyTorus T({n, m, mod_n ? XChoice::mod_n : XChoice::standard, std::nullopt});
        const oracle::Torus O(n, m, mod_n);
        CHECK(oracle::hs(oracle::to_eigen(T.x()) - O.x) == 0.0);
        CHECK(oracle::hs(oracle::to_eigen(T.y()) - O.y) < 1e-12 * n * n);
        CHECK(oracle::hs(oracle::to_eigen(T.u()) - O.u) < 1e-13);
        CHECK(oracle::hs(oracle::to_eigen(T.v()) - O.v) == 0.0);
        const CMatrix a = verify::random_matrix(static_cast<std::size_t>(n), rng);
        const oracle::Mat ae = oracle::to_eigen(a);
        CHECK(oracle::hs(oracle::to_eigen(T.delta1(a)) - O.comm(O.y, ae)) < 1e-12 * n);
        CHECK(oracle::hs(oracle::to_eigen(T.delta2(a)) + O.comm(O.x, ae)) < 1e-12 * n);
        CHECK(oracle::hs(oracle::to_eigen(T.laplacian(a)) - O.laplacian(ae)) < 1e-11 * n * n);
      }
    }
  }

  TEST_CASE("custom x: accepted when it exponentiates to u, rejected otherwise") {
    const FuzzyTorus standard({7, 3});
    const FuzzyTorus custom({7, 3, XChoice::custom, standard.x()});
    CHECK(max_abs_diff(custom.y(), standard.y()) < 1e-13);

    std::vector<double> shifted(7);
    for (std::size_t j = 0; j < 7; ++j) shifted[j] = standard.x()(j, j).real() + 7.0 * (j % 2);
    CHECK_NOTHROW(FuzzyTorus({7, 3, XChoice::custom, HermMatrix::diagonal(shifted)}));

    shifted[2] += 0.5;
    CHECK_THROWS_AS(FuzzyTorus({7, 3, XChoice::custom, HermMatrix::diagonal(shifted)}),
                    ValidationError);
    CHECK_THROWS_AS(FuzzyTorus({7, 3, XChoice::custom, HermMatrix::identity(5)}), ValidationError);
  }

  TEST_CASE("laplacian bound dominates the superoperator spectrum") {
    for (auto [n, m] : {std::pair{4, 1}, {7, 2}, {9, 4}}) {
      const FuzzyTorus T({n, m});
      Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::to_eigen(T.laplacian_superop()));
      const double top = es.eigenvalues().maxCoeff();
      CHECK(top <= T.laplacian_bound() * (1.0 + 1e-12));
      CHECK(std::abs(es.eigenvalues().minCoeff()) < 1e-10 * top);
    }
  }

  TEST_CASE("vec and unvec are inverse") {
    verify::Rng rng(4);
    const CMatrix a = verify::random_matrix(6, rng);
    CHECK(unvec(vec(a)) == a);
    CHECK(vec(a)[1 * 6 + 4] == a(1, 4));
    std::vector<cplx> bad(10);
    CHECK_THROWS_AS(unvec(bad), UsageError);
  }
}
