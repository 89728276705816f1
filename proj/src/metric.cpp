#include "fuzzyflow/metric.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"

namespace fuzzyflow {

Metric::Metric(HermMatrix c) : Metric(c, eigh(c)) {}

Metric::Metric(HermMatrix c, EigDecomp eig) : c_(std::move(c)), eig_(std::move(eig)) {
  if (c_.dim() == 0) throw UsageError("metric: empty matrix");
  const double lo = eig_.min();
  const double hi = eig_.max();
  if (!(lo > tol::pos * std::max(1.0, hi)))
    throw DomainError(
        fmt::format("metric violates strict positivity: lambda_min = {:.6e}, lambda_max = {:.6e}",
                    lo, hi),
        lo);
}

double Metric::trace() const { return fuzzyflow::trace(c_).real(); }

Metric flat(std::size_t n, double alpha) {
  if (!(alpha > 0.0)) throw UsageError(fmt::format("flat: alpha must be positive (got {})", alpha));
  std::vector<double> d(n, alpha);
  EigDecomp eig{d, CMatrix::identity(n)};
  return Metric(HermMatrix::identity(n, alpha), std::move(eig));
}

Metric cigar(const FuzzyTorus& torus, double mass) {
  if (!(mass > 0.0)) throw UsageError(fmt::format("cigar: mass must be positive (got {})", mass));
  const HermMatrix& x = torus.x();
  const HermMatrix& y = torus.y();
  CMatrix a = mul(x, x) + mul(y, y);
  a.add_identity(mass);
  return Metric(mat_inv(HermMatrix::symmetrized(a)));
}

Metric random_metric(std::size_t n, double spread, std::uint64_t seed) {
  if (spread < 0.0) throw UsageError("random_metric: spread must be non-negative");
  if (spread == 0.0) return flat(n, 1.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  CMatrix g(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) {
        g(j, k) = normal(rng);
      } else {
        const double re = normal(rng);
        const double im = normal(rng);
        g(j, k) = cplx{re, im};
      }
    }
  }
  return Metric(mat_exp(HermMatrix::symmetrized(g)));
}

Metric diag_ladder(std::size_t n) {
  std::vector<double> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = static_cast<double>(j + 1);
  return Metric(HermMatrix::diagonal(d), EigDecomp{d, CMatrix::identity(n)});
}

Density normalize_density(const Metric& c) {
  const double kappa = 1.0 / c.trace();
  EigDecomp eig = c.eig();
  for (double& lam : eig.values) lam *= kappa;
  return {Metric(c.matrix() * kappa, std::move(eig)), kappa};
}

}  // namespace fuzzyflow
