#pragma once

#include <cstdint>

#include "fuzzyflow/matcore.hpp"
#include "fuzzyflow/torus.hpp"

namespace fuzzyflow {

/// A noncommutative metric: a strictly positive Hermitian matrix, with its
/// eigendecomposition cached at construction.
class Metric {
 public:
  /// Throws DomainError naming strict positivity when
  /// lambda_min <= tol::pos * max(1, lambda_max).
  explicit Metric(HermMatrix c);
  Metric(HermMatrix c, EigDecomp eig);

  const HermMatrix& matrix() const noexcept { return c_; }
  const EigDecomp& eig() const noexcept { return eig_; }
  std::size_t dim() const noexcept { return c_.dim(); }
  double lambda_min() const { return eig_.min(); }
  double lambda_max() const { return eig_.max(); }
  double trace() const;
  /// Level of the flat limit, tr(c) / n.
  double level() const { return trace() / static_cast<double>(dim()); }

 private:
  HermMatrix c_;
  EigDecomp eig_;
};

/// alpha * 1. Throws UsageError unless alpha > 0.
Metric flat(std::size_t n, double alpha);

/// The cigar analogue (M + x^2 + y^2)^{-1}. Throws UsageError unless M > 0.
Metric cigar(const FuzzyTorus& torus, double mass);

/// exp(h) for a Gaussian Hermitian h with entry standard deviation `spread`;
/// reproducible from the seed.
Metric random_metric(std::size_t n, double spread, std::uint64_t seed);

/// diag(1, 2, ..., n).
Metric diag_ladder(std::size_t n);

struct Density {
  Metric rho;
  double kappa;  // rho = kappa * c, so flow time rescales as t' = kappa t
};

Density normalize_density(const Metric& c);

}  // namespace fuzzyflow
