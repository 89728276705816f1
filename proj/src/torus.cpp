#include "fuzzyflow/torus.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/kernels.hpp"

namespace fuzzyflow {

namespace {

// exp(2 pi i k / n) with k reduced first so the phase argument stays small.
cplx root_of_unity(long long k, int n) {
  const long long r = ((k % n) + n) % n;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / n);
}

}  // namespace

void validate_params(const TorusParams& p) {
  if (p.n < 2) throw ParameterError(fmt::format("n must be at least 2 (got {})", p.n));
  if (p.m < 1 || p.m >= p.n)
    throw ParameterError(fmt::format("m must lie in [1, n-1] (got m = {}, n = {})", p.m, p.n));
  if (std::gcd(p.m, p.n) != 1)
    throw ParameterError(fmt::format("m and n must be coprime (gcd({}, {}) = {})", p.m, p.n,
                                     std::gcd(p.m, p.n)));
  if (p.x_choice == XChoice::custom && !p.custom_x)
    throw ParameterError("custom x choice requires a matrix");
}

namespace {

double spectral_width(const HermMatrix& a) {
  const EigDecomp e = eigh(a);
  return e.max() - e.min();
}

}  // namespace

FuzzyTorus::FuzzyTorus(TorusParams params) : params_(std::move(params)) {
  validate_params(params_);
  const int n = params_.n;
  const int m = params_.m;
  const auto dim = static_cast<std::size_t>(n);
  q_ = root_of_unity(m, n);

  u_ = CMatrix(dim);
  v_ = CMatrix(dim);
  f_ = CMatrix(dim);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    u_(j, j) = root_of_unity(static_cast<long long>(j) * m, n);
    v_(j, (j + 1) % n) = 1.0;
    for (int k = 0; k < n; ++k)
      f_(j, k) = root_of_unity(-static_cast<long long>(j) * k * m, n) * inv_sqrt_n;
  }

  switch (params_.x_choice) {
    case XChoice::standard:
    case XChoice::mod_n: {
      std::vector<double> d(dim);
      for (int j = 0; j < n; ++j) {
        const long long e = static_cast<long long>(j) * m;
        d[j] = static_cast<double>(params_.x_choice == XChoice::mod_n ? e % n : e);
      }
      x_ = HermMatrix::diagonal(d);
      break;
    }
    case XChoice::custom: {
      const HermMatrix& cx = *params_.custom_x;
      if (cx.dim() != dim)
        throw ValidationError(fmt::format("custom x has dimension {}, expected {}", cx.dim(), n));
      const double defect = hs_norm(exp_i(cx, 2.0 * std::numbers::pi / n) - u_);
      if (defect > tol::fn)
        throw ValidationError(fmt::format(
            "custom x does not satisfy exp(2 pi i x / n) = u (residual {:.3e})", defect));
      x_ = cx;
      break;
    }
  }
  y_ = HermMatrix::symmetrized(mul(adjoint(f_), mul(x_, f_)));

  const double wx = spectral_width(x_);
  const double wy = spectral_width(y_);
  laplacian_bound_ = wx * wx + wy * wy;
}

CMatrix FuzzyTorus::delta1(const CMatrix& a) const {
  if (a.dim() != dim()) throw UsageError("delta1: dimension mismatch");
  return commutator(y_, a);
}

CMatrix FuzzyTorus::delta2(const CMatrix& a) const {
  if (a.dim() != dim()) throw UsageError("delta2: dimension mismatch");
  return commutator(a, x_);
}

CMatrix FuzzyTorus::laplacian(const CMatrix& a) const {
  if (a.dim() != dim()) throw UsageError("laplacian: dimension mismatch");
  CMatrix out(dim());
  kernels::laplacian(dim(), x_.matrix().entries(), y_.matrix().entries(), a.entries(),
                     out.entries());
  return out;
}

HermMatrix FuzzyTorus::laplacian(const HermMatrix& a) const {
  return HermMatrix::symmetrized(laplacian(a.matrix()));
}

CMatrix FuzzyTorus::laplacian_superop() const {
  const std::size_t big = dim() * dim();
  CMatrix out(big);
  kernels::laplacian_superop(dim(), x_.matrix().entries(), y_.matrix().entries(), out.entries());
  return out;
}

std::vector<cplx> vec(const CMatrix& a) {
  return {a.entries().begin(), a.entries().end()};
}

CMatrix unvec(std::span<const cplx> v) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw UsageError("unvec: length is not a perfect square");
  return CMatrix(n, std::vector<cplx>(v.begin(), v.end()));
}

}  // namespace fuzzyflow
