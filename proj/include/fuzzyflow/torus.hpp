#pragma once

#include <optional>

#include "fuzzyflow/matcore.hpp"

namespace fuzzyflow {

/// How the position matrix x (with exp(2 pi i x / n) = u) is chosen.
enum class XChoice {
  standard,  // diag(0, m, 2m, ..., (n-1)m)
  mod_n,     // the standard entries reduced mod n
  custom,    // user-supplied Hermitian matrix
};

struct TorusParams {
  int n = 2;
  int m = 1;
  XChoice x_choice = XChoice::standard;
  std::optional<HermMatrix> custom_x;  // required iff x_choice == custom
};

/// Throws ParameterError when n < 2, m is outside [1, n-1], gcd(m, n) != 1,
/// or a custom x choice has no matrix.
void validate_params(const TorusParams& p);

/// The fuzzy torus: clock/shift generators with vu = q uv, q = exp(2 pi i m / n),
/// the Fourier matrix F (v = F* u F), position matrices x and y = F* x F, and the
/// derivations delta1 = [y, .], delta2 = -[x, .].
class FuzzyTorus {
 public:
  /// Throws ParameterError when n < 2, m is outside [1, n-1] or gcd(m, n) != 1,
  /// and ValidationError when a custom x fails exp(2 pi i x / n) = u.
  explicit FuzzyTorus(TorusParams params);

  const TorusParams& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(params_.n); }
  cplx q() const noexcept { return q_; }
  const CMatrix& u() const noexcept { return u_; }
  const CMatrix& v() const noexcept { return v_; }
  const CMatrix& fourier() const noexcept { return f_; }
  const HermMatrix& x() const noexcept { return x_; }
  const HermMatrix& y() const noexcept { return y_; }

  CMatrix delta1(const CMatrix& a) const;
  CMatrix delta2(const CMatrix& a) const;
  CMatrix laplacian(const CMatrix& a) const;
  /// The Laplacian maps Hermitian matrices to Hermitian matrices.
  HermMatrix laplacian(const HermMatrix& a) const;

  /// Dense n^2 x n^2 matrix of the Laplacian in the e_{jk} basis (row-major vec).
  CMatrix laplacian_superop() const;

  /// Upper bound on the Laplacian's largest eigenvalue: the squared spectral
  /// widths of x and y added together.
  double laplacian_bound() const noexcept { return laplacian_bound_; }

 private:
  TorusParams params_;
  cplx q_;
  CMatrix u_, v_, f_;
  HermMatrix x_, y_;
  double laplacian_bound_ = 0.0;
};

/// Row-major vectorisation used by laplacian_superop.
std::vector<cplx> vec(const CMatrix& a);
CMatrix unvec(std::span<const cplx> v);

}  // namespace fuzzyflow
