#pragma once

// Dense complex matrices and the Hermitian functional calculus.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fuzzyflow {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double eig = 1e-12;   // Jacobi convergence / eigh residual bound
inline constexpr double herm = 1e-10;  // relative Hermiticity defect accepted on input
inline constexpr double pos = 1e-13;   // relative strict-positivity floor
inline constexpr double dk = 1e-8;     // coincident-eigenvalue branch in Daleckii-Krein
inline constexpr double fn = 1e-10;    // functional-calculus tolerance
inline constexpr int max_sweeps = 64;
}  // namespace tol

/// Square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), data_(n * n) {}
  CMatrix(std::size_t n, std::vector<cplx> entries);

  static CMatrix identity(std::size_t n, cplx alpha = 1.0);
  /// e_{jk} with zero-based indices.
  static CMatrix unit(std::size_t n, std::size_t j, std::size_t k);
  static CMatrix diagonal(std::span<const double> d);
  static CMatrix diagonal(std::span<const cplx> d);

  std::size_t dim() const noexcept { return n_; }
  cplx& operator()(std::size_t j, std::size_t k) { return data_[j * n_ + k]; }
  const cplx& operator()(std::size_t j, std::size_t k) const { return data_[j * n_ + k]; }
  std::span<cplx> entries() noexcept { return data_; }
  std::span<const cplx> entries() const noexcept { return data_; }

  CMatrix& operator+=(const CMatrix& b);
  CMatrix& operator-=(const CMatrix& b);
  CMatrix& operator*=(cplx s);
  /// Adds s to every diagonal entry.
  CMatrix& add_identity(cplx s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

/// Complex Hermitian matrix. Construction symmetrizes with (a + a*)/2 after
/// checking that the input defect is within tol::herm (relative).
class HermMatrix {
 public:
  HermMatrix() = default;
  explicit HermMatrix(const CMatrix& a);

  /// Symmetrizes without validating; for results that are Hermitian in exact arithmetic.
  static HermMatrix symmetrized(const CMatrix& a);
  static HermMatrix identity(std::size_t n, double alpha = 1.0);
  static HermMatrix diagonal(std::span<const double> d);

  std::size_t dim() const noexcept { return a_.dim(); }
  const CMatrix& matrix() const noexcept { return a_; }
  operator const CMatrix&() const noexcept { return a_; }
  const cplx& operator()(std::size_t j, std::size_t k) const { return a_(j, k); }

  HermMatrix& operator+=(const HermMatrix& b);
  HermMatrix& operator-=(const HermMatrix& b);
  HermMatrix& operator*=(double s);
  friend HermMatrix operator+(HermMatrix a, const HermMatrix& b) { return a += b; }
  friend HermMatrix operator-(HermMatrix a, const HermMatrix& b) { return a -= b; }
  friend HermMatrix operator*(HermMatrix a, double s) { return a *= s; }
  friend HermMatrix operator*(double s, HermMatrix a) { return a *= s; }
  friend bool operator==(const HermMatrix&, const HermMatrix&) = default;

 private:
  CMatrix a_;
};

/// Eigenvalues ascending; eigenvectors are the columns of a unitary matrix.
struct EigDecomp {
  std::vector<double> values;
  CMatrix vectors;

  double min() const { return values.front(); }
  double max() const { return values.back(); }
};

CMatrix mul(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
cplx trace(const CMatrix& a);
/// <a, b> = tr(a* b).
cplx hs_inner(const CMatrix& a, const CMatrix& b);
double hs_norm(const CMatrix& a);
/// [a, b] = ab - ba.
CMatrix commutator(const CMatrix& a, const CMatrix& b);
double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// max_{jk} |a_jk - conj(a_kj)|.
double hermiticity_defect(const CMatrix& a);

/// Cyclic complex Jacobi. Throws NumericalError if the off-diagonal mass is
/// still above tol::eig * ||a||_2 after tol::max_sweeps sweeps.
EigDecomp eigh(const HermMatrix& a);

/// U diag(f(lambda)) U*, re-Hermitized.
HermMatrix apply_fn(const EigDecomp& eig, const std::function<double(double)>& f);
HermMatrix mat_fn(const HermMatrix& a, const std::function<double(double)>& f);
HermMatrix mat_exp(const HermMatrix& a);
HermMatrix mat_log(const HermMatrix& a);
HermMatrix mat_inv(const HermMatrix& a);
HermMatrix mat_log(const EigDecomp& eig);
HermMatrix mat_inv(const EigDecomp& eig);
/// exp(i * theta * a), a unitary matrix.
CMatrix exp_i(const HermMatrix& a, double theta);

/// Throws DomainError unless lambda_min > tol::pos * max(1, lambda_max).
void require_positive(const EigDecomp& eig, const char* op);

/// Derivative of log at c in direction h (Daleckii-Krein divided differences).
HermMatrix frechet_log(const HermMatrix& c, const HermMatrix& h);
HermMatrix frechet_log(const EigDecomp& c, const HermMatrix& h);

/// Sum of log eigenvalues.
double log_det(const HermMatrix& c);
double log_det(const EigDecomp& c);

}  // namespace fuzzyflow
