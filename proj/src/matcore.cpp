#include "fuzzyflow/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/kernels.hpp"

namespace fuzzyflow {

namespace {

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.dim() != b.dim())
    throw UsageError(fmt::format("{}: dimension mismatch ({} vs {})", op, a.dim(), b.dim()));
}

}  // namespace

// ---------------------------------------------------------------------------
// CMatrix

CMatrix::CMatrix(std::size_t n, std::vector<cplx> entries) : n_(n), data_(std::move(entries)) {
  if (data_.size() != n * n)
    throw UsageError(fmt::format("CMatrix: expected {} entries, got {}", n * n, data_.size()));
}

CMatrix CMatrix::identity(std::size_t n, cplx alpha) {
  CMatrix a(n);
  for (std::size_t j = 0; j < n; ++j) a(j, j) = alpha;
  return a;
}

CMatrix CMatrix::unit(std::size_t n, std::size_t j, std::size_t k) {
  CMatrix a(n);
  a(j, k) = 1.0;
  return a;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix a(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) a(j, j) = d[j];
  return a;
}

CMatrix CMatrix::diagonal(std::span<const cplx> d) {
  CMatrix a(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) a(j, j) = d[j];
  return a;
}

CMatrix& CMatrix::operator+=(const CMatrix& b) {
  require_same_dim(*this, b, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += b.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& b) {
  require_same_dim(*this, b, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= b.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix& CMatrix::add_identity(cplx s) {
  for (std::size_t j = 0; j < n_; ++j) (*this)(j, j) += s;
  return *this;
}

// ---------------------------------------------------------------------------
// HermMatrix

HermMatrix::HermMatrix(const CMatrix& a) {
  const double defect = hermiticity_defect(a);
  const double scale = max_abs(a);
  if (defect > tol::herm * scale)
    throw ValidationError(
        fmt::format("matrix is not Hermitian: defect {:.3e} exceeds {:.1e} relative", defect,
                    tol::herm));
  *this = symmetrized(a);
}

HermMatrix HermMatrix::symmetrized(const CMatrix& a) {
  const std::size_t n = a.dim();
  HermMatrix h;
  h.a_ = CMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    h.a_(j, j) = a(j, j).real();
    for (std::size_t k = j + 1; k < n; ++k) {
      const cplx z = 0.5 * (a(j, k) + std::conj(a(k, j)));
      h.a_(j, k) = z;
      h.a_(k, j) = std::conj(z);
    }
  }
  return h;
}

HermMatrix HermMatrix::identity(std::size_t n, double alpha) {
  return symmetrized(CMatrix::identity(n, alpha));
}

HermMatrix HermMatrix::diagonal(std::span<const double> d) {
  return symmetrized(CMatrix::diagonal(d));
}

HermMatrix& HermMatrix::operator+=(const HermMatrix& b) {
  a_ += b.a_;
  return *this;
}

HermMatrix& HermMatrix::operator-=(const HermMatrix& b) {
  a_ -= b.a_;
  return *this;
}

HermMatrix& HermMatrix::operator*=(double s) {
  a_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Arithmetic and trace forms

CMatrix mul(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "mul");
  CMatrix out(a.dim());
  kernels::gemm(a.dim(), a.entries(), b.entries(), out.entries());
  return out;
}

CMatrix adjoint(const CMatrix& a) {
  const std::size_t n = a.dim();
  CMatrix out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) out(k, j) = std::conj(a(j, k));
  return out;
}

cplx trace(const CMatrix& a) {
  cplx s{};
  for (std::size_t j = 0; j < a.dim(); ++j) s += a(j, j);
  return s;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "hs_inner");
  // tr(a* b) = sum_{jk} conj(a_jk) b_jk
  cplx s{};
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) s += std::conj(ea[i]) * eb[i];
  return s;
}

double hs_norm(const CMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  return mul(a, b) - mul(b, a);
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
  return m;
}

double hermiticity_defect(const CMatrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (std::size_t k = j; k < a.dim(); ++k)
      m = std::max(m, std::abs(a(j, k) - std::conj(a(k, j))));
  return m;
}

// ---------------------------------------------------------------------------
// Eigendecomposition

EigDecomp eigh(const HermMatrix& h) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t n = h.dim();
  CMatrix a = h.matrix();
  CMatrix v = CMatrix::identity(n);
  const double norm = hs_norm(a);
  const double floor = eps * eps * norm;

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * std::norm(a(p, q));
    return std::sqrt(s);
  };

  // Sweep until a full pass finds nothing left to rotate; the tol::eig bound
  // is the failure criterion, not the stopping rule.
  bool rotated = norm > 0.0;
  int sweep = 0;
  for (; rotated && sweep < tol::max_sweeps; ++sweep) {
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (g <= floor) continue;
        if (std::abs(app) + 100.0 * g == std::abs(app) &&
            std::abs(aqq) + 100.0 * g == std::abs(aqq))
          continue;
        rotated = true;

        const cplx e = apq / g;
        const cplx ec = std::conj(e);
        const double theta = (aqq - app) / (2.0 * g);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // a <- a V, v <- v V with V_pp = c, V_pq = s, V_qp = -s conj(e), V_qq = c conj(e)
        const cplx sec = s * ec, cec = c * ec, se = s * e, ce = c * e;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sec * akq;
          a(k, q) = s * akp + cec * akq;
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sec * vkq;
          v(k, q) = s * vkp + cec * vkq;
        }
        // a <- V* a
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - se * aqk;
          a(q, k) = s * apk + ce * aqk;
        }
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  const double off = off_mass();
  if (off > tol::eig * norm)
    throw NumericalError(fmt::format("eigh: no convergence after {} sweeps (off-diagonal {:.3e})",
                                     sweep, off),
                         off);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigDecomp out;
  out.values.resize(n);
  out.vectors = CMatrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    out.values[col] = a(order[col], order[col]).real();
    for (std::size_t row = 0; row < n; ++row) out.vectors(row, col) = v(row, order[col]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Functional calculus

namespace {

CMatrix conjugate_diag(const CMatrix& u, std::span<const cplx> d) {
  const std::size_t n = u.dim();
  CMatrix scaled = u;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) scaled(j, k) *= d[k];
  return mul(scaled, adjoint(u));
}

}  // namespace

void require_positive(const EigDecomp& eig, const char* op) {
  const double lo = eig.min();
  const double hi = eig.max();
  if (!(lo > tol::pos * std::max(1.0, hi)))
    throw DomainError(fmt::format("{}: matrix is not strictly positive (lambda_min = {:.6e})", op,
                                  lo),
                      lo);
}

HermMatrix apply_fn(const EigDecomp& eig, const std::function<double(double)>& f) {
  std::vector<cplx> d(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), d.begin(),
                 [&](double lam) { return cplx{f(lam), 0.0}; });
  return HermMatrix::symmetrized(conjugate_diag(eig.vectors, d));
}

HermMatrix mat_fn(const HermMatrix& a, const std::function<double(double)>& f) {
  return apply_fn(eigh(a), f);
}

HermMatrix mat_exp(const HermMatrix& a) {
  return mat_fn(a, [](double x) { return std::exp(x); });
}

HermMatrix mat_log(const EigDecomp& eig) {
  require_positive(eig, "mat_log");
  return apply_fn(eig, [](double x) { return std::log(x); });
}

HermMatrix mat_inv(const EigDecomp& eig) {
  require_positive(eig, "mat_inv");
  return apply_fn(eig, [](double x) { return 1.0 / x; });
}

HermMatrix mat_log(const HermMatrix& a) { return mat_log(eigh(a)); }

HermMatrix mat_inv(const HermMatrix& a) { return mat_inv(eigh(a)); }

CMatrix exp_i(const HermMatrix& a, double theta) {
  const EigDecomp eig = eigh(a);
  std::vector<cplx> d(eig.values.size());
  std::transform(eig.values.begin(), eig.values.end(), d.begin(),
                 [&](double lam) { return std::polar(1.0, theta * lam); });
  return conjugate_diag(eig.vectors, d);
}

HermMatrix frechet_log(const EigDecomp& c, const HermMatrix& h) {
  require_positive(c, "frechet_log");
  if (h.dim() != c.values.size()) throw UsageError("frechet_log: dimension mismatch");
  const std::size_t n = h.dim();
  const CMatrix& u = c.vectors;
  CMatrix ht = mul(adjoint(u), mul(h, u));
  for (std::size_t j = 0; j < n; ++j) {
    const double lj = c.values[j];
    for (std::size_t k = 0; k < n; ++k) {
      const double lk = c.values[k];
      const double gap = lj - lk;
      double phi;
      if (std::abs(gap) > tol::dk * (lj + lk))
        phi = std::log1p(gap / lk) / gap;
      else
        phi = 2.0 / (lj + lk);
      ht(j, k) *= phi;
    }
  }
  return HermMatrix::symmetrized(mul(u, mul(ht, adjoint(u))));
}

HermMatrix frechet_log(const HermMatrix& c, const HermMatrix& h) {
  return frechet_log(eigh(c), h);
}

double log_det(const EigDecomp& c) {
  require_positive(c, "log_det");
  double s = 0.0;
  for (double lam : c.values) s += std::log(lam);
  return s;
}

double log_det(const HermMatrix& c) { return log_det(eigh(c)); }

}  // namespace fuzzyflow
