#pragma once

// Test-side reference implementations on Eigen, built from the definitions
// without going through the library's matrix code.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "fuzzyflow/matcore.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline Mat to_eigen(const fuzzyflow::CMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  Mat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) out(j, k) = a(j, k);
  return out;
}

inline fuzzyflow::CMatrix from_eigen(const Mat& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  fuzzyflow::CMatrix out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) out(j, k) = a(j, k);
  return out;
}

inline double hs(const Mat& a) { return a.norm(); }

/// x = diag(j m) (or reduced mod n), F_jk = q^{-jk} / sqrt(n), y = F* x F.
struct Torus {
  Mat x, y, u, v, f;

  Torus(int n, int m, bool mod_n = false) {
    x = Mat::Zero(n, n);
    u = Mat::Zero(n, n);
    v = Mat::Zero(n, n);
    f = Mat::Zero(n, n);
    const double w = 2.0 * std::numbers::pi / n;
    for (int j = 0; j < n; ++j) {
      const long long jm = static_cast<long long>(j) * m;
      x(j, j) = static_cast<double>(mod_n ? jm % n : jm);
      u(j, j) = std::polar(1.0, w * static_cast<double>(jm % n));
      v(j, (j + 1) % n) = 1.0;
      for (int k = 0; k < n; ++k)
        f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                             -w * static_cast<double>((jm * k) % n));
    }
    y = f.adjoint() * x * f;
  }

  Mat comm(const Mat& a, const Mat& b) const { return a * b - b * a; }
  Mat laplacian(const Mat& a) const { return comm(y, comm(y, a)) + comm(x, comm(x, a)); }
};

template <class F>
Mat herm_fn(const Mat& a, F f) {
  const Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXcd d(h.rows());
  for (Eigen::Index j = 0; j < h.rows(); ++j) d(j) = f(es.eigenvalues()(j));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat logm(const Mat& a) {
  return herm_fn(a, [](double l) { return std::log(l); });
}

/// Daleckii-Krein derivative of log at c in direction h, not re-Hermitized.
inline Mat frechet_log(const Mat& c, const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.adjoint()));
  const auto& lam = es.eigenvalues();
  const Mat& u = es.eigenvectors();
  Mat g = u.adjoint() * h * u;
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      const double a = lam(j), b = lam(k);
      const double dd = std::abs(a - b) <= 1e-8 * std::max(a, b) ? 2.0 / (a + b)
                                                                  : (std::log(a) - std::log(b)) / (a - b);
      g(j, k) *= dd;
    }
  }
  return u * g * u.adjoint();
}

}  // namespace oracle
