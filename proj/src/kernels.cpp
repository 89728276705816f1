#include "fuzzyflow/kernels.hpp"

#include <algorithm>
#include <vector>

namespace fuzzyflow::kernels {

void gemm(std::size_t n, std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= parallel_min_dim)
  for (std::ptrdiff_t j = 0; j < nn; ++j) {
    cplx* row = out.data() + j * nn;
    for (std::ptrdiff_t k = 0; k < nn; ++k) row[k] = 0.0;
    for (std::ptrdiff_t l = 0; l < nn; ++l) {
      const cplx ajl = a[j * nn + l];
      if (ajl == cplx{}) continue;
      const cplx* brow = b.data() + l * nn;
      for (std::ptrdiff_t k = 0; k < nn; ++k) row[k] += ajl * brow[k];
    }
  }
}

void laplacian(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
               std::span<const cplx> a, std::span<cplx> out) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  std::vector<cplx> ty(n * n), tx(n * n);
#pragma omp parallel if (n >= parallel_min_dim)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < nn; ++j) {
      for (std::ptrdiff_t k = 0; k < nn; ++k) {
        cplx sy{}, sx{};
        for (std::ptrdiff_t l = 0; l < nn; ++l) {
          sy += y[j * nn + l] * a[l * nn + k] - a[j * nn + l] * y[l * nn + k];
          sx += x[j * nn + l] * a[l * nn + k] - a[j * nn + l] * x[l * nn + k];
        }
        ty[j * nn + k] = sy;
        tx[j * nn + k] = sx;
      }
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < nn; ++j) {
      for (std::ptrdiff_t k = 0; k < nn; ++k) {
        cplx s{};
        for (std::ptrdiff_t l = 0; l < nn; ++l) {
          s += y[j * nn + l] * ty[l * nn + k] - ty[j * nn + l] * y[l * nn + k];
          s += x[j * nn + l] * tx[l * nn + k] - tx[j * nn + l] * x[l * nn + k];
        }
        out[j * nn + k] = s;
      }
    }
  }
}

void laplacian_superop(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
                       std::span<cplx> out) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto big = nn * nn;
  std::vector<cplx> x2(n * n), y2(n * n);
  gemm(n, x, x, x2);
  gemm(n, y, y, y2);

  // [z,[z,a]] = z^2 a - 2 z a z + a z^2, so the coefficient of a_{pr} in
  // entry (j,k) is z2_{jp} d_{kr} - 2 z_{jp} z_{rk} + d_{jp} z2_{rk}.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t row = 0; row < big; ++row) {
    const std::ptrdiff_t j = row / nn;
    const std::ptrdiff_t k = row % nn;
    cplx* out_row = out.data() + row * big;
    for (std::ptrdiff_t p = 0; p < nn; ++p) {
      for (std::ptrdiff_t r = 0; r < nn; ++r) {
        cplx v = -2.0 * (y[j * nn + p] * y[r * nn + k] + x[j * nn + p] * x[r * nn + k]);
        if (k == r) v += y2[j * nn + p] + x2[j * nn + p];
        if (j == p) v += y2[r * nn + k] + x2[r * nn + k];
        out_row[p * nn + r] = v;
      }
    }
  }
}

void apply(std::size_t big_n, std::span<const cplx> op, std::span<const cplx> v,
           std::span<cplx> out) {
  const auto nn = static_cast<std::ptrdiff_t>(big_n);
#pragma omp parallel for schedule(static) if (big_n >= parallel_min_dim)
  for (std::ptrdiff_t j = 0; j < nn; ++j) {
    cplx s{};
    const cplx* row = op.data() + j * nn;
    for (std::ptrdiff_t k = 0; k < nn; ++k) s += row[k] * v[k];
    out[j] = s;
  }
}

namespace reference {

void gemm(std::size_t n, std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx s{};
      for (std::size_t l = 0; l < n; ++l) s += a[j * n + l] * b[l * n + k];
      out[j * n + k] = s;
    }
  }
}

namespace {

// out = [z, a]
void commutator(std::size_t n, std::span<const cplx> z, std::span<const cplx> a,
                std::span<cplx> out) {
  std::vector<cplx> za(n * n), az(n * n);
  gemm(n, z, a, za);
  gemm(n, a, z, az);
  for (std::size_t i = 0; i < n * n; ++i) out[i] = za[i] - az[i];
}

}  // namespace

void laplacian(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
               std::span<const cplx> a, std::span<cplx> out) {
  std::vector<cplx> t(n * n), ty(n * n), tx(n * n);
  commutator(n, y, a, t);
  commutator(n, y, t, ty);
  // delta2 = -[x,.]; the sign cancels in the square.
  commutator(n, x, a, t);
  commutator(n, x, t, tx);
  for (std::size_t i = 0; i < n * n; ++i) out[i] = ty[i] + tx[i];
}

void laplacian_superop(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
                       std::span<cplx> out) {
  const std::size_t big = n * n;
  std::vector<cplx> basis(big), column(big);
  for (std::size_t col = 0; col < big; ++col) {
    std::fill(basis.begin(), basis.end(), cplx{});
    basis[col] = 1.0;
    laplacian(n, x, y, basis, column);
    for (std::size_t row = 0; row < big; ++row) out[row * big + col] = column[row];
  }
}

void apply(std::size_t big_n, std::span<const cplx> op, std::span<const cplx> v,
           std::span<cplx> out) {
  for (std::size_t j = 0; j < big_n; ++j) {
    cplx s{};
    for (std::size_t k = 0; k < big_n; ++k) s += op[j * big_n + k] * v[k];
    out[j] = s;
  }
}

}  // namespace reference

}  // namespace fuzzyflow::kernels
