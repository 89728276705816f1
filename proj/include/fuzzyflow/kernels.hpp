#pragma once

// Data-parallel inner loops. Every kernel has a serial twin in
// kernels::reference with the same signature; tests hold the two equal and
// bench/ compares their timings.

#include <complex>
#include <cstddef>
#include <span>

namespace fuzzyflow::kernels {

using cplx = std::complex<double>;

/// Matrices below this dimension run serially; thread start-up dominates.
inline constexpr std::size_t parallel_min_dim = 48;

/// out = a * b for n x n row-major matrices. out must not alias a or b.
void gemm(std::size_t n, std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);

/// out = [y,[y,a]] + [x,[x,a]], the fuzzy-torus Laplacian with delta1 = [y,.]
/// and delta2 = -[x,.].
void laplacian(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
               std::span<const cplx> a, std::span<cplx> out);

/// Dense n^2 x n^2 matrix of the Laplacian in the row-major e_{jk} basis:
/// row index j*n+k, column index p*n+r.
void laplacian_superop(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
                       std::span<cplx> out);

/// out = L * v for a dense N x N operator.
void apply(std::size_t big_n, std::span<const cplx> op, std::span<const cplx> v,
           std::span<cplx> out);

namespace reference {

void gemm(std::size_t n, std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void laplacian(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
               std::span<const cplx> a, std::span<cplx> out);
/// Builds column (p, r) by applying the reference Laplacian to e_{pr}.
void laplacian_superop(std::size_t n, std::span<const cplx> x, std::span<const cplx> y,
                       std::span<cplx> out);
void apply(std::size_t big_n, std::span<const cplx> op, std::span<const cplx> v,
           std::span<cplx> out);

}  // namespace reference

}  // namespace fuzzyflow::kernels
