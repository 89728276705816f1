#pragma once

// Seeded property suites for the torus identities, the positivity
// inequalities and the flow invariants. Each suite returns one result per
// property with the worst residual seen across all cases.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fuzzyflow/flow.hpp"
#include "fuzzyflow/torus.hpp"

namespace fuzzyflow::verify {

enum class Bound {
  at_most,  // pass iff worst <= tolerance; worst is the largest residual
  above,    // pass iff worst > tolerance; worst is the smallest value
};

struct PropertyResult {
  std::string name;
  Bound bound = Bound::at_most;
  double worst = 0.0;
  double tolerance = 0.0;
  long cases = 0;
  bool pass() const;
};

/// Accumulates named residuals, keeping first-seen order.
class Tally {
 public:
  void at_most(const std::string& name, double value, double tolerance);
  void above(const std::string& name, double value, double tolerance);
  void merge(const std::vector<PropertyResult>& other);
  const std::vector<PropertyResult>& results() const noexcept { return results_; }

 private:
  PropertyResult& slot(const std::string& name, Bound bound, double tolerance);
  std::vector<PropertyResult> results_;
};

bool all_pass(const std::vector<PropertyResult>& results);

/// Derivations under test. Defaults to the torus's own; replaceable so the
/// suites can be shown to catch a broken implementation.
struct Derivations {
  std::function<CMatrix(const CMatrix&)> d1;
  std::function<CMatrix(const CMatrix&)> d2;

  static Derivations of(const FuzzyTorus& torus);
  CMatrix laplacian(const CMatrix& a) const;
};

/// delta2 with the sign of its x*a term flipped: a*x + x*a. Not a derivation.
Derivations with_corrupted_delta2(const FuzzyTorus& torus);

using Rng = std::mt19937_64;
/// Seed for case `index` of a suite on torus (n, m).
std::uint64_t case_seed(std::uint64_t base, int n, int m, int index);
/// Gaussian complex matrix scaled to unit Hilbert-Schmidt norm.
CMatrix random_matrix(std::size_t n, Rng& rng);
/// Gaussian Hermitian matrix scaled to unit Hilbert-Schmidt norm.
HermMatrix random_hermitian(std::size_t n, Rng& rng);
/// Random unitary from Gram-Schmidt on a Gaussian matrix.
CMatrix random_unitary(std::size_t n, Rng& rng);

/// All (n, m) with n in [n_lo, n_hi], 1 <= m < n and gcd(m, n) = 1.
std::vector<std::pair<int, int>> coprime_pairs(int n_lo, int n_hi);

struct SuiteOptions {
  std::vector<std::pair<int, int>> pairs;
  int seeds = 50;
  std::uint64_t base_seed = 1;
  XChoice x_choice = XChoice::standard;
};

/// Generator identities: commutation, unitarity, u^n = v^n = 1, v = F* u F,
/// exp(2 pi i x / n) = u and the same for y / v, and for the standard x the
/// worked formulas for delta2 v and delta1 u.
std::vector<PropertyResult> algebra_suite(const SuiteOptions& opts);

/// Derivation properties on random matrices: delta 1 = 0, integration by
/// parts, Hermiticity, adjoint anti-commutation, Leibniz, positivity of
/// delta^2 and the Laplacian, <a, delta^2 a> = ||delta a||^2, tr(Laplacian a) = 0.
std::vector<PropertyResult> derivation_suite(const FuzzyTorus& torus, const Derivations& d,
                                             int seeds, std::uint64_t base_seed);
std::vector<PropertyResult> derivation_suite(const SuiteOptions& opts);

/// Spectrum of the dense Laplacian superoperator: Hermitian, kernel spanned by
/// vec(1), non-negative, spectral gap, agreement with the matrix-level
/// Laplacian, and the kernel bound ||a - tr(a)/n|| <= (||d1 a|| + ||d2 a||) / sqrt(gap).
std::vector<PropertyResult> superop_suite(const SuiteOptions& opts);

/// tr(e^a Laplacian a) >= 0 with equality exactly on scalars, and
/// tr(a Laplacian a) >= 0.
std::vector<PropertyResult> positivity_suite(const SuiteOptions& opts);

/// eigh residuals, exp/log round trips, Frechet derivative against central
/// differences, log det = tr log, trace cyclicity, faithfulness of <.,.>.
std::vector<PropertyResult> functional_calculus_suite(const SuiteOptions& opts);

/// Initial metrics exercised by the flow suite for one torus.
struct CorpusMember {
  std::string label;
  Metric metric;
};
std::vector<CorpusMember> flow_corpus(const FuzzyTorus& torus, std::uint64_t seed);

/// Checks one integrated trajectory against the flow invariants. `trace` must
/// have been produced with keep_states.
void check_trajectory(const FuzzyTorus& torus, const FlowTrace& trace, Tally& tally);

/// Integrates the corpus for every pair and checks each trajectory, plus the
/// curvature flatness characterization and the entropy-rate identity.
std::vector<PropertyResult> flow_suite(const SuiteOptions& opts);

}  // namespace fuzzyflow::verify
