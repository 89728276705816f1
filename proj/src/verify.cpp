#include "fuzzyflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/kernels.hpp"
#include "fuzzyflow/metric.hpp"

namespace fuzzyflow::verify {

bool PropertyResult::pass() const {
  return bound == Bound::at_most ? worst <= tolerance : worst > tolerance;
}

PropertyResult& Tally::slot(const std::string& name, Bound bound, double tolerance) {
  auto it = std::find_if(results_.begin(), results_.end(),
                         [&](const PropertyResult& r) { return r.name == name; });
  if (it != results_.end()) return *it;
  PropertyResult r;
  r.name = name;
  r.bound = bound;
  r.tolerance = tolerance;
  r.worst = bound == Bound::at_most ? 0.0 : std::numeric_limits<double>::infinity();
  results_.push_back(r);
  return results_.back();
}

void Tally::at_most(const std::string& name, double value, double tolerance) {
  PropertyResult& r = slot(name, Bound::at_most, tolerance);
  // NaN must fail, so it replaces whatever is there.
  if (std::isnan(value) || value > r.worst) r.worst = value;
  ++r.cases;
}

void Tally::above(const std::string& name, double value, double tolerance) {
  PropertyResult& r = slot(name, Bound::above, tolerance);
  if (std::isnan(value) || value < r.worst) r.worst = value;
  ++r.cases;
}

void Tally::merge(const std::vector<PropertyResult>& other) {
  for (const auto& o : other) {
    PropertyResult& r = slot(o.name, o.bound, o.tolerance);
    if (o.bound == Bound::at_most) {
      if (std::isnan(o.worst) || o.worst > r.worst) r.worst = o.worst;
    } else {
      if (std::isnan(o.worst) || o.worst < r.worst) r.worst = o.worst;
    }
    r.cases += o.cases;
  }
}

bool all_pass(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.pass(); });
}

// ---------------------------------------------------------------------------
// Derivations and random inputs

Derivations Derivations::of(const FuzzyTorus& torus) {
  return {[&torus](const CMatrix& a) { return torus.delta1(a); },
          [&torus](const CMatrix& a) { return torus.delta2(a); }};
}

CMatrix Derivations::laplacian(const CMatrix& a) const { return d1(d1(a)) + d2(d2(a)); }

Derivations with_corrupted_delta2(const FuzzyTorus& torus) {
  return {[&torus](const CMatrix& a) { return torus.delta1(a); },
          [&torus](const CMatrix& a) { return mul(a, torus.x()) + mul(torus.x(), a); }};
}

std::uint64_t case_seed(std::uint64_t base, int n, int m, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

CMatrix random_matrix(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  CMatrix a(n);
  for (auto& z : a.entries()) z = cplx{normal(rng), normal(rng)};
  return a * (1.0 / hs_norm(a));
}

HermMatrix random_hermitian(std::size_t n, Rng& rng) {
  const HermMatrix h = HermMatrix::symmetrized(random_matrix(n, rng));
  return h * (1.0 / hs_norm(h));
}

CMatrix random_unitary(std::size_t n, Rng& rng) {
  CMatrix g = random_matrix(n, rng);
  // Modified Gram-Schmidt on the columns, twice for orthogonality to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        cplx dot{};
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(g(i, j)) * g(i, k);
        for (std::size_t i = 0; i < n; ++i) g(i, k) -= dot * g(i, j);
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) norm += std::norm(g(i, k));
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < n; ++i) g(i, k) /= norm;
    }
  }
  return g;
}

std::vector<std::pair<int, int>> coprime_pairs(int n_lo, int n_hi) {
  std::vector<std::pair<int, int>> out;
  for (int n = std::max(2, n_lo); n <= n_hi; ++n)
    for (int m = 1; m < n; ++m)
      if (std::gcd(m, n) == 1) out.emplace_back(n, m);
  return out;
}

namespace {

FuzzyTorus make_torus(int n, int m, XChoice x) {
  TorusParams p;
  p.n = n;
  p.m = m;
  p.x_choice = x;
  return FuzzyTorus(p);
}

CMatrix identity_like(const CMatrix& a) { return CMatrix::identity(a.dim()); }

// Runs `body(pair_index, tally)` for every pair, possibly in parallel, and
// merges the per-pair tallies in pair order so the report is deterministic.
template <class Body>
std::vector<PropertyResult> over_pairs(const SuiteOptions& opts, Body body) {
  const auto count = static_cast<std::ptrdiff_t>(opts.pairs.size());
  std::vector<std::vector<PropertyResult>> parts(opts.pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    Tally t;
    body(opts.pairs[static_cast<std::size_t>(i)], t);
    parts[static_cast<std::size_t>(i)] = t.results();
  }
  Tally all;
  for (const auto& p : parts) all.merge(p);
  return all.results();
}

}  // namespace

// ---------------------------------------------------------------------------
// Suites

std::vector<PropertyResult> algebra_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const auto [n, m] = nm;
    const FuzzyTorus T = make_torus(n, m, opts.x_choice);
    const CMatrix& u = T.u();
    const CMatrix& v = T.v();
    const CMatrix& f = T.fourier();
    const CMatrix one = identity_like(u);

    t.at_most("vu = q uv", hs_norm(mul(v, u) - T.q() * mul(u, v)), 1e-12);
    t.at_most("v = F* u F", hs_norm(v - mul(adjoint(f), mul(u, f))), 1e-12);
    double unit = std::max({hs_norm(mul(adjoint(u), u) - one), hs_norm(mul(adjoint(v), v) - one),
                            hs_norm(mul(adjoint(f), f) - one)});
    t.at_most("u, v, F unitary", unit, tol::fn);
    CMatrix un = one, vn = one;
    for (int k = 0; k < n; ++k) {
      un = mul(un, u);
      vn = mul(vn, v);
    }
    t.at_most("u^n = v^n = 1", std::max(hs_norm(un - one), hs_norm(vn - one)), tol::fn);
    const double two_pi_n = 2.0 * std::numbers::pi / n;
    t.at_most("exp(2 pi i x / n) = u", hs_norm(exp_i(T.x(), two_pi_n) - u), 1e-10);
    t.at_most("exp(2 pi i y / n) = v", hs_norm(exp_i(T.y(), two_pi_n) - v), 1e-10);

    if (opts.x_choice == XChoice::standard) {
      const auto dim = static_cast<std::size_t>(n);
      const double mm = m;
      const CMatrix d2v = v * mm - CMatrix::unit(dim, dim - 1, 0) * (mm * n);
      t.at_most("delta2 v = m v - m n e_n1", max_abs_diff(T.delta2(v), d2v), 1e-10);
      const CMatrix d1u =
          u * mm - mul(adjoint(f), mul(CMatrix::unit(dim, 0, dim - 1), f)) * (mm * n);
      t.at_most("delta1 u = m u - m n F* e_1n F", max_abs_diff(T.delta1(u), d1u), 1e-10);
    }
    t.at_most("delta1 v = 0, delta2 u = 0",
              std::max(max_abs(T.delta1(v)), max_abs(T.delta2(u))), 1e-10);
  });
}

std::vector<PropertyResult> derivation_suite(const FuzzyTorus& torus, const Derivations& d,
                                             int seeds, std::uint64_t base_seed) {
  Tally t;
  const std::size_t n = torus.dim();
  const int tn = torus.params().n;
  const int tm = torus.params().m;
  const CMatrix one = CMatrix::identity(n);
  t.at_most("(a) delta_mu 1 = 0", std::max(max_abs(d.d1(one)), max_abs(d.d2(one))), tol::fn);

  for (int s = 0; s < seeds; ++s) {
    Rng rng(case_seed(base_seed, tn, tm, s));
    const CMatrix a = random_matrix(n, rng);
    const CMatrix b = random_matrix(n, rng);
    const CMatrix lap_a = d.laplacian(a);
    for (int mu = 1; mu <= 2; ++mu) {
      const auto& delta = mu == 1 ? d.d1 : d.d2;
      const CMatrix da = delta(a);
      const CMatrix db = delta(b);
      // a and b have unit norm, so these are relative to ||a|| ||b||.
      t.at_most("(b) integration by parts", std::abs(trace(mul(a, db)) + trace(mul(b, da))),
                tol::fn);
      t.at_most("(c) Hermitian derivations", std::abs(hs_inner(a, db) - hs_inner(da, b)), tol::fn);
      t.at_most("(c) (delta a)* = -delta(a*)", max_abs(adjoint(da) + delta(adjoint(a))), tol::fn);
      t.at_most("Leibniz rule", max_abs(delta(mul(a, b)) - mul(da, b) - mul(a, db)), tol::fn);
      const cplx q = hs_inner(a, delta(da));
      t.above("(d) <a, delta_mu^2 a> >= 0", q.real(), -1e-10);
      const double dn = hs_norm(da);
      t.at_most("(e) <a, delta_mu^2 a> = ||delta_mu a||^2",
                std::abs(q - dn * dn) / std::max(1.0, dn * dn), tol::fn);
    }
    t.above("(d) <a, Laplacian a> >= 0", hs_inner(a, lap_a).real(), -1e-10);
    t.at_most("(g) tr(Laplacian a) = 0", std::abs(trace(lap_a)), 1e-10);
  }
  return t.results();
}

std::vector<PropertyResult> derivation_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const FuzzyTorus T = make_torus(nm.first, nm.second, opts.x_choice);
    t.merge(derivation_suite(T, Derivations::of(T), opts.seeds, opts.base_seed));
  });
}

std::vector<PropertyResult> superop_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const auto [n, m] = nm;
    const FuzzyTorus T = make_torus(n, m, opts.x_choice);
    const std::size_t dim = T.dim();
    const CMatrix L = T.laplacian_superop();
    t.at_most("superop Hermitian", hermiticity_defect(L) / std::max(1.0, max_abs(L)), 1e-13);

    const EigDecomp e = eigh(HermMatrix::symmetrized(L));
    const double top = e.max();
    const double zero_tol = 1e-8 * top;
    const auto kernel = std::count_if(e.values.begin(), e.values.end(),
                                      [&](double lam) { return std::abs(lam) <= zero_tol; });
    t.at_most("(f) dim ker Laplacian = 1", std::abs(static_cast<double>(kernel) - 1.0), 0.0);
    t.above("(d) superop eigenvalues >= -eps_fn", e.min() / top, -tol::fn);
    const double gap = e.values.size() > 1 ? e.values[1] : 0.0;
    t.above("spectral gap > 0", gap, zero_tol);

    // The null vector is proportional to vec(1) / sqrt(n).
    cplx overlap{};
    for (std::size_t j = 0; j < dim; ++j) overlap += e.vectors(j * dim + j, 0);
    overlap /= std::sqrt(static_cast<double>(dim));
    t.at_most("(f) kernel spanned by 1", 1.0 - std::abs(overlap), 1e-10);

    const double bound_k = 1.0 / std::sqrt(gap);
    for (int s = 0; s < opts.seeds; ++s) {
      Rng rng(case_seed(opts.base_seed, n, m, 1000 + s));
      const CMatrix a = random_matrix(dim, rng);
      std::vector<cplx> out(dim * dim);
      const std::vector<cplx> va = vec(a);
      kernels::apply(dim * dim, L.entries(), va, out);
      t.at_most("superop matches Laplacian",
                max_abs_diff(unvec(out), T.laplacian(a)) / std::max(1.0, top), 1e-13);

      // Kernel bound on a random a and on a nearly scalar a.
      for (double eps : {1.0, 1e-6}) {
        CMatrix b = a * eps;
        b.add_identity(cplx{0.7, -0.2});
        CMatrix centered = b;
        centered.add_identity(-trace(b) / static_cast<double>(dim));
        const double lhs = hs_norm(centered);
        const double rhs_bound = bound_k * (hs_norm(T.delta1(b)) + hs_norm(T.delta2(b)));
        t.at_most("(a) ||a - tr(a)/n|| <= K (||d1 a|| + ||d2 a||)",
                  (lhs - rhs_bound) / std::max(lhs, 1e-300), 1e-10);
      }
    }
  });
}

std::vector<PropertyResult> positivity_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const auto [n, m] = nm;
    const FuzzyTorus T = make_torus(n, m, opts.x_choice);
    const std::size_t dim = T.dim();
    std::uniform_real_distribution<double> scale_dist(0.1, 3.0);
    for (int s = 0; s < opts.seeds; ++s) {
      Rng rng(case_seed(opts.base_seed, n, m, 2000 + s));
      const HermMatrix a = random_hermitian(dim, rng) * scale_dist(rng);
      const CMatrix lap = T.laplacian(a.matrix());
      const double value = trace(mul(mat_exp(a), lap)).real();
      t.above("tr(e^a Laplacian a) >= 0", value, -1e-10);
      t.above("tr(e^a Laplacian a) > 10 tol for non-scalar a", value, 1e-9);
      t.above("tr(a Laplacian a) >= 0", trace(mul(a, lap)).real(), -1e-10);

      const double alpha = scale_dist(rng) * (s % 2 ? 1.0 : -1.0);
      const HermMatrix scalar = HermMatrix::identity(dim, alpha);
      t.at_most("tr(e^a Laplacian a) = 0 for scalar a",
                std::abs(trace(mul(mat_exp(scalar), T.laplacian(scalar.matrix())))), 1e-10);
    }
  });
}

std::vector<PropertyResult> functional_calculus_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const auto [n, m] = nm;
    const std::size_t dim = static_cast<std::size_t>(n);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int s = 0; s < opts.seeds; ++s) {
      Rng rng(case_seed(opts.base_seed, n, m, 3000 + s));
      const HermMatrix a = random_hermitian(dim, rng) * 4.0;
      const EigDecomp e = eigh(a);
      const double anorm = hs_norm(a);
      const CMatrix& U = e.vectors;
      const CMatrix rec = mul(U, mul(CMatrix::diagonal(e.values), adjoint(U)));
      t.at_most("eigh reconstruction", hs_norm(rec - a) / anorm, tol::eig);
      t.at_most("eigh unitarity", hs_norm(mul(adjoint(U), U) - CMatrix::identity(dim)), tol::eig);

      // Construct-then-decompose: known spectrum under a random unitary.
      std::vector<double> lam(dim);
      for (auto& l : lam) l = 5.0 * uni(rng);
      const CMatrix W = random_unitary(dim, rng);
      const HermMatrix b =
          HermMatrix::symmetrized(mul(W, mul(CMatrix::diagonal(lam), adjoint(W))));
      std::sort(lam.begin(), lam.end());
      const EigDecomp eb = eigh(b);
      double spec = 0.0;
      for (std::size_t j = 0; j < dim; ++j) spec = std::max(spec, std::abs(eb.values[j] - lam[j]));
      t.at_most("eigh recovers a planted spectrum", spec / 5.0, tol::eig);

      const Metric c = random_metric(dim, 0.7, case_seed(opts.base_seed, n, m, 4000 + s));
      t.at_most("exp(log c) = c", hs_norm(mat_exp(mat_log(c.matrix())) - c.matrix()) /
                                      hs_norm(c.matrix()),
                tol::fn);

      // Spectrum inside [-20, 20] with width at most 10 keeps exp(h) within
      // a condition number of e^10, where log can undo it to tol::fn.
      const double center = 15.0 * uni(rng);
      std::vector<double> mu(dim);
      for (auto& v : mu) v = center + 5.0 * uni(rng);
      const HermMatrix h =
          HermMatrix::symmetrized(mul(W, mul(CMatrix::diagonal(mu), adjoint(W))));
      t.at_most("log(exp h) = h", hs_norm(mat_log(mat_exp(h)) - h) / std::max(1.0, hs_norm(h)),
                tol::fn);

      const double ld = log_det(c.eig());
      t.at_most("log det c = tr log c",
                std::abs(ld - trace(mat_log(c.matrix())).real()) / std::max(1.0, std::abs(ld)),
                tol::fn);

      const CMatrix x = random_matrix(dim, rng);
      const CMatrix y = random_matrix(dim, rng);
      t.at_most("tr(ab) = tr(ba)", std::abs(trace(mul(x, y)) - trace(mul(y, x))), tol::fn);
      const cplx self = hs_inner(x, x);
      t.above("<a, a> > 0 for a != 0", self.real(), 0.0);
      t.at_most("<a, a> is real", std::abs(self.imag()), tol::fn);

      // Central differences of log against the Frechet derivative. The
      // truncation error is at most eps^2 |(log)'''(lambda_min)| / 6 =
      // eps^2 / (3 lambda_min^3) for unit ||h||, so
      // err(eps) <= eps^2 / (3 lambda_min^3) + eps_fn / eps. Second-order decay
      // is read off at 1e-3 -> 1e-4, where truncation still dominates.
      const HermMatrix dir = random_hermitian(dim, rng);
      const HermMatrix exact = frechet_log(c.eig(), dir);
      const double lmin = c.lambda_min();
      const auto fd_error = [&](double eps) {
        const HermMatrix fd =
            (mat_log(c.matrix() + eps * dir) - mat_log(c.matrix() - eps * dir)) * (0.5 / eps);
        return hs_norm(fd - exact);
      };
      const double e3 = fd_error(1e-3), e4 = fd_error(1e-4), e5 = fd_error(1e-5);
      for (auto [eps, err] : {std::pair{1e-4, e4}, std::pair{1e-5, e5}}) {
        const double bound = eps * eps / (3.0 * lmin * lmin * lmin) + tol::fn / eps;
        t.at_most("Frechet log: err(eps) / (K eps^2 + eps_fn / eps), eps = 1e-4, 1e-5",
                  err / bound, 1.0);
      }
      t.above("Frechet log second-order decay (err ratio, eps 1e-3 -> 1e-4)", e3 / e4, 50.0);
    }
  });
}

// ---------------------------------------------------------------------------
// Flow

std::vector<CorpusMember> flow_corpus(const FuzzyTorus& torus, std::uint64_t seed) {
  const std::size_t n = torus.dim();
  std::vector<CorpusMember> out;
  out.push_back({"cigar M=0.1", cigar(torus, 0.1)});
  out.push_back({"cigar M=1", cigar(torus, 1.0)});
  out.push_back({"random spread=0.5", random_metric(n, 0.5, seed)});
  out.push_back({"random spread=2", random_metric(n, 2.0, seed + 1)});
  out.push_back({"diag ladder", diag_ladder(n)});
  return out;
}

namespace {

double hs_norm_from_diag(const DiagRecord& d, std::size_t n, double c_inf) {
  // tr(c - c_inf) = 0, so ||c||^2 = ||c - c_inf||^2 + n c_inf^2.
  return std::sqrt(d.dist_flat + static_cast<double>(n) * c_inf * c_inf);
}

// Stiffness time scale of the flow at c: lambda_min(c) / ||Laplacian||.
double time_scale(const FuzzyTorus& torus, const Metric& c) {
  return c.lambda_min() / torus.laplacian_bound();
}

// Central difference of log det through RK4 micro-steps. The difference is
// formed as log det(1 + c_-^{-1/2} (c_+ - c_-) c_-^{-1/2}) from the step
// increments, so nothing cancels against c itself, and Richardson
// extrapolation removes the O(dt^2) term that stiff states would expose.
double numeric_log_det_rate(const FuzzyTorus& torus, const Metric& c, double dt) {
  const auto central = [&](double h) {
    const HermMatrix plus = rk4_increment(torus, c.matrix(), h);
    const HermMatrix minus = rk4_increment(torus, c.matrix(), -h);
    const HermMatrix s = mat_fn(c.matrix() + minus, [](double l) { return 1.0 / std::sqrt(l); });
    const EigDecomp e = eigh(HermMatrix::symmetrized(mul(s, mul(plus - minus, s))));
    double sum = 0.0;
    for (double mu : e.values) sum += std::log1p(mu);
    return sum / (2.0 * h);
  };
  return (4.0 * central(0.5 * dt) - central(dt)) / 3.0;
}

}  // namespace

void check_trajectory(const FuzzyTorus& torus, const FlowTrace& trace, Tally& t) {
  const std::size_t n = torus.dim();
  const double c_inf = trace.c_infinity;
  const FlowConfig& cfg = trace.config;
  const double target = cfg.conv_tol * cfg.conv_tol;
  const DiagRecord& last = trace.samples.back().diag;

  t.at_most("converged (final dist_flat / conv_tol^2)",
            trace.termination == Termination::converged ? last.dist_flat / target
                                                        : std::numeric_limits<double>::infinity(),
            1.0);
  t.at_most("terminal ||c - c_inf 1||_2", std::sqrt(last.dist_flat), cfg.conv_tol);
  t.at_most("log_det monotonicity violations", trace.violations.log_det, 0.0);
  t.at_most("entropy monotonicity violations", trace.violations.entropy, 0.0);
  t.at_most("dist_flat monotonicity violations", trace.violations.dist_flat, 0.0);

  const double tr0 = trace.samples.front().diag.trace_c;
  double drift = 0.0, confine = -1.0, lam_min = std::numeric_limits<double>::infinity();
  double weight = 0.0;
  for (const auto& s : trace.samples) {
    drift = std::max(drift, std::abs(s.diag.trace_c - tr0) / tr0);
    confine = std::max(confine, s.diag.lambda_max / (static_cast<double>(n) * c_inf) - 1.0);
    lam_min = std::min(lam_min, s.diag.lambda_min);
    const double denom = hs_norm_from_diag(s.diag, n, c_inf) * s.diag.curvature_norm;
    if (denom > 0.0) weight = std::max(weight, std::abs(s.diag.curvature_weight) / denom);
  }
  t.at_most("trace drift (relative)", drift, 1e-9);
  t.at_most("lambda_max <= n c_inf (1 + 1e-6)", confine, 1e-6);
  t.above("lambda_min > 0", lam_min, 0.0);
  t.at_most("|tr(c R)| / (||c|| ||R||)", weight, tol::curv);

  // Strictly increasing log det over stretches where the metric is not flat.
  const std::size_t chunk = 8;
  double worst_gain = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + chunk < trace.samples.size(); i += chunk) {
    const auto& a = trace.samples[i].diag;
    const auto& b = trace.samples[i + chunk].diag;
    // Near the fixed point the per-step gains sink into roundoff.
    if (b.dist_flat <= 1e-8 * static_cast<double>(n) * c_inf * c_inf) break;
    worst_gain = std::min(worst_gain, std::min(b.log_det_c - a.log_det_c, b.entropy - a.entropy));
  }
  if (std::isfinite(worst_gain)) t.above("log det and entropy strictly increase", worst_gain, 0.0);

  // Log-det rate identity at a few early states, while the rate is well resolved.
  if (!trace.states.empty()) {
    const std::size_t count = trace.states.size();
    for (double frac : {0.0, 0.05, 0.1, 0.2, 0.3}) {
      const auto i = static_cast<std::size_t>(frac * static_cast<double>(count - 1));
      const Metric& c = trace.states[i];
      if (trace.samples[i].diag.dist_flat < 1e-6 * static_cast<double>(n) * c_inf * c_inf)
        continue;
      const double analytic = log_det_rate(torus, c);
      const double numeric = numeric_log_det_rate(torus, c, 1e-2 * time_scale(torus, c));
      t.at_most("d/dt log det = tr(c^-1 dc/dt)",
                std::abs(numeric - analytic) / std::abs(analytic), 1e-6);
      t.above("d/dt log det > 0 off the fixed point", analytic, 0.0);
    }
  }
}

std::vector<PropertyResult> flow_suite(const SuiteOptions& opts) {
  return over_pairs(opts, [&](std::pair<int, int> nm, Tally& t) {
    const auto [n, m] = nm;
    const FuzzyTorus T = make_torus(n, m, opts.x_choice);
    const std::vector<CorpusMember> corpus = flow_corpus(T, case_seed(opts.base_seed, n, m, 0));
    for (const auto& member : corpus) {
      FlowConfig cfg = FlowConfig::for_metric(member.metric);
      cfg.keep_states = true;
      const FlowTrace trace = integrate(T, member.metric, cfg);
      check_trajectory(T, trace, t);

      // Flatness characterization in both directions.
      const HermMatrix r = scalar_curvature(T, member.metric);
      const bool flat_state = dist_flat(member.metric, member.metric.level()) <=
                              cfg.conv_tol * cfg.conv_tol;
      t.at_most("R = 0 iff flat (non-flat corpus)",
                (hs_norm(r) <= tol::curv) == flat_state ? 0.0 : 1.0, 0.0);
    }
    for (double alpha : {0.25, 1.0, 7.5}) {
      const Metric c = flat(T.dim(), alpha);
      t.at_most("R = 0 iff flat (flat corpus)", hs_norm(scalar_curvature(T, c)), tol::curv);
    }
    t.at_most("rhs(flat) = 0", hs_norm(rhs(T, flat(T.dim(), 3.0))), tol::fn);
    t.above("cigar is not a fixed point: ||rhs(cigar)||", hs_norm(rhs(T, cigar(T, 1.0))), tol::fn);

    const Metric rho = normalize_density(corpus[2].metric).rho;
    const EntropyRate er = entropy_rate_check(T, rho);
    t.above("tr(l Laplacian l) > 0 off the fixed point", er.analytic, 0.0);
    t.at_most("dS/dt = tr(l Laplacian l)", std::abs(er.numeric - er.analytic) / er.analytic, 1e-4);
  });
}

}  // namespace fuzzyflow::verify
