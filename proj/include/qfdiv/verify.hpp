#pragma once

// Property suites over seeded random grids. Each suite returns the worst
// residual it saw against its own threshold; every pair is drawn from the
// stream (seed, suite, n, k) so suites are reproducible in isolation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "qfdiv/divergence.hpp"
#include "qfdiv/extremal.hpp"
#include "qfdiv/functions.hpp"
#include "qfdiv/kernels.hpp"
#include "qfdiv/majorization.hpp"
#include "qfdiv/optimizer.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

struct VerifyConfig {
  std::uint64_t seed = 20240601;
  int pairs = 25;          // random pairs per dimension
  int haar_samples = 200;  // sandwich samples per pair
  int restarts = 20;       // optimizer restarts
  bool perturb = false;    // shrinks the claimed maximum in the sandwich suite
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // largest residual, in the suite's own units
  double threshold = 0.0;  // pass iff worst <= threshold
  std::size_t checks = 0;
  std::string detail;
};

inline std::vector<std::string> suite_names() {
  return {"theorem",        "sandwich", "optimizer",  "claims",       "s-components",
          "representation", "trace-identities", "interval", "invariance", "hockey-stick"};
}

inline std::vector<std::string> theorem_function_specs() {
  return {"t_log_t", "neg_log", "square", "pure_kernel:1", "power_alpha:0.5", "power_alpha:2"};
}

namespace detail {

enum SuiteId : std::uint64_t {
  kTheorem = 1,
  kSandwich,
  kOptimizer,
  kClaims,
  kComponents,
  kRepresentation,
  kTraceIdentities,
  kInterval,
  kInvariance,
  kHockey
};

struct StatePair {
  DensityState rho;
  DensityState sigma;
};

inline StatePair grid_pair(const VerifyConfig& c, SuiteId suite, Index n, int k) {
  Rng rng = make_stream(derive_seed(c.seed, suite), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  auto rho = random_density(n, rng);
  auto sigma = random_density(n, rng);
  return {std::move(rho), std::move(sigma)};
}

class Tally {
 public:
  Tally(std::string name, double threshold) {
    r_.name = std::move(name);
    r_.threshold = threshold;
  }

  /// Records a residual; NaN counts as a failure.
  void record(double residual) {
    ++r_.checks;
    if (std::isnan(residual)) residual = kInfinity;
    r_.worst = std::max(r_.worst, residual);
  }

  /// Records a boolean property as residual 0 / +inf.
  void require(bool ok) { record(ok ? 0.0 : kInfinity); }

  SuiteResult finish(std::string detail = {}) {
    r_.passed = r_.worst <= r_.threshold;
    r_.detail = std::move(detail);
    return r_;
  }

 private:
  SuiteResult r_;
};

/// Central-difference mixed partial with one Richardson step; steps are
/// 1% of each argument.
inline double mixed_partial_fd(KernelKind kind, double d, double r, double s) {
  auto central = [&](double hd, double hr) {
    return (kernel_value(kind, d + hd, r + hr, s) - kernel_value(kind, d + hd, r - hr, s) -
            kernel_value(kind, d - hd, r + hr, s) + kernel_value(kind, d - hd, r - hr, s)) /
           (4.0 * hd * hr);
  };
  const double coarse = central(1e-2 * d, 1e-2 * r);
  const double fine = central(5e-3 * d, 5e-3 * r);
  return (4.0 * fine - coarse) / 3.0;
}

/// |a - b| relative to max(1, |b|); infinite values must match exactly.
inline double scaled_gap(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : kInfinity;
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

inline double gap(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b ? 0.0 : kInfinity;
  return std::abs(a - b);
}

}  // namespace detail

// 1. Closed-form extremes equal the exhaustive pairing search.
inline SuiteResult suite_theorem(const VerifyConfig& c) {
  detail::Tally t("theorem", 1e-10);
  std::size_t misclassified = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kTheorem, n, k);
      for (const auto& spec : theorem_function_specs()) {
        const auto f = parse_function_spec(spec);
        const auto bf = brute_force_orbit_diagonal(p.rho, p.sigma, f);
        const auto lo = extremal_min(p.rho, p.sigma, f);
        const auto hi = extremal_max(p.rho, p.sigma, f);
        t.record(detail::gap(lo.value, bf.min_value));
        t.record(detail::gap(hi.value, bf.max_value));
        for (const auto& perm : bf.argmins) {
          if (!is_co_sorted(Pairing{perm, lo.pairing.rho_spectrum, lo.pairing.sigma_spectrum})) ++misclassified;
        }
        for (const auto& perm : bf.argmaxes) {
          if (!is_anti_sorted(Pairing{perm, hi.pairing.rho_spectrum, hi.pairing.sigma_spectrum})) ++misclassified;
        }
      }
    }
  }
  t.require(misclassified == 0);
  return t.finish("argmin/argmax pairings not co/anti-sorted: " + std::to_string(misclassified));
}

// 2. min - 1e-9 <= S_f(rho || U* sigma U) <= max + 1e-9 for Haar U, the
//    slack scaled by max(1, |min|, |max|).
inline SuiteResult suite_sandwich(const VerifyConfig& c) {
  detail::Tally t("sandwich", 1e-9);
  std::size_t violations = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kSandwich, n, k);
      Rng rng = make_stream(derive_seed(c.seed, detail::kSandwich, 0xabc), static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(k));
      for (const auto& spec : theorem_function_specs()) {
        const auto f = parse_function_spec(spec);
        const double lo = extremal_min(p.rho, p.sigma, f).value;
        double hi = extremal_max(p.rho, p.sigma, f).value;
        if (c.perturb) hi -= 0.05 * (hi - lo);
        for (int m = 0; m < c.haar_samples; ++m) {
          const double v = orbit_divergence(p.rho, p.sigma, f, haar_unitary(n, rng).matrix()).value;
          const double excess = std::max({0.0, lo - v, v - hi}) / std::max({1.0, std::abs(lo), std::abs(hi)});
          if (excess > 1e-9) ++violations;
          t.record(excess);
        }
      }
    }
  }
  return t.finish("violations: " + std::to_string(violations));
}

// 3. Best-of-restarts Riemannian search reaches the closed-form extremes.
inline SuiteResult suite_optimizer(const VerifyConfig& c) {
  detail::Tally t("optimizer", 1e-6);
  std::size_t degraded = 0;
  double worst_haar = 0.0;
  for (Index n = 2; n <= 4; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kOptimizer, n, k);
      for (const char* spec : {"t_log_t", "square", "pure_kernel:1"}) {
        const auto f = parse_function_spec(spec);
        const double lo = extremal_min(p.rho, p.sigma, f).value;
        const double hi = extremal_max(p.rho, p.sigma, f).value;
        const double scale = std::max(1.0, hi - lo);
        for (auto dir : {Direction::min, Direction::max}) {
          Rng rng = make_stream(derive_seed(c.seed, detail::kOptimizer, dir == Direction::min ? 1 : 2),
                                static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
          const auto tr = riemannian_optimize(p.rho, p.sigma, f, dir, c.restarts, rng);
          const double target = dir == Direction::min ? lo : hi;
          t.record(std::abs(tr.best_value - target) / scale);
          if (auto h = tr.best_haar_value()) worst_haar = std::max(worst_haar, std::abs(*h - target) / scale);
          const auto& seeded = tr.restarts.front();
          const bool worse = dir == Direction::min ? seeded.final_value > seeded.initial_value
                                                   : seeded.final_value < seeded.initial_value;
          if (worse) ++degraded;
        }
      }
    }
  }
  t.require(degraded == 0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "seeded restarts degraded: %zu; Haar-only worst %.3e", degraded, worst_haar);
  return t.finish(buf);
}

// 4. [U* sigma^-1 U, rho] = 0 at both closed-form extremizers.
inline SuiteResult suite_claims(const VerifyConfig& c) {
  detail::Tally t("claims", 1e-10);
  double generic_min = kInfinity;
  const auto f = make_t_log_t();
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kClaims, n, k);
      const auto lo = extremal_min(p.rho, p.sigma, f);
      const auto hi = extremal_max(p.rho, p.sigma, f);
      t.record(stationarity_residual(p.rho, p.sigma, lo.unitary, {}).commutator_a_rho);
      t.record(stationarity_residual(p.rho, p.sigma, hi.unitary, {}).commutator_a_rho);
      Rng rng = make_stream(derive_seed(c.seed, detail::kClaims, 7), static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(k));
      generic_min = std::min(generic_min,
                             stationarity_residual(p.rho, p.sigma, haar_unitary(n, rng), {}).commutator_a_rho);
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "smallest residual at a Haar unitary: %.3e", generic_min);
  return t.finish(buf);
}

// 5. Per-s kernel sums are extremal at the co-/anti-sorted pairings, and the
//    closed-form mixed partials match central differences.
inline SuiteResult suite_s_components(const VerifyConfig& c) {
  detail::Tally t("s-components", 1e-5);
  std::size_t order_failures = 0;
  std::size_t sign_failures = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kComponents, n, k);
      const RealVector r = descending_spectrum(p.rho);
      const RealVector mu = descending_spectrum(p.sigma);
      for (double s : {0.1, 1.0, 10.0}) {
        const auto co = claim_components(co_sorted_pairing(r, mu), s);
        const auto anti = claim_components(anti_sorted_pairing(r, mu), s);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        do {
          const auto v = claim_components(Pairing{perm, r, mu}, s);
          auto le = [](double a, double b) { return a <= b + 1e-12 * std::max(1.0, std::abs(b)); };
          // quotient and sigma: supermodular in (1/mu, r), minimal when mu is
          // co-sorted with r. rho: submodular, so the order flips.
          const bool ok = le(co.quotient, v.quotient) && le(v.quotient, anti.quotient) && le(anti.rho, v.rho) &&
                          le(v.rho, co.rho) && le(co.sigma, v.sigma) && le(v.sigma, anti.sigma) &&
                          le(co.quadratic, v.quadratic) && le(v.quadratic, anti.quadratic);
          if (!ok) ++order_failures;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  const double grid[] = {0.1, 1.0, 10.0};
  for (auto kind : {KernelKind::quotient, KernelKind::rho_term, KernelKind::sigma_term}) {
    for (double d : grid) {
      for (double r : grid) {
        for (double s : grid) {
          const double exact = kernel_cross_partial(kind, d, r, s);
          const double fd = detail::mixed_partial_fd(kind, d, r, s);
          t.record(std::abs(fd - exact) / std::abs(exact));
          const bool positive = exact > 0.0;
          if (positive != (modularity(kind) == Modularity::supermodular) || (fd > 0.0) != positive) ++sign_failures;
        }
      }
    }
  }
  t.require(order_failures == 0 && sign_failures == 0);
  return t.finish("pairing-order failures: " + std::to_string(order_failures) +
                  "; sign failures: " + std::to_string(sign_failures));
}

// 6. Direct and integral evaluation agree (1e-8 exact, 1e-4 quadrature).
inline SuiteResult suite_representation(const VerifyConfig& c) {
  detail::Tally t("representation", 1.0);  // residuals are divided by each tolerance
  double worst_exact = 0.0;
  double worst_quad = 0.0;
  const std::vector<std::string> specs = {"t_log_t",         "neg_log",          "square",          "pure_kernel:1",
                                          "power_alpha:0.5", "power_alpha:-0.5", "power_alpha:1.5", "power_alpha:2"};
  for (int k = 0; k < 50; ++k) {
    const Index n = 2 + k % 4;
    const auto p = detail::grid_pair(c, detail::kRepresentation, n, k);
    for (const auto& spec : specs) {
      const auto f = parse_function_spec(spec);
      const auto dr = s_hat_direct(p.rho, p.sigma, f);
      const auto ir = s_hat_integral(p.rho, p.sigma, f);
      const double diff = std::abs(dr.value - ir.value);
      const double tol = f.measure.exact() ? 1e-8 : 1e-4;
      (f.measure.exact() ? worst_exact : worst_quad) = std::max(f.measure.exact() ? worst_exact : worst_quad, diff);
      t.record(diff / tol);
      t.record(std::abs(ir.breakdown->total() - ir.value) / 1e-8);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "exact measures %.3e, quadrature measures %.3e", worst_exact, worst_quad);
  return t.finish(buf);
}

// 7. Tr sigma (X - I) = 0, Tr sigma (X - I)^2 = Tr(sigma^-1 rho^2) - 1, and
//    the trace-product bounds.
inline SuiteResult suite_trace_identities(const VerifyConfig& c) {
  detail::Tally t("trace-identities", 1e-10);
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kTraceIdentities, n, k);
      const auto r = trace_identity_residuals(p.rho, p.sigma);
      t.record(r.linear);
      t.record(r.quadratic / std::max(1.0, r.quadratic_scale));
    }
  }
  Rng rng = make_stream(derive_seed(c.seed, detail::kTraceIdentities, 1), 0);
  for (int k = 0; k < 500; ++k) {
    const Index n = 1 + k % 6;
    const auto a = random_hermitian(n, rng);
    const auto b = random_hermitian(n, rng);
    const auto bounds = trace_product_bounds(a, b);
    t.record(std::max({0.0, bounds.lower - bounds.value, bounds.value - bounds.upper}));
  }
  return t.finish();
}

// 8. Geodesic from U_min to U_max covers [min, max] without gaps above 5%.
inline SuiteResult suite_interval(const VerifyConfig& c) {
  detail::Tally t("interval", 0.05);
  std::size_t violations = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kInterval, n, k);
      Rng rng = make_stream(derive_seed(c.seed, detail::kInterval, 1), static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(k));
      for (const char* spec : {"t_log_t", "square", "power_alpha:0.5"}) {
        const auto rep = range_interval(p.rho, p.sigma, parse_function_spec(spec), 0, rng, 200);
        violations += rep.violations;
        t.record(rep.max_gap);
        t.record(rep.max_jump);
      }
    }
  }
  t.require(violations == 0);
  return t.finish("samples outside the interval: " + std::to_string(violations));
}

// 9. Invariance under joint conjugation and the commuting reduction,
//    relative to max(1, |value|).
inline SuiteResult suite_invariance(const VerifyConfig& c) {
  detail::Tally t("invariance", 1e-10);
  double rotated_worst = 0.0;
  const std::vector<std::string> specs = {"t_log_t",         "neg_log",          "square",          "pure_kernel:1",
                                          "power_alpha:0.5", "power_alpha:-0.5", "power_alpha:1.5", "power_alpha:2"};
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 4;
    const auto p = detail::grid_pair(c, detail::kInvariance, n, k);
    Rng rng = make_stream(derive_seed(c.seed, detail::kInvariance, 1), static_cast<std::uint64_t>(k));
    const Matrix u = haar_unitary(n, rng).matrix();
    // Commuting pairs: diagonal, and rotated into the shared eigenbasis u.
    const RealVector pr = p.rho.eigenvalues();
    const RealVector ps = p.sigma.eigenvalues().reverse();
    const DensityState dr = DensityState::diagonal(std::span<const double>(pr.data(), pr.size()));
    const DensityState ds = DensityState::diagonal(std::span<const double>(ps.data(), ps.size()));
    const DensityState cr(HermitianMatrix(u * pr.cast<complex>().asDiagonal() * u.adjoint()), 1e-9);
    const DensityState cs(HermitianMatrix(u * ps.cast<complex>().asDiagonal() * u.adjoint()), 1e-9);
    for (const auto& spec : specs) {
      const auto f = parse_function_spec(spec);
      const double base = s_hat_direct(p.rho, p.sigma, f).value;
      const double moved = s_hat_direct(p.rho.conjugated_by(u.adjoint()), p.sigma.conjugated_by(u.adjoint()), f).value;
      t.record(detail::scaled_gap(moved, base));
      double classical = 0.0;
      for (Index i = 0; i < n; ++i) classical += ps(i) * f(pr(i) / ps(i));
      t.record(detail::scaled_gap(s_hat_direct(dr, ds, f).value, classical));
      rotated_worst = std::max(rotated_worst, detail::scaled_gap(s_hat_direct(cr, cs, f).value, classical));
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "rotated commuting pairs (not gated): %.3e", rotated_worst);
  return t.finish(buf);
}

// 10. Hockey-stick sanity and the D_f truncation bound.
inline SuiteResult suite_hockey_stick(const VerifyConfig& c) {
  detail::Tally t("hockey-stick", 1e-10);
  std::size_t truncation_failures = 0;
  for (Index n = 2; n <= 5; ++n) {
    for (int k = 0; k < c.pairs; ++k) {
      const auto p = detail::grid_pair(c, detail::kHockey, n, k);
      for (double s : {1.0, 1.5, 2.0, 10.0}) t.record(hockey_stick(p.rho, p.rho, s));
      const RealVector sv = Eigen::JacobiSVD<Matrix>(p.rho.matrix() - p.sigma.matrix()).singularValues();
      t.record(std::abs(hockey_stick(p.rho, p.sigma, 1.0) - 0.5 * sv.sum()));
      for (const char* spec : {"t_log_t", "square", "power_alpha:0.5"}) {
        const auto f = parse_function_spec(spec);
        t.record(std::abs(d_f_hockey(p.rho, p.rho, f).value));
        const auto full = d_f_hockey(p.rho, p.sigma, f);
        const double s_full = std::max(full.s_max / 2.0, 2.5);
        const auto wide = d_f_hockey(p.rho, p.sigma, f, {s_full});
        const auto half = d_f_hockey(p.rho, p.sigma, f, {s_full / 2.0});
        const double change = std::abs(wide.value - half.value);
        const double budget = half.tail_bound + wide.tail_bound + wide.error_estimate + half.error_estimate + 1e-12;
        if (!(change <= budget)) ++truncation_failures;
      }
    }
  }
  t.require(truncation_failures == 0);
  return t.finish("truncation-halving failures: " + std::to_string(truncation_failures));
}

inline SuiteResult run_suite(const std::string& name, const VerifyConfig& c) {
  static const std::vector<std::pair<std::string, std::function<SuiteResult(const VerifyConfig&)>>> table = {
      {"theorem", suite_theorem},
      {"sandwich", suite_sandwich},
      {"optimizer", suite_optimizer},
      {"claims", suite_claims},
      {"s-components", suite_s_components},
      {"representation", suite_representation},
      {"trace-identities", suite_trace_identities},
      {"interval", suite_interval},
      {"invariance", suite_invariance},
      {"hockey-stick", suite_hockey_stick}};
  for (const auto& [n, fn] : table) {
    if (n == name) return fn(c);
  }
  fail(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
}

}  // namespace qfdiv
