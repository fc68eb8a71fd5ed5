#pragma once

// Extremes of U -> S_f(rho || U* sigma U) over the unitary group.
//
// Both extremes are attained on unitaries that make rho and U* sigma U
// commute, so they reduce to classical sums over pairings of the spectra:
// the co-sorted pairing gives the minimum (U_min = W_desc V_desc*) and the
// anti-sorted pairing the maximum (U_max = W_asc V_desc*), where
// rho = V diag V* and sigma = W diag W*.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/divergence.hpp"
#include "qfdiv/functions.hpp"
#include "qfdiv/hermitian.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

inline constexpr int kMaxBruteForceDim = 8;
inline constexpr double kTieTolerance = 1e-12;

/// r_i (descending) paired with mu[permutation[i]] (mu descending).
struct Pairing {
  std::vector<int> permutation;
  RealVector rho_spectrum;
  RealVector sigma_spectrum;

  Index size() const noexcept { return rho_spectrum.size(); }
  double paired_sigma(Index i) const { return sigma_spectrum(permutation[static_cast<std::size_t>(i)]); }
};

inline RealVector descending_spectrum(const DensityState& s) {
  RealVector v = s.eigenvalues().reverse();
  return v.cwiseMax(0.0);
}

inline Pairing make_pairing(const RealVector& r_desc, const RealVector& mu_desc, std::vector<int> permutation) {
  const auto n = static_cast<std::size_t>(r_desc.size());
  if (static_cast<std::size_t>(mu_desc.size()) != n || permutation.size() != n) {
    fail(ErrorCode::LengthMismatch, "pairing spectra and permutation must have equal length");
  }
  std::vector<int> seen(n, 0);
  for (int p : permutation) {
    if (p < 0 || static_cast<std::size_t>(p) >= n || seen[static_cast<std::size_t>(p)]++) {
      fail(ErrorCode::InvalidArgument, "pairing permutation is not a bijection");
    }
  }
  return Pairing{std::move(permutation), r_desc, mu_desc};
}

inline Pairing co_sorted_pairing(const RealVector& r_desc, const RealVector& mu_desc) {
  std::vector<int> p(static_cast<std::size_t>(r_desc.size()));
  std::iota(p.begin(), p.end(), 0);
  return make_pairing(r_desc, mu_desc, std::move(p));
}

inline Pairing anti_sorted_pairing(const RealVector& r_desc, const RealVector& mu_desc) {
  std::vector<int> p(static_cast<std::size_t>(r_desc.size()));
  std::iota(p.rbegin(), p.rend(), 0);
  return make_pairing(r_desc, mu_desc, std::move(p));
}

/// Every i < j with r_i above r_j by more than tol has mu_pi(i) >= mu_pi(j)
/// (co-sorted) or <= (anti-sorted), up to tol. Ties in r form free blocks.
inline bool is_co_sorted(const Pairing& p, double tolerance = kTieTolerance) {
  for (Index i = 0; i < p.size(); ++i) {
    for (Index j = i + 1; j < p.size(); ++j) {
      if (p.rho_spectrum(i) - p.rho_spectrum(j) > tolerance && p.paired_sigma(i) < p.paired_sigma(j) - tolerance) {
        return false;
      }
    }
  }
  return true;
}

inline bool is_anti_sorted(const Pairing& p, double tolerance = kTieTolerance) {
  for (Index i = 0; i < p.size(); ++i) {
    for (Index j = i + 1; j < p.size(); ++j) {
      if (p.rho_spectrum(i) - p.rho_spectrum(j) > tolerance && p.paired_sigma(i) > p.paired_sigma(j) + tolerance) {
        return false;
      }
    }
  }
  return true;
}

/// Classical divergence sum_i mu_i f(r_i / mu_i) of two nonnegative vectors.
/// Zero or out-of-domain entries go through the same eps-regularization as
/// the matrix divergence, applied entrywise.
inline DivergenceResult classical_divergence(const RealVector& r, const RealVector& mu, const OperatorConvexFunction& f,
                                             const std::vector<double>& schedule = default_epsilon_schedule(),
                                             double conv_tol = kRegularizationTolerance) {
  if (r.size() != mu.size()) fail(ErrorCode::LengthMismatch, "classical divergence needs equal lengths");
  const double mu_top = std::max(mu.maxCoeff(), std::numeric_limits<double>::min());
  const double r_top = std::max(r.maxCoeff(), std::numeric_limits<double>::min());
  DivergenceResult res;
  if (mu.minCoeff() > tol::rank * mu_top) {
    try {
      double v = 0.0;
      for (Index i = 0; i < r.size(); ++i) {
        const double ri = r(i) <= tol::rank * r_top ? 0.0 : r(i);
        v += mu(i) * f.eval_nonnegative(ri / mu(i));
      }
      res.value = v;
      res.method = Method::direct;
      return res;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainViolation) throw;
    }
  }
  detail::check_schedule(schedule);
  res.method = Method::regularized;
  for (double eps : schedule) {
    double v = 0.0;
    for (Index i = 0; i < r.size(); ++i) v += (mu(i) + eps) * f.eval((r(i) + eps) / (mu(i) + eps));
    res.epsilon_trace.emplace_back(eps, v);
  }
  const auto& tr = res.epsilon_trace;
  res.converged = detail::regularized_converged(tr[tr.size() - 2].second, tr.back().second, conv_tol);
  res.value = res.converged ? tr.back().second : kInfinity;
  return res;
}

inline DivergenceResult pairing_value(const Pairing& p, const OperatorConvexFunction& f) {
  RealVector mu(p.size());
  for (Index i = 0; i < p.size(); ++i) mu(i) = p.paired_sigma(i);
  return classical_divergence(p.rho_spectrum, mu, f);
}

struct ExtremalResult {
  double value = 0.0;
  UnitaryMatrix unitary = UnitaryMatrix::identity(1);
  Pairing pairing;
  Method method = Method::direct;
};

namespace detail {

struct OrbitFrames {
  SpectralDecomposition rho;
  SpectralDecomposition sigma;
  RealVector r_desc;
  RealVector mu_desc;
};

inline OrbitFrames orbit_frames(const DensityState& rho, const DensityState& sigma) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  return {eig_hermitian(rho.hermitian()), eig_hermitian(sigma.hermitian()), descending_spectrum(rho),
          descending_spectrum(sigma)};
}

}  // namespace detail

inline ExtremalResult extremal_min(const DensityState& rho, const DensityState& sigma, const OperatorConvexFunction& f) {
  const auto fr = detail::orbit_frames(rho, sigma);
  Pairing p = co_sorted_pairing(fr.r_desc, fr.mu_desc);
  const auto v = pairing_value(p, f);
  const Matrix u = fr.sigma.diagonalizer_desc.matrix() * fr.rho.diagonalizer_desc.matrix().adjoint();
  return {v.value, UnitaryMatrix(u, 1e-9), std::move(p), v.method};
}

inline ExtremalResult extremal_max(const DensityState& rho, const DensityState& sigma, const OperatorConvexFunction& f) {
  const auto fr = detail::orbit_frames(rho, sigma);
  Pairing p = anti_sorted_pairing(fr.r_desc, fr.mu_desc);
  const auto v = pairing_value(p, f);
  const Matrix u = fr.sigma.diagonalizer_asc.matrix() * fr.rho.diagonalizer_desc.matrix().adjoint();
  return {v.value, UnitaryMatrix(u, 1e-9), std::move(p), v.method};
}

/// S_f(rho || U* sigma U).
inline DivergenceResult orbit_divergence(const DensityState& rho, const DensityState& sigma,
                                         const OperatorConvexFunction& f, const Matrix& u) {
  return s_hat(rho, sigma.conjugated_by(u), f);
}

struct BruteForceResult {
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<std::vector<int>> argmins;
  std::vector<std::vector<int>> argmaxes;
  std::size_t evaluated = 0;
};

/// Exhaustive search over all n! pairings of the spectra; ties within
/// kTieTolerance (relative, floored at 1) are reported together.
inline BruteForceResult brute_force_orbit_diagonal(const DensityState& rho, const DensityState& sigma,
                                                   const OperatorConvexFunction& f) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (rho.dim() > kMaxBruteForceDim) {
    fail(ErrorCode::DimensionTooLargeForBruteForce,
         "brute force is limited to n <= " + std::to_string(kMaxBruteForceDim));
  }
  const RealVector r = descending_spectrum(rho);
  const RealVector mu = descending_spectrum(sigma);
  std::vector<int> perm(static_cast<std::size_t>(r.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<std::vector<int>, double>> all;
  do {
    all.emplace_back(perm, pairing_value(Pairing{perm, r, mu}, f).value);
  } while (std::next_permutation(perm.begin(), perm.end()));

  BruteForceResult out;
  out.evaluated = all.size();
  out.min_value = kInfinity;
  out.max_value = -kInfinity;
  for (const auto& [p, v] : all) {
    out.min_value = std::min(out.min_value, v);
    out.max_value = std::max(out.max_value, v);
  }
  auto tied = [](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::abs(b));
  };
  for (const auto& [p, v] : all) {
    if (tied(v, out.min_value)) out.argmins.push_back(p);
    if (tied(v, out.max_value)) out.argmaxes.push_back(p);
  }
  return out;
}

/// Per-s sums on a commuting pairing with a_i = 1/mu_pi(i):
///   quotient  sum a r^2 / (a r + s)
///   rho       sum r / (a r + s)
///   sigma     sum a^-1 / (a r + s)
///   quadratic sum a r^2
struct ClaimComponents {
  double quotient = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
  double quadratic = 0.0;
};

inline ClaimComponents claim_components(const Pairing& p, double s) {
  if (!(s >= 0.0)) fail(ErrorCode::InvalidArgument, "claim_components requires s >= 0");
  ClaimComponents c;
  for (Index i = 0; i < p.size(); ++i) {
    const double r = p.rho_spectrum(i);
    const double mu = p.paired_sigma(i);
    if (!(r > 0.0) || !(mu > 0.0)) fail(ErrorCode::InvalidArgument, "claim_components requires positive spectra");
    const double a = 1.0 / mu;
    const double den = a * r + s;
    c.quotient += a * r * r / den;
    c.rho += r / den;
    c.sigma += mu / den;
    c.quadratic += a * r * r;
  }
  return c;
}

struct SComponentsRow {
  double s;
  ClaimComponents co_sorted;
  ClaimComponents anti_sorted;
};

struct OrbitExtremalReport {
  std::string function;
  double min_value = 0.0;
  double max_value = 0.0;
  UnitaryMatrix u_min = UnitaryMatrix::identity(1);
  UnitaryMatrix u_max = UnitaryMatrix::identity(1);
  Pairing min_pairing;
  Pairing max_pairing;
  Method method = Method::direct;
  // |S_f(rho || U* sigma U) - value| at each extremizer.
  double min_certification = 0.0;
  double max_certification = 0.0;
  // ||[U* sigma^-1 U, rho]||_F at each extremizer (full-rank sigma only).
  std::optional<double> min_commutator;
  std::optional<double> max_commutator;
  std::vector<SComponentsRow> per_s_components;
};

namespace detail {

inline double certification_gap(double expected, const DivergenceResult& got) {
  if (std::isinf(expected) || std::isinf(got.value)) return expected == got.value ? 0.0 : kInfinity;
  return std::abs(expected - got.value);
}

inline double extremizer_commutator(const DensityState& rho, const DensityState& sigma, const Matrix& u) {
  const Matrix a = u.adjoint() * sigma.matrix().partialPivLu().inverse() * u;
  return frobenius_norm(commutator(a, rho.matrix()));
}

}  // namespace detail

/// Closed-form extremes with certification by direct evaluation at the
/// extremizers. per-s rows default to the measure atoms when the measure is
/// exact; pass s_nodes to choose them explicitly.
inline OrbitExtremalReport orbit_extremal_report(const DensityState& rho, const DensityState& sigma,
                                                 const OperatorConvexFunction& f,
                                                 std::optional<std::vector<double>> s_nodes = std::nullopt) {
  auto lo = extremal_min(rho, sigma, f);
  auto hi = extremal_max(rho, sigma, f);
  OrbitExtremalReport rep;
  rep.function = f.spec();
  rep.min_value = lo.value;
  rep.max_value = hi.value;
  rep.method = lo.method == Method::regularized || hi.method == Method::regularized ? Method::regularized
                                                                                     : Method::direct;
  rep.min_certification = detail::certification_gap(lo.value, orbit_divergence(rho, sigma, f, lo.unitary.matrix()));
  rep.max_certification = detail::certification_gap(hi.value, orbit_divergence(rho, sigma, f, hi.unitary.matrix()));
  if (sigma.full_rank()) {
    rep.min_commutator = detail::extremizer_commutator(rho, sigma, lo.unitary.matrix());
    rep.max_commutator = detail::extremizer_commutator(rho, sigma, hi.unitary.matrix());
  }
  if (!s_nodes && f.measure.exact()) {
    s_nodes.emplace();
    for (const auto& a : f.measure.atoms) s_nodes->push_back(a.s);
  }
  if (s_nodes && rho.full_rank() && sigma.full_rank()) {
    for (double s : *s_nodes) {
      rep.per_s_components.push_back({s, claim_components(lo.pairing, s), claim_components(hi.pairing, s)});
    }
  }
  rep.u_min = std::move(lo.unitary);
  rep.u_max = std::move(hi.unitary);
  rep.min_pairing = std::move(lo.pairing);
  rep.max_pairing = std::move(hi.pairing);
  return rep;
}

// ---------------------------------------------------------------------------
// Range of the orbit map

struct IntervalReport {
  double min_value = 0.0;
  double max_value = 0.0;
  std::vector<double> haar_values;
  std::vector<double> geodesic_values;  // U_min exp(t L), t = k / steps
  std::size_t violations = 0;           // samples outside [min - slack, max + slack]; slack is
                                        // kIntervalSlack scaled by max(1, |min|, |max|)
  double max_gap = 0.0;                 // largest gap in the sorted samples / (max - min)
  double max_jump = 0.0;                // largest consecutive geodesic step / (max - min)
};

inline constexpr double kIntervalSlack = 1e-9;

/// Haar samples plus the geodesic from U_min to U_max with generator
/// L = log(U_min* U_max). Fractions are reported as 0 when max = min.
inline IntervalReport range_interval(const DensityState& rho, const DensityState& sigma,
                                     const OperatorConvexFunction& f, int samples, Rng& rng, int steps = 200) {
  if (!sigma.full_rank()) fail(ErrorCode::SingularSigma, "range_interval requires full-rank sigma");
  if (samples < 0 || steps < 1) fail(ErrorCode::InvalidArgument, "range_interval needs samples >= 0, steps >= 1");
  const auto lo = extremal_min(rho, sigma, f);
  const auto hi = extremal_max(rho, sigma, f);
  IntervalReport rep;
  rep.min_value = lo.value;
  rep.max_value = hi.value;

  auto value_at = [&](const Matrix& u) { return orbit_divergence(rho, sigma, f, u).value; };
  for (int k = 0; k < samples; ++k) rep.haar_values.push_back(value_at(haar_unitary(rho.dim(), rng).matrix()));
  const Matrix& u0 = lo.unitary.matrix();
  const Matrix gen = unitary_logarithm(u0.adjoint() * hi.unitary.matrix());
  for (int k = 0; k <= steps; ++k) {
    rep.geodesic_values.push_back(value_at(u0 * skew_exponential(gen, static_cast<double>(k) / steps)));
  }

  const double slack = kIntervalSlack * std::max({1.0, std::abs(rep.min_value), std::abs(rep.max_value)});
  auto inside = [&](double v) { return v >= rep.min_value - slack && v <= rep.max_value + slack; };
  for (double v : rep.haar_values) rep.violations += inside(v) ? 0 : 1;
  for (double v : rep.geodesic_values) rep.violations += inside(v) ? 0 : 1;

  const double width = rep.max_value - rep.min_value;
  if (width > 0.0 && std::isfinite(width)) {
    std::vector<double> all = rep.haar_values;
    all.insert(all.end(), rep.geodesic_values.begin(), rep.geodesic_values.end());
    all.push_back(rep.min_value);
    all.push_back(rep.max_value);
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i) {
      const double a = std::clamp(all[i - 1], rep.min_value, rep.max_value);
      const double b = std::clamp(all[i], rep.min_value, rep.max_value);
      rep.max_gap = std::max(rep.max_gap, (b - a) / width);
    }
    for (std::size_t i = 1; i < rep.geodesic_values.size(); ++i) {
      rep.max_jump = std::max(rep.max_jump, std::abs(rep.geodesic_values[i] - rep.geodesic_values[i - 1]) / width);
    }
  }
  return rep;
}

}  // namespace qfdiv
