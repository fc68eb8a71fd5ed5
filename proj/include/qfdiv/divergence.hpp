#pragma once

// Maximal quantum f-divergence
//
//   S_f(rho||sigma) = Tr[ sigma f(sigma^-1/2 rho sigma^-1/2) ]
//
// evaluated by functional calculus, by the integral representation of f, and
// as the eps -> 0 limit of S_f(rho + eps I || sigma + eps I) for singular
// inputs; plus the hockey-stick divergence E_s and the D_f integral built on
// it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qfdiv/functions.hpp"
#include "qfdiv/hermitian.hpp"
#include "qfdiv/quadrature.hpp"

namespace qfdiv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Method { direct, integral, regularized };

constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::direct: return "direct";
    case Method::integral: return "integral";
    case Method::regularized: return "regularized";
  }
  return "direct";
}

/// Per-s terms of Tr[sigma (X-I)^2 (X+sI)^-1] = quotient - 2 rho + sigma.
struct SNodeTerms {
  double s;
  double weight;
  double quotient;   // Tr[sigma^1/2 X^2 Y sigma^1/2]
  double rho;        // Tr[sigma^1/2 X Y sigma^1/2]
  double sigma;      // Tr[sigma^1/2 Y sigma^1/2]
  double integrand;  // Tr[sigma^1/2 (X-I) Y (X-I) sigma^1/2]
};

struct TermBreakdown {
  double constant = 0.0;   // f(1) Tr sigma
  double linear = 0.0;     // f'(1) (Tr rho - Tr sigma)
  double quadratic = 0.0;  // c (Tr[rho sigma^-1 rho] - 2 Tr rho + Tr sigma)
  double integral = 0.0;   // sum_k w_k integrand_k
  std::vector<SNodeTerms> nodes;

  double total() const { return constant + linear + quadratic + integral; }
};

struct DivergenceResult {
  double value = 0.0;  // may be +inf
  Method method = Method::direct;
  std::vector<std::pair<double, double>> epsilon_trace;  // (eps, value)
  std::optional<TermBreakdown> breakdown;
  bool converged = true;
  double imaginary_residual = 0.0;
  double tail_bound = 0.0;  // quadrature truncation bound (integral method)

  bool finite() const noexcept { return std::isfinite(value); }
};

namespace detail {

struct SigmaRoots {
  Matrix half;
  Matrix inv_half;
};

/// sigma^{1/2} and sigma^{-1/2}; throws SingularSigma if sigma is not
/// positive definite to within tol::rank.
inline SigmaRoots sigma_roots(const Matrix& sigma) {
  const Eigenpairs ep = eigenpairs(sigma);
  const double top = std::max(std::abs(ep.values(ep.values.size() - 1)), std::numeric_limits<double>::min());
  if (ep.values(0) <= tol::rank * top) {
    fail(ErrorCode::SingularSigma, "sigma is not full rank (min eigenvalue " + std::to_string(ep.values(0)) +
                                       "); use the regularized divergence");
  }
  RealVector sq = ep.values.cwiseSqrt();
  RealVector isq = sq.cwiseInverse();
  return {ep.vectors * sq.asDiagonal() * ep.vectors.adjoint(), ep.vectors * isq.asDiagonal() * ep.vectors.adjoint()};
}

inline Matrix likelihood_ratio(const Matrix& rho, const Matrix& sigma_inv_half) {
  Matrix x = sigma_inv_half * rho * sigma_inv_half;
  return 0.5 * (x + x.adjoint());
}

/// Tr[sigma f(X)] for positive semidefinite rho and positive definite sigma.
/// Eigenvalues of X below tol::rank of the largest are treated as zero.
inline std::pair<double, double> s_hat_matrices(const Matrix& rho, const Matrix& sigma,
                                                const OperatorConvexFunction& f) {
  const SigmaRoots roots = sigma_roots(sigma);
  const Eigenpairs ep = eigenpairs(likelihood_ratio(rho, roots.inv_half));
  const double top = std::max(std::abs(ep.values(ep.values.size() - 1)), std::numeric_limits<double>::min());
  RealVector fx(ep.values.size());
  for (Index i = 0; i < ep.values.size(); ++i) {
    double x = ep.values(i);
    if (x <= tol::rank * top) x = 0.0;
    fx(i) = f.eval_nonnegative(x);
  }
  const Matrix fX = ep.vectors * fx.asDiagonal() * ep.vectors.adjoint();
  const complex tr = (sigma * fX).trace();
  return {tr.real(), std::abs(tr.imag())};
}

}  // namespace detail

inline DivergenceResult s_hat_direct(const DensityState& rho, const DensityState& sigma,
                                     const OperatorConvexFunction& f) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (!sigma.full_rank()) {
    fail(ErrorCode::SingularSigma, "sigma has rank " + std::to_string(sigma.rank()) + " < " +
                                       std::to_string(sigma.dim()) + "; use s_hat_regularized");
  }
  const auto [value, imag] = detail::s_hat_matrices(rho.matrix(), sigma.matrix(), f);
  DivergenceResult r;
  r.value = value;
  r.method = Method::direct;
  r.imaginary_residual = imag;
  return r;
}

/// Integral-representation route. Each s-term is evaluated with an explicit
/// inverse (X + sI)^-1 rather than the spectral decomposition of X.
inline DivergenceResult s_hat_integral(const DensityState& rho, const DensityState& sigma,
                                       const OperatorConvexFunction& f) {
  if (!f.measure.available()) {
    fail(ErrorCode::MeasureUnavailable, f.name + " has no representation data");
  }
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (!sigma.full_rank()) fail(ErrorCode::SingularSigma, "s_hat_integral requires full-rank sigma");

  const Matrix& r = rho.matrix();
  const Matrix& sg = sigma.matrix();
  const Index n = r.rows();
  const auto roots = detail::sigma_roots(sg);
  const Matrix x = detail::likelihood_ratio(r, roots.inv_half);
  const Matrix x2 = x * x;
  const Matrix id = Matrix::Identity(n, n);
  const Matrix xm = x - id;
  const Matrix sigma_inv = sg.partialPivLu().inverse();

  const double tr_rho = r.trace().real();
  const double tr_sigma = sg.trace().real();

  TermBreakdown b;
  b.constant = f.f_at_1 * tr_sigma;
  b.linear = f.fprime_at_1 * (tr_rho - tr_sigma);
  b.quadratic = f.quad_coeff * ((r * sigma_inv * r).trace().real() - 2.0 * tr_rho + tr_sigma);

  std::vector<double> weighted;
  weighted.reserve(f.measure.atoms.size());
  for (const auto& atom : f.measure.atoms) {
    const Matrix y = (x + atom.s * id).partialPivLu().inverse();
    auto sandwich = [&](const Matrix& m) { return (roots.half * m * roots.half).trace().real(); };
    SNodeTerms t;
    t.s = atom.s;
    t.weight = atom.weight;
    t.quotient = sandwich(x2 * y);
    t.rho = sandwich(x * y);
    t.sigma = sandwich(y);
    t.integrand = sandwich(xm * y * xm);
    weighted.push_back(atom.weight * t.integrand);
    b.nodes.push_back(t);
  }
  b.integral = pairwise_sum(weighted);

  DivergenceResult res;
  res.method = Method::integral;
  res.value = b.total();
  if (!f.measure.exact()) {
    // Truncation bound, weighted by the spectral measure of X under sigma.
    const Eigenpairs ep = eigenpairs(x);
    for (Index j = 0; j < n; ++j) {
      const double q = (ep.vectors.col(j).adjoint() * sg * ep.vectors.col(j))(0, 0).real();
      res.tail_bound += q * f.measure.tail_bound(std::max(ep.values(j), std::numeric_limits<double>::min()));
    }
  }
  res.breakdown = std::move(b);
  return res;
}

inline std::vector<double> default_epsilon_schedule() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}; }

inline constexpr double kRegularizationTolerance = 1e-6;

namespace detail {

inline bool regularized_converged(double previous, double current, double conv_tol) {
  return std::abs(current - previous) < conv_tol * std::max(1.0, std::abs(current));
}

inline void check_schedule(const std::vector<double>& schedule) {
  if (schedule.size() < 2) fail(ErrorCode::InvalidArgument, "epsilon schedule needs at least two values");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
      fail(ErrorCode::InvalidArgument, "epsilon schedule must be positive and strictly decreasing");
    }
  }
}

}  // namespace detail

/// lim_{eps -> 0} S_f(rho + eps I || sigma + eps I), without renormalizing
/// the trace. Converged when the last two schedule values agree to conv_tol
/// (relative, floored at 1); otherwise the limit is reported as +inf.
inline DivergenceResult s_hat_regularized(const DensityState& rho, const DensityState& sigma,
                                          const OperatorConvexFunction& f,
                                          const std::vector<double>& schedule = default_epsilon_schedule(),
                                          double conv_tol = kRegularizationTolerance) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  detail::check_schedule(schedule);
  const Index n = rho.dim();
  const Matrix id = Matrix::Identity(n, n);
  DivergenceResult res;
  res.method = Method::regularized;
  for (double eps : schedule) {
    const auto [v, imag] = detail::s_hat_matrices(rho.matrix() + eps * id, sigma.matrix() + eps * id, f);
    res.epsilon_trace.emplace_back(eps, v);
    res.imaginary_residual = std::max(res.imaginary_residual, imag);
  }
  const auto& tr = res.epsilon_trace;
  const double last = tr.back().second;
  const double prev = tr[tr.size() - 2].second;
  res.converged = detail::regularized_converged(prev, last, conv_tol);
  res.value = res.converged ? last : kInfinity;
  return res;
}

/// Direct evaluation when it is defined; the regularized limit when sigma is
/// singular or f is unbounded at a zero eigenvalue of the likelihood ratio.
inline DivergenceResult s_hat(const DensityState& rho, const DensityState& sigma, const OperatorConvexFunction& f) {
  if (sigma.full_rank()) {
    try {
      return s_hat_direct(rho, sigma, f);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainViolation && e.code() != ErrorCode::SingularSigma) throw;
    }
  }
  return s_hat_regularized(rho, sigma, f);
}

// ---------------------------------------------------------------------------
// Hockey-stick divergence

/// E_s(rho||sigma) = Tr[(rho - s sigma)_+].
inline double hockey_stick(const DensityState& rho, const DensityState& sigma, double s) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (!(s >= 0.0)) fail(ErrorCode::InvalidArgument, "hockey_stick requires s >= 0");
  return positive_trace(rho.matrix() - s * sigma.matrix());
}

struct HockeyQuadrature {
  /// Truncation of the s-integral; the u = 1/s integral is truncated at
  /// 1/s_max. Defaults to twice the support of E_s when that is finite.
  std::optional<double> s_max;
  int nodes = 16;  // per panel; the error estimate compares with 2 * nodes
  double tolerance = 1e-9;
};

struct HockeyResult {
  double value = 0.0;
  double tail_bound = 0.0;      // bound on the truncated tails
  double error_estimate = 0.0;  // Gauss-Legendre n vs 2n difference
  double s_max = 0.0;
};

namespace detail {

/// Generalized eigenvalues g of (rho, sigma): the points where rho - g sigma
/// is singular; empty when both states are singular.
inline std::vector<double> generalized_eigenvalues(const DensityState& rho, const DensityState& sigma) {
  std::vector<double> g;
  if (sigma.full_rank()) {
    const auto roots = sigma_roots(sigma.matrix());
    const RealVector ev = eigenvalues_asc(likelihood_ratio(rho.matrix(), roots.inv_half));
    for (Index i = 0; i < ev.size(); ++i) g.push_back(std::max(ev(i), 0.0));
  } else if (rho.full_rank()) {
    const auto roots = sigma_roots(rho.matrix());
    const RealVector ev = eigenvalues_asc(likelihood_ratio(sigma.matrix(), roots.inv_half));
    for (Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > tol::rank * ev(ev.size() - 1)) g.push_back(1.0 / ev(i));
    }
  }
  std::sort(g.begin(), g.end());
  return g;
}

/// Integral over [a, b] of h(t) dt, panels of width <= 1 between the given
/// interior breakpoints. Returns (value, |n-point - 2n-point|).
template <class H>
std::pair<double, double> integrate_log_panels(H&& h, double a, double b, const std::vector<double>& cuts,
                                               int nodes) {
  if (!(b > a)) return {0.0, 0.0};
  std::vector<double> breaks{a};
  for (double c : cuts) {
    if (c > a && c < b) breaks.push_back(c);
  }
  breaks.push_back(b);
  std::vector<double> panels{breaks.front()};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len)));
    for (int p = 1; p <= pieces; ++p) panels.push_back(breaks[i] + len * p / pieces);
  }
  std::vector<double> coarse;
  std::vector<double> fine;
  for (const auto& q : composite_gauss_legendre(panels, nodes)) coarse.push_back(q.w * h(q.x));
  for (const auto& q : composite_gauss_legendre(panels, 2 * nodes)) fine.push_back(q.w * h(q.x));
  const double c = pairwise_sum(coarse);
  const double fv = pairwise_sum(fine);
  return {fv, std::abs(fv - c)};
}

}  // namespace detail

/// D_f(rho||sigma) = int_1^inf f''(s) E_s(rho||sigma)
///                     + s^-3 f''(1/s) E_s(sigma||rho) ds.
/// The second term is integrated as int_0^1 f''(u) Tr[(u sigma - rho)_+] du
/// (u = 1/s). Both pieces are split at the generalized eigenvalues of
/// (rho, sigma), where E_s has kinks, and integrated in log scale.
/// Only f'' enters, so affine parts of f are irrelevant.
inline HockeyResult d_f_hockey(const DensityState& rho, const DensityState& sigma, const OperatorConvexFunction& f,
                               const HockeyQuadrature& quad = {}) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (!f.second_derivative || !f.derivative) {
    fail(ErrorCode::InvalidArgument, f.name + " has no closed-form derivatives");
  }
  const auto g = detail::generalized_eigenvalues(rho, sigma);
  // E_s(rho||sigma) vanishes for s >= s_star; Tr[(u sigma - rho)_+] for u <= u_star.
  const double s_star = sigma.full_rank() && !g.empty() ? g.back() : kInfinity;
  const double u_star = rho.full_rank() && !g.empty() ? g.front() : 0.0;

  double s_max = 0.0;
  if (quad.s_max) {
    s_max = *quad.s_max;
  } else if (std::isfinite(s_star)) {
    s_max = 2.0 * std::max({s_star, 1.0, u_star > 0.0 ? 1.0 / u_star : 1.0});
  } else {
    s_max = 1e6;
  }
  if (!(s_max > 1.0)) fail(ErrorCode::InvalidArgument, "d_f_hockey requires s_max > 1");

  std::vector<double> cuts;
  for (double v : g) {
    if (v > 0.0) cuts.push_back(std::log(v));
  }
  const Matrix& r = rho.matrix();
  const Matrix& sg = sigma.matrix();

  auto upper_integrand = [&](double t) {
    const double s = std::exp(t);
    return s * f.second_derivative(s) * positive_trace(r - s * sg);
  };
  auto lower_integrand = [&](double t) {
    const double u = std::exp(t);
    return u * f.second_derivative(u) * positive_trace(u * sg - r);
  };

  const double s_hi = std::min(s_max, s_star);
  const double u_lo = std::max(u_star, 1.0 / s_max);
  const auto [upper, upper_err] =
      s_hi > 1.0 ? detail::integrate_log_panels(upper_integrand, 0.0, std::log(s_hi), cuts, quad.nodes)
                 : std::pair<double, double>{0.0, 0.0};
  const auto [lower, lower_err] =
      u_lo < 1.0 ? detail::integrate_log_panels(lower_integrand, std::log(u_lo), 0.0, cuts, quad.nodes)
                 : std::pair<double, double>{0.0, 0.0};

  HockeyResult res;
  res.s_max = s_max;
  res.value = upper + lower;
  res.error_estimate = upper_err + lower_err;

  // E_s is nonincreasing in s, so the dropped upper piece is at most
  // E_{s_max} (f'(s_star) - f'(s_max)).
  if (s_max < s_star) {
    const double e = positive_trace(r - s_max * sg);
    if (e > 0.0) {
      res.tail_bound += std::isfinite(s_star) ? e * (f.derivative(s_star) - f.derivative(s_max)) : kInfinity;
    }
  }
  // Dropped lower piece: Tr[(u sigma - rho)_+] <= Tr[(u_lo sigma - rho)_+] on
  // (u_star, u_lo), and <= u Tr sigma near zero.
  if (u_lo > u_star) {
    if (u_star > 0.0) {
      res.tail_bound += positive_trace(u_lo * sg - r) * (f.derivative(u_lo) - f.derivative(u_star));
    } else if (f.moment_at_zero) {
      res.tail_bound += sg.trace().real() * (u_lo * f.derivative(u_lo) - f.eval(u_lo) - *f.moment_at_zero);
    } else {
      res.tail_bound = kInfinity;
    }
  }
  if (res.error_estimate > quad.tolerance * std::max(1.0, std::abs(res.value))) {
    fail(ErrorCode::QuadratureNotConverged,
         "D_f quadrature error estimate " + std::to_string(res.error_estimate) + " exceeds tolerance");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Identities used by the integral form.

struct TraceIdentityResiduals {
  double linear;           // |Tr sigma (X - I)|
  double quadratic;        // |Tr sigma (X - I)^2 - (Tr(sigma^-1 rho^2) - 1)|
  double quadratic_scale;  // Tr(sigma^-1 rho^2)
};

inline TraceIdentityResiduals trace_identity_residuals(const DensityState& rho, const DensityState& sigma) {
  const auto roots = detail::sigma_roots(sigma.matrix());
  const Matrix x = detail::likelihood_ratio(rho.matrix(), roots.inv_half);
  const Matrix id = Matrix::Identity(rho.dim(), rho.dim());
  const Matrix& sg = sigma.matrix();
  const Matrix sigma_inv = sg.partialPivLu().inverse();
  const double lin = (sg * (x - id)).trace().real();
  const double quad = (sg * (x - id) * (x - id)).trace().real();
  const double rhs = (sigma_inv * rho.matrix() * rho.matrix()).trace().real() - 1.0;
  return {std::abs(lin), std::abs(quad - rhs), rhs + 1.0};
}

}  // namespace qfdiv
