#pragma once

// Riemannian gradient search for the extremes of
//
//   F(U) = S_f(rho || U* sigma U)
//
// on the unitary group. Curves are U exp(tK) with K skew-Hermitian; the
// metric is <K1, K2> = Re Tr(K1* K2).
//
// For functions whose representation is exact (finite atoms plus the c term),
// the gradient is analytic. With A = U* sigma^-1 U every atom contributes
//
//   Tr[sigma_U g_s(X)] = Tr rho - (2 + s) Tr sigma + (1 + s)^2 Tr[M^-1],
//   M = A rho A + s A,
//
// whose derivative along U exp(tK) is (1 + s)^2 Tr(K [A, N]) with
// N = rho A M^-2 + M^-2 A rho + s M^-2. The c term contributes
// Tr(K [rho^2, A]). Other functions use central differences over an
// orthonormal basis of the n^2-dimensional tangent space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/divergence.hpp"
#include "qfdiv/extremal.hpp"
#include "qfdiv/functions.hpp"
#include "qfdiv/hermitian.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

enum class Direction { min, max };

constexpr std::string_view to_string(Direction d) noexcept { return d == Direction::min ? "min" : "max"; }

enum class GradientKind { analytic, finite_difference };

struct OptimizerOptions {
  double armijo = 1e-4;
  double initial_step = 0.5;
  double shrink = 0.5;
  double grad_tol = 1e-7;
  int max_iterations = 500;
  double fd_step = 1e-5;
  int reorthonormalize_every = 25;
  // Trial step of each line search after the first: Barzilai-Borwein
  // <S,S>/|<S,Y>| from the previous step S and gradient change Y, clamped to
  // [min_step, max_step]. When false every search starts at initial_step.
  bool barzilai_borwein = true;
  double min_step = 1e-6;
  double max_step = 1e6;
  std::optional<GradientKind> gradient;  // default: analytic when available
};

class OrbitProblem {
 public:
  OrbitProblem(const DensityState& rho, const DensityState& sigma, OperatorConvexFunction f)
      : rho_(rho.matrix()), sigma_(sigma.matrix()), f_(std::move(f)) {
    if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
    if (!sigma.full_rank()) fail(ErrorCode::SingularSigma, "orbit optimization requires full-rank sigma");
    sigma_inv_ = sigma_.partialPivLu().inverse();
    sigma_inv_ = 0.5 * (sigma_inv_ + sigma_inv_.adjoint());
    rho_sq_ = rho_ * rho_;
    bool atoms_ok = true;
    for (const auto& a : f_.measure.atoms) atoms_ok = atoms_ok && (a.s > 0.0 || rho.full_rank());
    analytic_available_ = f_.measure.exact() && atoms_ok;
  }

  Index dim() const noexcept { return rho_.rows(); }
  const OperatorConvexFunction& function() const noexcept { return f_; }
  bool analytic_available() const noexcept { return analytic_available_; }

  /// S_f(rho || U* sigma U).
  double objective(const Matrix& u) const {
    Matrix s = u.adjoint() * sigma_ * u;
    s = 0.5 * (s + s.adjoint());
    return detail::s_hat_matrices(rho_, s, f_).first;
  }

  Matrix a_matrix(const Matrix& u) const {
    Matrix a = u.adjoint() * sigma_inv_ * u;
    return 0.5 * (a + a.adjoint());
  }

  /// Skew-Hermitian G with <G, K> = d/dt F(U exp(tK)) at t = 0.
  Matrix analytic_gradient(const Matrix& u) const {
    if (!analytic_available_) fail(ErrorCode::MeasureUnavailable, f_.name + " has no exact representation");
    const Matrix a = a_matrix(u);
    Matrix d = f_.quad_coeff * commutator(rho_sq_, a);
    for (const auto& atom : f_.measure.atoms) {
      const double s = atom.s;
      const Matrix m = a * rho_ * a + s * a;
      const Matrix mi = m.partialPivLu().inverse();
      const Matrix mi2 = mi * mi;
      const Matrix nmat = rho_ * a * mi2 + mi2 * a * rho_ + s * mi2;
      d += atom.weight * (1.0 + s) * (1.0 + s) * commutator(a, nmat);
    }
    return skew_part(-d);
  }

  Matrix finite_difference_gradient(const Matrix& u, double h) const {
    const Index n = dim();
    Matrix g = Matrix::Zero(n, n);
    for (const Matrix& b : tangent_basis(n)) {
      const double fp = objective(u * skew_exponential(b, h));
      const double fm = objective(u * skew_exponential(b, -h));
      g += ((fp - fm) / (2.0 * h)) * b;
    }
    return g;
  }

  Matrix gradient(const Matrix& u, GradientKind kind, double h) const {
    return kind == GradientKind::analytic ? analytic_gradient(u) : finite_difference_gradient(u, h);
  }

  /// d/dt F(U exp(tK)) at t = 0 from the analytic gradient.
  double directional_derivative(const Matrix& u, const Matrix& k) const {
    return (analytic_gradient(u).adjoint() * k).trace().real();
  }

  /// Orthonormal basis of the skew-Hermitian matrices under Re Tr(X* Y).
  static std::vector<Matrix> tangent_basis(Index n) {
    std::vector<Matrix> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (Index j = 0; j < n; ++j) {
      Matrix b = Matrix::Zero(n, n);
      b(j, j) = complex(0.0, 1.0);
      basis.push_back(b);
      for (Index k = j + 1; k < n; ++k) {
        Matrix re = Matrix::Zero(n, n);
        re(j, k) = r;
        re(k, j) = -r;
        basis.push_back(re);
        Matrix im = Matrix::Zero(n, n);
        im(j, k) = complex(0.0, r);
        im(k, j) = complex(0.0, r);
        basis.push_back(im);
      }
    }
    return basis;
  }

  static Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.adjoint()); }

  const Matrix& rho() const noexcept { return rho_; }
  const Matrix& sigma() const noexcept { return sigma_; }

 private:
  Matrix rho_;
  Matrix sigma_;
  Matrix sigma_inv_;
  Matrix rho_sq_;
  OperatorConvexFunction f_;
  bool analytic_available_ = false;
};

inline double orbit_objective(const DensityState& rho, const DensityState& sigma, const OperatorConvexFunction& f,
                              const UnitaryMatrix& u) {
  return s_hat_direct(rho, sigma.conjugated_by(u.matrix()), f).value;
}

struct Iterate {
  int step;
  double objective;
  double grad_norm;
  double eta;       // accepted step (0 at the final record)
  int backtracks;
};

struct RestartSummary {
  std::string start;  // "closed_form_min", "closed_form_max" or "haar"
  double initial_value;
  double final_value;
  double grad_norm;
  int iterations;
  bool converged;
};

struct OptimizerTrace {
  Direction direction = Direction::min;
  GradientKind gradient = GradientKind::analytic;
  std::vector<Iterate> iterates;  // history of the best restart
  UnitaryMatrix final_unitary = UnitaryMatrix::identity(1);
  double best_value = 0.0;
  bool converged = false;
  int restarts_used = 0;
  int best_restart = 0;
  std::vector<RestartSummary> restarts;

  /// Best final value among Haar-initialized restarts only.
  std::optional<double> best_haar_value() const {
    std::optional<double> best;
    for (const auto& r : restarts) {
      if (r.start != "haar") continue;
      if (!best || (direction == Direction::min ? r.final_value < *best : r.final_value > *best)) {
        best = r.final_value;
      }
    }
    return best;
  }
};

struct SingleRun {
  std::vector<Iterate> iterates;
  Matrix u;
  double value;
  double grad_norm;
  bool converged;
};

/// One gradient run from u0 with Armijo backtracking.
inline SingleRun optimize_from(const OrbitProblem& prob, Direction dir, const Matrix& u0, const OptimizerOptions& opt,
                               GradientKind kind) {
  const double sgn = dir == Direction::min ? -1.0 : 1.0;
  SingleRun run{{}, u0, prob.objective(u0), 0.0, false};
  double eta_trial = opt.initial_step;
  Matrix g_prev;
  double eta_prev = 0.0;
  for (int it = 0;; ++it) {
    const Matrix g = prob.gradient(run.u, kind, opt.fd_step);
    if (opt.barzilai_borwein && it > 0) {
      const Matrix step = (sgn * eta_prev) * g_prev;
      const double sy = std::abs((step.adjoint() * (g - g_prev)).trace().real());
      const double ss = step.squaredNorm();
      eta_trial = sy > 0.0 ? std::clamp(ss / sy, opt.min_step, opt.max_step) : opt.initial_step;
    }
    run.grad_norm = frobenius_norm(g);
    if (run.grad_norm <= opt.grad_tol) {
      run.converged = true;
      run.iterates.push_back({it, run.value, run.grad_norm, 0.0, 0});
      break;
    }
    if (it >= opt.max_iterations) {
      run.iterates.push_back({it, run.value, run.grad_norm, 0.0, 0});
      break;
    }
    double eta = eta_trial;
    const double g2 = run.grad_norm * run.grad_norm;
    int backtracks = 0;
    bool accepted = false;
    Matrix cand;
    double fc = 0.0;
    while (eta > 1e-18) {
      cand = run.u * skew_exponential(g, sgn * eta);
      fc = prob.objective(cand);
      // Below the resolution of F the sufficient-change test cannot be
      // decided; a step that does not move F the wrong way beyond it passes.
      const double resolution = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(run.value));
      const double required = opt.armijo * eta * g2;
      const double gain = dir == Direction::min ? run.value - fc : fc - run.value;
      const bool ok = gain >= required || (required <= resolution && gain >= -resolution);
      if (ok) {
        accepted = true;
        break;
      }
      eta *= opt.shrink;
      ++backtracks;
    }
    run.iterates.push_back({it, run.value, run.grad_norm, accepted ? eta : 0.0, backtracks});
    if (!accepted) break;  // no sufficient increase is representable
    g_prev = g;
    eta_prev = eta;
    run.u = cand;
    run.value = fc;
    if (opt.reorthonormalize_every > 0 && (it + 1) % opt.reorthonormalize_every == 0) {
      run.u = reorthonormalize(run.u);
      run.value = prob.objective(run.u);
    }
  }
  return run;
}

/// Multi-start search. The first two starts are the closed-form extremizers
/// (the one matching the direction first); the rest are Haar samples.
inline OptimizerTrace riemannian_optimize(const DensityState& rho, const DensityState& sigma,
                                          const OperatorConvexFunction& f, Direction dir, int restarts, Rng& rng,
                                          const OptimizerOptions& opt = {}) {
  if (restarts < 1) fail(ErrorCode::InvalidArgument, "riemannian_optimize requires restarts >= 1");
  const OrbitProblem prob(rho, sigma, f);
  const GradientKind kind =
      opt.gradient.value_or(prob.analytic_available() ? GradientKind::analytic : GradientKind::finite_difference);
  if (kind == GradientKind::analytic && !prob.analytic_available()) {
    fail(ErrorCode::MeasureUnavailable, f.name + " has no exact representation for the analytic gradient");
  }
  const Matrix u_min = extremal_min(rho, sigma, f).unitary.matrix();
  const Matrix u_max = extremal_max(rho, sigma, f).unitary.matrix();

  OptimizerTrace trace;
  trace.direction = dir;
  trace.gradient = kind;
  trace.restarts_used = restarts;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    std::string start = "haar";
    Matrix u0;
    if (r == 0) {
      start = dir == Direction::min ? "closed_form_min" : "closed_form_max";
      u0 = dir == Direction::min ? u_min : u_max;
    } else if (r == 1) {
      start = dir == Direction::min ? "closed_form_max" : "closed_form_min";
      u0 = dir == Direction::min ? u_max : u_min;
    } else {
      u0 = haar_unitary(rho.dim(), rng).matrix();
    }
    SingleRun run = optimize_from(prob, dir, u0, opt, kind);
    trace.restarts.push_back({start, run.iterates.front().objective, run.value, run.grad_norm,
                              static_cast<int>(run.iterates.size()) - 1, run.converged});
    const bool better = !have_best || (dir == Direction::min ? run.value < trace.best_value
                                                             : run.value > trace.best_value);
    if (better) {
      have_best = true;
      trace.best_value = run.value;
      trace.best_restart = r;
      trace.converged = run.converged;
      trace.iterates = std::move(run.iterates);
      trace.final_unitary = UnitaryMatrix(reorthonormalize(run.u), 1e-9);
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// First-order conditions

struct StationarityNode {
  double s;
  double commutator_a_h;      // ||[A, H]||_F, H = rho^2 Y - A^1/2 rho Y rho A^1/2 Y
  double commutator_sqrta_t;  // ||[A^1/2, T]||_F, T = rho A^1/2 Y rho Y + Y rho Y A^1/2 rho
};

struct StationarityReport {
  double commutator_a_rho = 0.0;  // ||[A, rho]||_F, A = U* sigma^-1 U
  std::vector<StationarityNode> nodes;
};

/// Residuals at U with X = A^1/2 rho A^1/2 and Y = (X + sI)^-1.
inline StationarityReport stationarity_residual(const DensityState& rho, const DensityState& sigma,
                                                const UnitaryMatrix& u, const std::vector<double>& s_nodes) {
  if (rho.dim() != sigma.dim()) fail(ErrorCode::DimensionMismatch, "rho and sigma dimensions differ");
  if (!sigma.full_rank()) fail(ErrorCode::SingularSigma, "stationarity_residual requires full-rank sigma");
  const Matrix& r = rho.matrix();
  const Matrix& um = u.matrix();
  Matrix a = um.adjoint() * sigma.matrix().partialPivLu().inverse() * um;
  a = 0.5 * (a + a.adjoint());
  StationarityReport rep;
  rep.commutator_a_rho = frobenius_norm(commutator(a, r));
  if (s_nodes.empty()) return rep;

  const Eigenpairs ep = eigenpairs(a);
  const Matrix a_half = ep.vectors * ep.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * ep.vectors.adjoint();
  const Matrix x = a_half * r * a_half;
  const Matrix id = Matrix::Identity(r.rows(), r.cols());
  for (double s : s_nodes) {
    if (!(s >= 0.0)) fail(ErrorCode::InvalidArgument, "stationarity s nodes must be >= 0");
    const Matrix y = (x + s * id).partialPivLu().inverse();
    const Matrix h = r * r * y - a_half * r * y * r * a_half * y;
    const Matrix t = r * a_half * y * r * y + y * r * y * a_half * r;
    rep.nodes.push_back({s, frobenius_norm(commutator(a, h)), frobenius_norm(commutator(a_half, t))});
  }
  return rep;
}

}  // namespace qfdiv
