#pragma once

// Dense Hermitian linear algebra: validated matrix types, spectral
// decompositions in both orderings, and the functional calculus used by the
// divergence code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfdiv/error.hpp"

namespace qfdiv {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double herm = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double recon = 1e-10;
inline constexpr double psd = 1e-12;    // relative to the largest eigenvalue
inline constexpr double rank = 1e-12;   // relative to the largest eigenvalue
inline constexpr double trace = 1e-10;
inline constexpr double sum = 1e-10;
}  // namespace tol

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Largest |a_ij - conj(a_ji)|, scaled by max(1, max |a_ij|).
inline double hermiticity_residual(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// Spectral norm of a Hermitian matrix.
inline double hermitian_operator_norm(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

class HermitianMatrix {
 public:
  /// Validates symmetry to within `tolerance` and stores the exactly
  /// symmetrized matrix (A + A*)/2.
  explicit HermitianMatrix(const Matrix& m, double tolerance = tol::herm) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      fail(ErrorCode::DimensionMismatch,
           "Hermitian matrix must be square with dim >= 1, got " + std::to_string(m.rows()) +
               "x" + std::to_string(m.cols()));
    }
    const double residual = hermiticity_residual(m);
    if (!(residual <= tolerance)) {
      fail(ErrorCode::NonHermitianInput,
           "symmetry residual " + std::to_string(residual) + " exceeds tolerance");
    }
    m_ = 0.5 * (m + m.adjoint());
  }

  static HermitianMatrix identity(Index n) { return HermitianMatrix(Matrix::Identity(n, n)); }

  static HermitianMatrix diagonal(std::span<const double> values) {
    Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return HermitianMatrix(m);
  }
  static HermitianMatrix diagonal(std::initializer_list<double> values) {
    return diagonal(std::span<const double>(values.begin(), values.size()));
  }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(m_ + o.m_); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(m_ - o.m_); }
  HermitianMatrix operator*(double s) const { return HermitianMatrix(m_ * s); }

  /// U* A U.
  HermitianMatrix conjugated_by(const Matrix& u) const {
    return HermitianMatrix(u.adjoint() * m_ * u, 1e-8);
  }

 private:
  Matrix m_;
};

class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(const Matrix& m, double tolerance = tol::unitary) : m_(m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      fail(ErrorCode::DimensionMismatch, "unitary matrix must be square with dim >= 1");
    }
    const double r = unitarity_residual(m);
    if (!(r <= tolerance)) {
      fail(ErrorCode::NotUnitary, "||U*U - I|| = " + std::to_string(r) + " exceeds tolerance");
    }
  }

  static UnitaryMatrix identity(Index n) { return UnitaryMatrix(Matrix::Identity(n, n)); }

  static double unitarity_residual(const Matrix& m) {
    const Matrix r = m.adjoint() * m - Matrix::Identity(m.cols(), m.cols());
    return hermitian_operator_norm(0.5 * (r + r.adjoint()));
  }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }
  UnitaryMatrix operator*(const UnitaryMatrix& o) const { return UnitaryMatrix(m_ * o.m_, 1e-9); }

 private:
  Matrix m_;
};

/// Both eigenvalue orderings of a Hermitian matrix with matching
/// diagonalizers: V_desc* A V_desc = diag(eigenvalues_desc), and likewise
/// for the ascending pair. Column order is the only difference.
struct SpectralDecomposition {
  RealVector eigenvalues_desc;
  RealVector eigenvalues_asc;
  UnitaryMatrix diagonalizer_desc;
  UnitaryMatrix diagonalizer_asc;
};

inline SpectralDecomposition eig_hermitian(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::InvalidArgument, "Hermitian eigensolver did not converge");
  }
  RealVector asc = es.eigenvalues();
  Matrix v_asc = es.eigenvectors();
  RealVector desc = asc.reverse();
  Matrix v_desc = v_asc.rowwise().reverse();
  return SpectralDecomposition{desc, asc, UnitaryMatrix(v_desc, 1e-9), UnitaryMatrix(v_asc, 1e-9)};
}

/// Raw ascending eigenpairs, for internal hot paths that do not need the
/// validated wrappers.
struct Eigenpairs {
  RealVector values;  // ascending
  Matrix vectors;
};

inline Eigenpairs eigenpairs(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  return Eigenpairs{es.eigenvalues(), es.eigenvectors()};
}

inline RealVector eigenvalues_asc(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Interval on the real line; an infinite endpoint is always open.
struct Domain {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_open = true;
  bool upper_open = true;

  static Domain real_line() { return {}; }
  static Domain positive() { return {0.0, std::numeric_limits<double>::infinity(), true, true}; }
  static Domain nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), false, true}; }

  bool contains(double x) const {
    const bool above = lower_open ? x > lower : x >= lower;
    const bool below = upper_open ? x < upper : x <= upper;
    return above && below;
  }
};

/// V g(Lambda) V* for a scalar map g. Independent of the eigenvector choice
/// inside degenerate blocks, since g is applied to the spectral projections.
template <class G>
Matrix apply_function(const Matrix& hermitian, G&& g) {
  const Eigenpairs ep = eigenpairs(hermitian);
  RealVector gv(ep.values.size());
  for (Index i = 0; i < ep.values.size(); ++i) gv(i) = g(ep.values(i));
  Matrix out = ep.vectors * gv.asDiagonal() * ep.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

template <class G>
HermitianMatrix matrix_function(const HermitianMatrix& a, G&& g, const Domain& domain = Domain::real_line()) {
  const Eigenpairs ep = eigenpairs(a.matrix());
  RealVector gv(ep.values.size());
  for (Index i = 0; i < ep.values.size(); ++i) {
    const double x = ep.values(i);
    if (!domain.contains(x)) {
      fail(ErrorCode::DomainViolation,
           "eigenvalue " + std::to_string(x) + " lies outside the function's domain");
    }
    gv(i) = g(x);
  }
  return HermitianMatrix(ep.vectors * gv.asDiagonal() * ep.vectors.adjoint(), 1e-8);
}

struct JordanDecomposition {
  HermitianMatrix positive;
  HermitianMatrix negative;
};

/// A = A+ - A- with A+, A- PSD and A+ A- = 0, from the eigenvalue split.
inline JordanDecomposition jordan_decomposition(const HermitianMatrix& a) {
  const Eigenpairs ep = eigenpairs(a.matrix());
  RealVector pos = ep.values.cwiseMax(0.0);
  RealVector neg = (-ep.values).cwiseMax(0.0);
  return JordanDecomposition{
      HermitianMatrix(ep.vectors * pos.asDiagonal() * ep.vectors.adjoint(), 1e-8),
      HermitianMatrix(ep.vectors * neg.asDiagonal() * ep.vectors.adjoint(), 1e-8)};
}

inline HermitianMatrix positive_part(const HermitianMatrix& a) { return jordan_decomposition(a).positive; }
inline HermitianMatrix negative_part(const HermitianMatrix& a) { return jordan_decomposition(a).negative; }

/// Tr[(A)_+], the sum of the positive eigenvalues.
inline double positive_trace(const Matrix& hermitian) {
  const RealVector ev = eigenvalues_asc(hermitian);
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) s += std::max(0.0, ev(i));
  return s;
}

/// Loewner order A <= B, i.e. min eig(B - A) >= -tolerance.
inline bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tolerance = tol::psd) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "loewner_leq: dimensions differ");
  return eigenvalues_asc(b.matrix() - a.matrix())(0) >= -tolerance;
}

class DensityState {
 public:
  explicit DensityState(const HermitianMatrix& m, double trace_tolerance = tol::trace) : m_(m) {
    eigenvalues_ = eigenvalues_asc(m.matrix());
    const double top = std::max(std::abs(eigenvalues_(eigenvalues_.size() - 1)),
                                std::numeric_limits<double>::min());
    if (eigenvalues_(0) < -tol::psd * top) {
      fail(ErrorCode::InvalidState,
           "density matrix has negative eigenvalue " + std::to_string(eigenvalues_(0)));
    }
    const double tr = m.trace();
    if (!(std::abs(tr - 1.0) <= trace_tolerance)) {
      fail(ErrorCode::InvalidState, "density matrix trace " + std::to_string(tr) + " is not 1");
    }
    rank_ = 0;
    for (Index i = 0; i < eigenvalues_.size(); ++i) {
      if (eigenvalues_(i) > tol::rank * top) ++rank_;
    }
  }

  explicit DensityState(const Matrix& m, double trace_tolerance = tol::trace)
      : DensityState(HermitianMatrix(m), trace_tolerance) {}

  static DensityState diagonal(std::span<const double> probabilities) {
    return DensityState(HermitianMatrix::diagonal(probabilities));
  }
  static DensityState diagonal(std::initializer_list<double> p) {
    return DensityState(HermitianMatrix::diagonal(p));
  }
  static DensityState maximally_mixed(Index n) {
    return DensityState(HermitianMatrix(Matrix::Identity(n, n) / static_cast<double>(n)));
  }

  const HermitianMatrix& hermitian() const noexcept { return m_; }
  const Matrix& matrix() const noexcept { return m_.matrix(); }
  Index dim() const noexcept { return m_.dim(); }
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }  // ascending
  int rank() const noexcept { return rank_; }
  bool full_rank() const noexcept { return rank_ == m_.dim(); }

  /// U* rho U.
  DensityState conjugated_by(const Matrix& u) const { return DensityState(m_.conjugated_by(u), 1e-9); }

 private:
  HermitianMatrix m_;
  RealVector eigenvalues_;
  int rank_ = 0;
};

/// exp(t K) for skew-Hermitian K, through the Hermitian matrix iK.
inline Matrix skew_exponential(const Matrix& k, double t = 1.0) {
  const Matrix h = complex(0.0, 1.0) * k;  // Hermitian
  const Eigenpairs ep = eigenpairs(0.5 * (h + h.adjoint()));
  Eigen::VectorXcd phases(ep.values.size());
  for (Index i = 0; i < ep.values.size(); ++i) phases(i) = std::exp(complex(0.0, -t * ep.values(i)));
  return ep.vectors * phases.asDiagonal() * ep.vectors.adjoint();
}

/// Principal logarithm of a unitary matrix, returned as a skew-Hermitian
/// matrix L with exp(L) = U.
inline Matrix unitary_logarithm(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  Eigen::VectorXcd logs(t.rows());
  for (Index i = 0; i < t.rows(); ++i) logs(i) = complex(0.0, std::arg(t(i, i)));
  Matrix l = q * logs.asDiagonal() * q.adjoint();
  return 0.5 * (l - l.adjoint());
}

/// Closest unitary in Frobenius norm (polar factor), used to scrub drift.
inline Matrix reorthonormalize(const Matrix& u) {
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace qfdiv
