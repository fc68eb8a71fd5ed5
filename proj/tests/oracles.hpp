#pragma once

// Reference computations that share no code path with the library beyond
// Eigen's dense kernels and the scalar function objects.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using complex = std::complex<double>;
using Index = Eigen::Index;

/// Monic characteristic polynomial coefficients c_0..c_n by Faddeev-LeVerrier,
/// det(xI - A) = sum_k c_k x^k.
inline std::vector<complex> characteristic_polynomial(const Matrix& a) {
  const Index n = a.rows();
  std::vector<complex> c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(n)] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

/// Real parts of the roots of a monic polynomial, ascending, from the
/// companion matrix.
inline std::vector<double> polynomial_real_roots(const std::vector<complex>& c) {
  const Index n = static_cast<Index>(c.size()) - 1;
  Matrix comp = Matrix::Zero(n, n);
  for (Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (Index i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)];
  Eigen::ComplexEigenSolver<Matrix> es(comp);
  std::vector<double> roots;
  for (Index i = 0; i < n; ++i) roots.push_back(es.eigenvalues()(i).real());
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Heap's algorithm; calls visit on each of the n! permutations of 0..n-1.
inline void for_each_permutation(int n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  visit(p);
  int i = 1;
  while (i < n) {
    auto& ci = c[static_cast<std::size_t>(i)];
    if (ci < i) {
      std::swap(p[i % 2 == 0 ? 0 : static_cast<std::size_t>(ci)], p[static_cast<std::size_t>(i)]);
      visit(p);
      ++ci;
      i = 1;
    } else {
      ci = 0;
      ++i;
    }
  }
}

/// sum_i mu_i f(r_i / mu_i) for strictly positive vectors.
template <class F>
double classical_sum(const RealVector& r, const RealVector& mu, F&& f) {
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i) s += mu(i) * f(r(i) / mu(i));
  return s;
}

struct Extremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

/// Extremes of sum_i mu_p(i) f(r_i / mu_p(i)) over all permutations p.
template <class F>
Extremes permutation_extremes(const RealVector& r, const RealVector& mu, F&& f) {
  Extremes e;
  for_each_permutation(static_cast<int>(r.size()), [&](const std::vector<int>& p) {
    RealVector m(r.size());
    for (Index i = 0; i < r.size(); ++i) m(i) = mu(p[static_cast<std::size_t>(i)]);
    const double v = classical_sum(r, m, f);
    e.min = std::min(e.min, v);
    e.max = std::max(e.max, v);
  });
  return e;
}

inline RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline RealVector descending(RealVector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

/// Sum of singular values.
inline double trace_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues().sum(); }

/// Re Tr[sigma f(sigma^-1 rho)] through an eigendecomposition of the
/// non-Hermitian product; equals Tr[sigma f(sigma^-1/2 rho sigma^-1/2)]
/// by similarity.
template <class F>
double divergence_by_similarity(const Matrix& rho, const Matrix& sigma, F&& f) {
  const Matrix prod = sigma.partialPivLu().solve(rho);
  Eigen::ComplexEigenSolver<Matrix> es(prod);
  const Matrix& p = es.eigenvectors();
  Eigen::VectorXcd fd(prod.rows());
  for (Index i = 0; i < prod.rows(); ++i) fd(i) = f(es.eigenvalues()(i).real());
  const Matrix fm = p * fd.asDiagonal() * p.inverse();
  return (sigma * fm).trace().real();
}

/// Tr[(A)_+] for Hermitian A.
inline double positive_trace(const Matrix& a) {
  const RealVector ev = hermitian_eigenvalues(a);
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) s += std::max(0.0, ev(i));
  return s;
}

/// Classical E_s(p||q) = sum_i max(0, p_i - s q_i).
inline double classical_hockey(const RealVector& p, const RealVector& q, double s) {
  double v = 0.0;
  for (Index i = 0; i < p.size(); ++i) v += std::max(0.0, p(i) - s * q(i));
  return v;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
template <class G>
double simpson(G&& g, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = g(a) + g(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

inline double commutator_norm(const Matrix& a, const Matrix& b) { return (a * b - b * a).norm(); }

}  // namespace oracle
