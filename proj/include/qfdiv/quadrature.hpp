#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qfdiv/error.hpp"

namespace qfdiv {

struct QuadratureNode {
  double x;
  double w;
};

/// n-point Gauss-Legendre rule on [-1, 1] via Newton iteration on P_n.
inline std::vector<QuadratureNode> gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "gauss_legendre: need n >= 1");
  std::vector<QuadratureNode> nodes(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = {-z, w};
    nodes[static_cast<std::size_t>(n - 1 - i)] = {z, w};
  }
  return nodes;
}

/// Gauss-Legendre rule mapped to [a, b].
inline std::vector<QuadratureNode> gauss_legendre(int n, double a, double b) {
  auto nodes = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (auto& q : nodes) {
    q.x = mid + half * q.x;
    q.w *= half;
  }
  return nodes;
}

/// Composite Gauss-Legendre over consecutive panel boundaries.
inline std::vector<QuadratureNode> composite_gauss_legendre(const std::vector<double>& breaks, int per_panel) {
  std::vector<QuadratureNode> out;
  const auto base = gauss_legendre(per_panel);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (const auto& q : base) out.push_back({mid + half * q.x, q.w * half});
  }
  return out;
}

/// Pairwise summation for results that are reproducible regardless of
/// evaluation order.
template <class It>
double pairwise_sum(It first, It last) {
  const auto n = last - first;
  if (n <= 8) {
    double s = 0.0;
    for (; first != last; ++first) s += *first;
    return s;
  }
  const It mid = first + n / 2;
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.begin(), v.end()); }

}  // namespace qfdiv
