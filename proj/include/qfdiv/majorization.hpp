#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <vector>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

struct TraceProductBounds {
  double lower;  // <lambda_desc(A), lambda_asc(B)>
  double value;  // Tr(AB)
  double upper;  // <lambda_desc(A), lambda_desc(B)>
};

inline TraceProductBounds trace_product_bounds(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::DimensionMismatch, "trace_product_bounds: dimensions " + std::to_string(a.dim()) +
                                           " and " + std::to_string(b.dim()) + " differ");
  }
  const RealVector la = eigenvalues_asc(a.matrix());
  const RealVector lb = eigenvalues_asc(b.matrix());
  const Index n = a.dim();
  double lower = 0.0;
  double upper = 0.0;
  for (Index i = 0; i < n; ++i) {
    upper += la(i) * lb(i);
    lower += la(i) * lb(n - 1 - i);
  }
  const double value = (a.matrix() * b.matrix()).trace().real();
  return {lower, value, upper};
}

namespace detail {
inline std::vector<double> sorted_desc(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}
}  // namespace detail

/// x weakly majorized by y: every prefix sum of x sorted descending is at
/// most the matching prefix sum of y.
inline bool is_weakly_majorized(std::span<const double> x, std::span<const double> y,
                                double tolerance = 1e-12) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch, "is_weakly_majorized: lengths " + std::to_string(x.size()) + " and " +
                                        std::to_string(y.size()) + " differ");
  }
  const auto xs = detail::sorted_desc(x);
  const auto ys = detail::sorted_desc(y);
  double px = 0.0;
  double py = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    px += xs[k];
    py += ys[k];
    if (px > py + tolerance * std::max(1.0, std::abs(py))) return false;
  }
  return true;
}

/// x majorized by y: weak majorization plus equal totals within tol::sum.
inline bool is_majorized(std::span<const double> x, std::span<const double> y, double tolerance = 1e-12) {
  if (!is_weakly_majorized(x, y, tolerance)) return false;
  double sx = 0.0;
  double sy = 0.0;
  for (double v : x) sx += v;
  for (double v : y) sy += v;
  return std::abs(sx - sy) <= tol::sum;
}

inline std::span<const double> as_span(const RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace qfdiv
