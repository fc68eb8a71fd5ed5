#pragma once

// Two-variable kernels behind the per-s terms of the divergence on a
// commuting pairing, with r an eigenvalue of rho and d = a = 1/mu an
// eigenvalue of sigma^-1:
//
//   quotient    d r^2 / (d r + s)      mixed partial  2 r s^2 / (d r + s)^3  > 0
//   rho_term    r / (d r + s)          mixed partial -2 r s   / (d r + s)^3  < 0
//   sigma_term  1 / (a (a r + s))      mixed partial  2 r     / (a r + s)^3  > 0
//
// The sign of the mixed partial fixes which rearrangement of the spectra
// extremizes sum_i k(d_pi(i), r_i).

#include <string_view>

#include "qfdiv/error.hpp"

namespace qfdiv {

enum class KernelKind { quotient, rho_term, sigma_term };

enum class Modularity { supermodular, submodular };

constexpr std::string_view to_string(KernelKind k) noexcept {
  switch (k) {
    case KernelKind::quotient: return "quotient";
    case KernelKind::rho_term: return "rho_term";
    case KernelKind::sigma_term: return "sigma_term";
  }
  return "quotient";
}

constexpr Modularity modularity(KernelKind k) noexcept {
  return k == KernelKind::rho_term ? Modularity::submodular : Modularity::supermodular;
}

inline double kernel_value(KernelKind kind, double first, double second, double s) {
  const double d = first;
  const double r = second;
  switch (kind) {
    case KernelKind::quotient: return d * r * r / (d * r + s);
    case KernelKind::rho_term: return r / (d * r + s);
    case KernelKind::sigma_term: return 1.0 / (d * (d * r + s));
  }
  return 0.0;
}

/// Closed-form d^2 k / (d first d second).
inline double kernel_cross_partial(KernelKind kind, double first, double second, double s) {
  const double d = first;
  const double r = second;
  const double den = d * r + s;
  const double den3 = den * den * den;
  switch (kind) {
    case KernelKind::quotient: return 2.0 * r * s * s / den3;
    case KernelKind::rho_term: return -2.0 * r * s / den3;
    case KernelKind::sigma_term: return 2.0 * r / den3;
  }
  return 0.0;
}

/// Exchange inequality k(d1,r1) + k(d2,r2) >= k(d1,r2) + k(d2,r1) for
/// supermodular kernels, reversed for submodular ones. Requires d1 >= d2
/// and r1 >= r2.
inline bool exchange_inequality_check(KernelKind kind, double d1, double d2, double r1, double r2, double s,
                                      double tolerance = 1e-12) {
  if (d1 < d2 || r1 < r2) {
    fail(ErrorCode::InvalidArgument, "exchange_inequality_check requires d1 >= d2 and r1 >= r2");
  }
  const double aligned = kernel_value(kind, d1, r1, s) + kernel_value(kind, d2, r2, s);
  const double crossed = kernel_value(kind, d1, r2, s) + kernel_value(kind, d2, r1, s);
  if (modularity(kind) == Modularity::supermodular) return aligned >= crossed - tolerance;
  return aligned <= crossed + tolerance;
}

}  // namespace qfdiv
