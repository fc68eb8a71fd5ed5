#pragma once

// Seeded sampling of Haar unitaries, Ginibre-style density matrices and GUE
// Hermitian matrices. All randomness is passed in explicitly.

#include <cmath>
#include <cstdint>
#include <random>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream derivation: the generator for (seed, counters...) is
/// independent of the order in which streams are created, so trials can be
/// evaluated in any order and still reproduce bit-for-bit.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(derive_seed(seed, a, b));
}

/// n x m matrix with i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
inline Matrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = complex(re * scale, im * scale);
    }
  }
  return g;
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal folded back into Q.
inline UnitaryMatrix haar_unitary(Index n, Rng& rng) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "haar_unitary: n must be >= 1");
  const Matrix g = complex_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const complex d = r(j, j);
    const double a = std::abs(d);
    const complex phase = a > 0.0 ? d / a : complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return UnitaryMatrix(q, 1e-12);
}

/// GUE-like Hermitian matrix (G + G*)/2.
inline HermitianMatrix random_hermitian(Index n, Rng& rng) {
  const Matrix g = complex_gaussian(n, n, rng);
  return HermitianMatrix(0.5 * (g + g.adjoint()));
}

/// Density matrix G G* / Tr(G G*) with G of shape n x rank; rank is exact
/// with probability one.
inline DensityState random_density(Index n, Index rank, Rng& rng) {
  if (n < 1 || rank < 1 || rank > n) {
    fail(ErrorCode::InvalidRank,
         "random_density: need 1 <= rank <= n, got rank=" + std::to_string(rank) + " n=" + std::to_string(n));
  }
  const Matrix g = complex_gaussian(n, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState(HermitianMatrix(0.5 * (rho + rho.adjoint())));
}

inline DensityState random_density(Index n, Rng& rng) { return random_density(n, n, rng); }

}  // namespace qfdiv
