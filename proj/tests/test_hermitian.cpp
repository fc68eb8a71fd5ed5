#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qfdiv/qfdiv.hpp"

using namespace qfdiv;

namespace {

Matrix diag_matrix(std::initializer_list<double> v) {
  return HermitianMatrix::diagonal(v).matrix();
}

}  // namespace

TEST(Eigen, DiagonalInputGivesPermutationDiagonalizers) {
  const auto sd = eig_hermitian(HermitianMatrix::diagonal({3.0, 1.0, 2.0}));
  EXPECT_EQ(sd.eigenvalues_desc, (RealVector(3) << 3, 2, 1).finished());
  EXPECT_EQ(sd.eigenvalues_asc, (RealVector(3) << 1, 2, 3).finished());
  for (const Matrix* v : {&sd.diagonalizer_desc.matrix(), &sd.diagonalizer_asc.matrix()}) {
    for (Index j = 0; j < 3; ++j) {
      int ones = 0;
      for (Index i = 0; i < 3; ++i) {
        const double a = std::abs((*v)(i, j));
        EXPECT_TRUE(std::abs(a) < 1e-15 || std::abs(a - 1.0) < 1e-15);
        ones += std::abs(a - 1.0) < 1e-15;
      }
      EXPECT_EQ(ones, 1);
    }
  }
  const Matrix a = diag_matrix({3.0, 1.0, 2.0});
  const Matrix& vd = sd.diagonalizer_desc.matrix();
  EXPECT_LT((vd.adjoint() * a * vd - diag_matrix({3.0, 2.0, 1.0})).norm(), 1e-14);
}

TEST(Eigen, IdentityHasUnitSpectrum) {
  const auto sd = eig_hermitian(HermitianMatrix::identity(3));
  EXPECT_TRUE(sd.eigenvalues_desc.isApprox(RealVector::Ones(3)));
  EXPECT_TRUE(sd.eigenvalues_asc.isApprox(RealVector::Ones(3)));
}

TEST(Eigen, MatchesCharacteristicPolynomialRoots) {
  Rng rng = make_stream(7, 0);
  const auto a = random_hermitian(4, rng);
  const auto roots = oracle::polynomial_real_roots(oracle::characteristic_polynomial(a.matrix()));
  const auto sd = eig_hermitian(a);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(sd.eigenvalues_asc(i), roots[static_cast<std::size_t>(i)], 1e-10);
}

TEST(Eigen, ReconstructsInput) {
  Rng rng = make_stream(8, 0);
  const auto a = random_hermitian(5, rng);
  const auto sd = eig_hermitian(a);
  const Matrix& v = sd.diagonalizer_desc.matrix();
  const Matrix back = v * sd.eigenvalues_desc.cast<complex>().asDiagonal() * v.adjoint();
  EXPECT_LT((back - a.matrix()).norm(), 1e-12);
}

TEST(MatrixFunction, IdentityMap) {
  Rng rng = make_stream(1, 0);
  const auto a = random_hermitian(4, rng);
  const auto b = matrix_function(a, [](double x) { return x; });
  EXPECT_LT((b.matrix() - a.matrix()).norm(), 1e-12);
}

TEST(MatrixFunction, SquareOfDiagonal) {
  const auto b = matrix_function(HermitianMatrix::diagonal({2.0, -1.0}), [](double x) { return x * x; });
  EXPECT_LT((b.matrix() - diag_matrix({4.0, 1.0})).norm(), 1e-14);
}

TEST(MatrixFunction, ResolventMatchesDenseInverse) {
  Rng rng = make_stream(3, 0);
  const auto rho = random_density(4, rng);
  const auto r = matrix_function(rho.hermitian(), [](double x) { return 1.0 / (x + 1.0); });
  const Matrix inv = (rho.matrix() + Matrix::Identity(4, 4)).inverse();
  EXPECT_LT((r.matrix() - inv).norm(), 1e-10);
}

TEST(MatrixFunction, DomainViolationIsReported) {
  try {
    matrix_function(HermitianMatrix::diagonal({1.0, -1.0}), [](double x) { return std::log(x); }, Domain::positive());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainViolation);
  }
}

TEST(PositivePart, Diagonal) {
  const auto p = positive_part(HermitianMatrix::diagonal({0.4, -0.4}));
  EXPECT_LT((p.matrix() - diag_matrix({0.4, 0.0})).norm(), 1e-15);
}

TEST(PositivePart, PsdInputUnchanged) {
  Rng rng = make_stream(4, 0);
  const auto rho = random_density(3, rng);
  EXPECT_LT((positive_part(rho.hermitian()).matrix() - rho.matrix()).norm(), 1e-14);
}

TEST(PositivePart, JordanTraces) {
  Rng rng = make_stream(5, 0);
  const auto a = random_hermitian(5, rng);
  const auto jd = jordan_decomposition(a);
  EXPECT_NEAR(jd.positive.trace() - jd.negative.trace(), a.trace(), 1e-12);
  EXPECT_LT((jd.positive.matrix() * jd.negative.matrix()).norm(), 1e-12);
  EXPECT_NEAR(positive_trace(a.matrix()), oracle::positive_trace(a.matrix()), 1e-12);
}

TEST(Haar, ScalarCase) {
  Rng rng = make_stream(2, 0);
  const auto u = haar_unitary(1, rng);
  EXPECT_NEAR(std::abs(u.matrix()(0, 0)), 1.0, 1e-12);
}

TEST(Haar, Unitarity) {
  Rng rng = make_stream(11, 0);
  const auto u = haar_unitary(4, rng);
  EXPECT_LE((u.matrix().adjoint() * u.matrix() - Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(Haar, SecondMomentOfEntry) {
  Rng rng = make_stream(12, 0);
  const int samples = 10000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double v = std::norm(haar_unitary(3, rng).matrix()(0, 0));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double sd = std::sqrt((sum_sq / samples - mean * mean) / samples);
  EXPECT_LT(std::abs(mean - 1.0 / 3.0), 3.0 * sd);
}

TEST(Haar, SameStreamSameSample) {
  Rng a = make_stream(99, 4, 2);
  Rng b = make_stream(99, 4, 2);
  EXPECT_EQ(haar_unitary(3, a).matrix(), haar_unitary(3, b).matrix());
  Rng c = make_stream(99, 4, 3);
  EXPECT_NE(haar_unitary(3, a).matrix(), haar_unitary(3, c).matrix());
}

TEST(RandomDensity, PureState) {
  Rng rng = make_stream(1, 1);
  const auto rho = random_density(2, 1, rng);
  EXPECT_EQ(rho.rank(), 1);
  EXPECT_NEAR(rho.eigenvalues()(1), 1.0, 1e-12);
  EXPECT_NEAR(rho.eigenvalues()(0), 0.0, 1e-12);
}

TEST(RandomDensity, FullRankNormalized) {
  Rng rng = make_stream(2, 1);
  const auto rho = random_density(3, 3, rng);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_GT(oracle::hermitian_eigenvalues(rho.matrix())(0), 0.0);
}

TEST(RandomDensity, RankTwo) {
  Rng rng = make_stream(3, 1);
  const auto rho = random_density(4, 2, rng);
  const RealVector ev = oracle::hermitian_eigenvalues(rho.matrix());
  int above = 0;
  for (Index i = 0; i < 4; ++i) above += ev(i) > tol::rank * ev(3);
  EXPECT_EQ(above, 2);
  EXPECT_EQ(rho.rank(), 2);
}

TEST(RandomDensity, RejectsBadRank) {
  Rng rng = make_stream(3, 1);
  EXPECT_THROW(random_density(3, 4, rng), Error);
  EXPECT_THROW(random_density(3, 0, rng), Error);
}

TEST(TraceProduct, DiagonalPair) {
  const auto b = trace_product_bounds(HermitianMatrix::diagonal({2.0, 1.0}), HermitianMatrix::diagonal({3.0, 1.0}));
  EXPECT_DOUBLE_EQ(b.lower, 5.0);
  EXPECT_DOUBLE_EQ(b.value, 7.0);
  EXPECT_DOUBLE_EQ(b.upper, 7.0);
}

TEST(TraceProduct, Identity) {
  const auto b = trace_product_bounds(HermitianMatrix::identity(2), HermitianMatrix::identity(2));
  EXPECT_DOUBLE_EQ(b.lower, 2.0);
  EXPECT_DOUBLE_EQ(b.value, 2.0);
  EXPECT_DOUBLE_EQ(b.upper, 2.0);
}

TEST(TraceProduct, RandomChain) {
  Rng rng = make_stream(9, 0);
  const auto a = random_hermitian(5, rng);
  const auto b = random_hermitian(5, rng);
  const auto t = trace_product_bounds(a, b);
  EXPECT_NEAR(t.value, (a.matrix() * b.matrix()).trace().real(), 1e-12);
  const RealVector la = oracle::descending(oracle::hermitian_eigenvalues(a.matrix()));
  const RealVector lb = oracle::descending(oracle::hermitian_eigenvalues(b.matrix()));
  EXPECT_NEAR(t.upper, la.dot(lb), 1e-12);
  EXPECT_NEAR(t.lower, la.dot(lb.reverse()), 1e-12);
  EXPECT_LE(t.lower, t.value + 1e-12);
  EXPECT_LE(t.value, t.upper + 1e-12);
}

TEST(TraceProduct, DimensionMismatch) {
  EXPECT_THROW(trace_product_bounds(HermitianMatrix::identity(2), HermitianMatrix::identity(3)), Error);
}

TEST(Majorization, Examples) {
  const std::vector<double> flat{1.0, 1.0};
  const std::vector<double> peaked{2.0, 0.0};
  EXPECT_TRUE(is_majorized(flat, peaked));
  EXPECT_FALSE(is_majorized(peaked, flat));
  EXPECT_TRUE(is_weakly_majorized(std::vector<double>{0.5, 0.5}, peaked));
  EXPECT_FALSE(is_majorized(std::vector<double>{0.5, 0.5}, peaked));
  EXPECT_THROW(is_weakly_majorized(flat, std::vector<double>{1.0}), Error);
}

TEST(Validation, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 0.0, 1.0;
  try {
    HermitianMatrix h(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonHermitianInput);
  }
}

TEST(Validation, RejectsNonUnitary) {
  Matrix m = Matrix::Identity(2, 2) * 1.1;
  EXPECT_THROW(UnitaryMatrix u(m), Error);
}

TEST(Validation, RejectsBadDensity) {
  EXPECT_THROW(DensityState::diagonal({0.7, 0.7}), Error);
  EXPECT_THROW(DensityState::diagonal({1.2, -0.2}), Error);
  const auto ok = DensityState::diagonal({1.0, 0.0});
  EXPECT_EQ(ok.rank(), 1);
  EXPECT_FALSE(ok.full_rank());
}

TEST(Unitary, ExponentialAndLogarithmInvert) {
  Rng rng = make_stream(6, 0);
  const Matrix u = haar_unitary(4, rng).matrix();
  const Matrix l = unitary_logarithm(u);
  EXPECT_LT((l + l.adjoint()).norm(), 1e-12);
  EXPECT_LT((skew_exponential(l) - u).norm(), 1e-10);
}

TEST(Unitary, ReorthonormalizeRemovesDrift) {
  Rng rng = make_stream(7, 1);
  Matrix u = haar_unitary(3, rng).matrix();
  u(0, 0) += 1e-6;
  const Matrix w = reorthonormalize(u);
  EXPECT_LT(UnitaryMatrix::unitarity_residual(w), 1e-13);
  EXPECT_LT((w - u).norm(), 1e-5);
}
