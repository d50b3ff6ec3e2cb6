#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mfreg/linops.hpp"

using namespace mfreg;

namespace {

Matrix random_matrix(std::mt19937_64& rng, size_t m, size_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix A(m, n);
  for (auto& v : A.a) v = u(rng);
  return A;
}

// Orthogonal matrix by Gram-Schmidt on a random square matrix.
Matrix random_orthogonal(std::mt19937_64& rng, size_t n) {
  Matrix Q = random_matrix(rng, n, n);
  for (size_t j = 0; j < n; ++j) {
    for (size_t k = 0; k < j; ++k) {
      double d = 0;
      for (size_t i = 0; i < n; ++i) d += Q(i, j) * Q(i, k);
      for (size_t i = 0; i < n; ++i) Q(i, j) -= d * Q(i, k);
    }
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += Q(i, j) * Q(i, j);
    s = std::sqrt(s);
    for (size_t i = 0; i < n; ++i) Q(i, j) /= s;
  }
  return Q;
}

}  // namespace

TEST(Svd, TwoByTwoClosedForm) {
  // singular values of [[a,b],[c,d]] from the eigenvalues of A^T A
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix A = random_matrix(rng, 2, 2);
    double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    double s1 = a * a + b * b + c * c + d * d;
    double det = a * d - b * c;
    double disc = std::sqrt(s1 * s1 - 4 * det * det);
    auto sv = singular_values(A);
    EXPECT_NEAR(sv[0], std::sqrt((s1 + disc) / 2), 1e-10);
    EXPECT_NEAR(sv[1], std::sqrt(std::max(0.0, (s1 - disc) / 2)), 1e-10);
  }
}

TEST(Svd, FrobeniusAndOrthogonalInvariance) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    size_t m = 1 + rep % 4, n = m + rep % 5;
    Matrix A = random_matrix(rng, m, n);
    auto sv = singular_values(A);
    double fro = 0, s2 = 0;
    for (double v : A.a) fro += v * v;
    for (double s : sv) s2 += s * s;
    EXPECT_NEAR(fro, s2, 1e-10 * fro);
    Matrix B = random_orthogonal(rng, m) * A * random_orthogonal(rng, n);
    auto sb = singular_values(B);
    for (size_t i = 0; i < sv.size(); ++i) EXPECT_NEAR(sv[i], sb[i], 1e-10 * sv[0]);
    EXPECT_NEAR(subreg_modulus(A).value(), subreg_modulus(B).value(), 1e-8 * subreg_modulus(A).value());
  }
}

TEST(Subreg, Examples) {
  EXPECT_DOUBLE_EQ(subreg_modulus(Matrix::diag({1, 1})).value(), 1.0);
  EXPECT_EQ(subreg_modulus(Matrix(3, 2)), ExtReal(0.0));
  // 1/(1/49) is one ulp away from 49 in binary floating point
  for (int k = 1; k <= 50; ++k) EXPECT_DOUBLE_EQ(subreg_modulus(truncated_T(k)).value(), static_cast<double>(k));
}

TEST(Subreg, Scaling) {
  std::mt19937_64 rng(9);
  for (double c : {-3.0, 0.5, 7.0}) {
    Matrix A = random_matrix(rng, 3, 5);
    EXPECT_NEAR(subreg_modulus(A.scaled(c)).value(), subreg_modulus(A).value() / std::abs(c),
                1e-10 * subreg_modulus(A).value());
  }
}

TEST(Truncation, MixedNormAndWitness) {
  EXPECT_DOUBLE_EQ(mixed_norm_max_to_euclid(truncated_T(1)), 1.0);
  double s = 0;
  for (int n = 1; n <= 100; ++n) s += 1.0 / (n * n);
  EXPECT_NEAR(mixed_norm_max_to_euclid(truncated_T(100)), std::sqrt(s), 1e-14);
  EXPECT_NEAR(mixed_norm_max_to_euclid(truncated_T(100)), 1.27866, 1e-4);
  double prev = 0;
  for (int k : {1, 10, 100, 1000}) {
    double v = mixed_norm_max_to_euclid(truncated_T(k));
    EXPECT_GT(v, prev);
    EXPECT_LT(v, std::numbers::pi / std::sqrt(6.0));
    prev = v;
  }
  Point e(50, 0.0);
  e[49] = 1;
  EXPECT_NEAR(injective_subreg_bound_at(truncated_T(50), e), 50.0, 1e-12);
  EXPECT_THROW(truncated_T(0), std::invalid_argument);
  EXPECT_THROW(mixed_norm_max_to_euclid(Matrix::from_rows({{1, 1}, {0, 1}})), std::invalid_argument);
}

TEST(Chain, DiagonalSurjective) {
  auto r = verify_chain(Matrix::diag({2, 3}));
  EXPECT_TRUE(r.surjective);
  EXPECT_DOUBLE_EQ(r.sigma_min, 2.0);
  EXPECT_NEAR(r.sampled_reg_estimate, 0.5, 0.025);
  EXPECT_TRUE(r.agrees);
}

TEST(Chain, NotSurjectiveFailsRegularity) {
  auto r = verify_chain(Matrix::diag({1, 0}));
  EXPECT_FALSE(r.surjective);
  EXPECT_DOUBLE_EQ(r.subreg_value.value(), 1.0);
  EXPECT_FALSE(r.chain_values["reg_holds"].get<bool>());
  EXPECT_FALSE(r.witness.is_null());
}

TEST(Chain, RandomWide) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 4; ++rep) {
    auto r = verify_chain(random_matrix(rng, 2, 4));
    EXPECT_TRUE(r.surjective);
    EXPECT_TRUE(r.agrees) << r.max_discrepancy;
  }
}
