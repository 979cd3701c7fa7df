#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsam/errors.hpp"
#include "tsam/linalg.hpp"

using namespace tsam;

namespace {

Matrix random_spd(Eigen::Index d, RandomStream& rng) {
  Matrix A(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) A(i, j) = rng.normal();
  return A * A.transpose() + 0.5 * Matrix::Identity(d, d);
}

Vector random_vector(Eigen::Index d, RandomStream& rng) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("cholesky agrees with Eigen's LLT") {
  RandomStream rng(11, 0);
  for (Eigen::Index d : {1, 2, 5, 8, 20}) {
    const Matrix C = random_spd(d, rng);
    const Matrix ours = cholesky(C).lower();
    const Matrix ref = Eigen::LLT<Matrix>(C).matrixL();
    CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-10 * C.cwiseAbs().maxCoeff());
    CHECK((cholesky(C).recompose() - C).cwiseAbs().maxCoeff() < 1e-10 * C.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("cholesky rejects matrices that are not positive definite") {
  Matrix C(2, 2);
  C << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(C), NotPositiveDefinite);
  CHECK_THROWS_AS(cholesky(Matrix::Zero(3, 3)), NotPositiveDefinite);
  Matrix nan = Matrix::Identity(2, 2);
  nan(1, 1) = std::nan("");
  CHECK_THROWS_AS(cholesky(nan), NotPositiveDefinite);
}

TEST_CASE("factor construction validates the diagonal") {
  Matrix L = Matrix::Identity(3, 3);
  L(1, 1) = 0.0;
  CHECK_THROWS(CholeskyFactor(L));
  Matrix U = Matrix::Identity(2, 2);
  U(0, 1) = 5.0;
  CHECK(CholeskyFactor(U).lower()(0, 1) == 0.0);
}

TEST_CASE("rank-one update matches refactorization") {
  RandomStream rng(12, 0);
  const Eigen::Index d = 8;
  Matrix C = random_spd(d, rng);
  CholeskyFactor R = cholesky(C);
  for (int k = 0; k < 500; ++k) {
    const Vector v = 0.3 * random_vector(d, rng);
    R.update(v);
    C += v * v.transpose();
  }
  const Matrix ref = Eigen::LLT<Matrix>(C).matrixL();
  CHECK((R.lower() - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rank-one update with a zero vector or sparse vector") {
  RandomStream rng(13, 0);
  const Matrix C = random_spd(4, rng);
  const CholeskyFactor R = cholesky(C);
  CHECK((rank_one_update(R, Vector::Zero(4)).lower() - R.lower()).cwiseAbs().maxCoeff() == 0.0);
  Vector e = Vector::Zero(4);
  e(2) = 1.5;
  const Matrix ref = Eigen::LLT<Matrix>(C + e * e.transpose()).matrixL();
  CHECK((rank_one_update(R, e).lower() - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scale multiplies the covariance by s squared") {
  RandomStream rng(14, 0);
  const Matrix C = random_spd(5, rng);
  CholeskyFactor R = cholesky(C);
  R.scale(0.5);
  CHECK((R.recompose() - 0.25 * C).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS(R.scale(0.0));
}

TEST_CASE("mvn_transform and mvn_sample") {
  Matrix C(2, 2);
  C << 4.0, 1.2, 1.2, 1.0;
  const CholeskyFactor R = cholesky(C);
  Vector mean(2);
  mean << 1.0, -2.0;
  Vector z(2);
  z << 0.5, -1.0;
  CHECK((mvn_transform(mean, R, z) - (mean + R.lower() * z)).norm() < 1e-15);

  // Identical streams give identical draws; the draw equals the transform of
  // the stream's normals.
  RandomStream a(5, 1);
  RandomStream b(5, 1);
  const Vector x = mvn_sample(mean, R, a);
  Vector zz(2);
  zz << b.normal(), b.normal();
  CHECK((x - mvn_transform(mean, R, zz)).norm() == 0.0);

  // Empirical moments: 2·10⁵ draws, tolerance ≈ 5 standard errors.
  RandomStream rng(6, 1);
  const int n = 200000;
  Vector sum = Vector::Zero(2);
  Matrix sq = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector y = mvn_sample(mean, R, rng);
    sum += y;
    sq += (y - mean) * (y - mean).transpose();
  }
  CHECK((sum / n - mean).cwiseAbs().maxCoeff() < 0.025);
  CHECK(((sq / n) - C).cwiseAbs().maxCoeff() < 0.07);
}

TEST_CASE("log_mvn_density against closed forms") {
  Vector x(1), m(1);
  x << 1.3;
  m << 0.2;
  Matrix C(1, 1);
  C << 2.5;
  const double ref = -0.5 * std::log(2 * std::numbers::pi * 2.5) - 0.5 * 1.1 * 1.1 / 2.5;
  CHECK(log_mvn_density(x, m, C) == doctest::Approx(ref).epsilon(1e-14));

  // Diagonal covariance factorizes into univariate terms.
  Vector x3(3), m3(3), v3(3);
  x3 << 0.1, -0.4, 2.0;
  m3 << 0.0, 1.0, 1.5;
  v3 << 1.0, 0.5, 3.0;
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    sum += -0.5 * std::log(2 * std::numbers::pi * v3(i)) - 0.5 * std::pow(x3(i) - m3(i), 2) / v3(i);
  }
  CHECK(log_mvn_density(x3, m3, v3.asDiagonal().toDenseMatrix()) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("GaussianDensity matches the one-shot density") {
  RandomStream rng(15, 0);
  const Matrix C = random_spd(6, rng);
  const Vector mean = random_vector(6, rng);
  const GaussianDensity g(mean, C);
  for (int k = 0; k < 10; ++k) {
    const Vector x = random_vector(6, rng);
    CHECK(g.log_density(x) == doctest::Approx(log_mvn_density(x, mean, C)).epsilon(1e-12));
    CHECK(g.mahalanobis_sq(x) == doctest::Approx((x - mean).dot(C.ldlt().solve(x - mean))).epsilon(1e-10));
  }
}
