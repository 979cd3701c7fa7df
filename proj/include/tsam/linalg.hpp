#pragma once

#include <Eigen/Dense>

#include "tsam/random.hpp"

namespace tsam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower-triangular factor R of a symmetric positive definite matrix, C = R Rᵀ.
class CholeskyFactor {
 public:
  /// Takes ownership of a lower-triangular matrix with a strictly positive
  /// diagonal. Entries above the diagonal are ignored and zeroed.
  explicit CholeskyFactor(Matrix lower);

  static CholeskyFactor identity(Eigen::Index d);

  Eigen::Index dim() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }

  /// R Rᵀ.
  Matrix recompose() const;

  /// R ← s·R, i.e. C ← s²·C. Requires s > 0.
  void scale(double s);

  /// In-place rank-one update: R Rᵀ ← R Rᵀ + v vᵀ, O(d²).
  void update(const Vector& v);

 private:
  Matrix lower_;
};

/// Factorizes (C + Cᵀ)/2. Throws NotPositiveDefinite when a pivot is not
/// strictly positive.
CholeskyFactor cholesky(const Matrix& C);

/// Returns the factor of R Rᵀ + v vᵀ.
CholeskyFactor rank_one_update(CholeskyFactor R, const Vector& v);

/// mean + R z for a given vector of standard normal draws z.
Vector mvn_transform(const Vector& mean, const CholeskyFactor& R, const Vector& z);

/// mean + R z, drawing the d entries of z from `rng` in index order.
Vector mvn_sample(const Vector& mean, const CholeskyFactor& R, RandomStream& rng);

/// Log-density of N(mean, C) at x, including the normalizing constant.
double log_mvn_density(const Vector& x, const Vector& mean, const Matrix& C);

/// N(mean, C) with the factorization done once; for repeated evaluation.
class GaussianDensity {
 public:
  GaussianDensity(Vector mean, const Matrix& C);

  double log_density(const Vector& x) const;
  /// (x − mean)ᵀ C⁻¹ (x − mean).
  double mahalanobis_sq(const Vector& x) const;

  const Vector& mean() const { return mean_; }
  const CholeskyFactor& factor() const { return factor_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  CholeskyFactor factor_;
  double log_norm_;
};

}  // namespace tsam
