#include "tsam/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tsam/errors.hpp"

namespace tsam {

CholeskyFactor::CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {
  if (lower_.rows() != lower_.cols() || lower_.rows() < 1) {
    throw std::invalid_argument("CholeskyFactor: expected a non-empty square matrix");
  }
  lower_.triangularView<Eigen::StrictlyUpper>().setZero();
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    if (!(lower_(i, i) > 0.0) || !std::isfinite(lower_(i, i))) {
      throw NotPositiveDefinite("CholeskyFactor: diagonal entry " + std::to_string(i) +
                                " is not strictly positive");
    }
  }
}

CholeskyFactor CholeskyFactor::identity(Eigen::Index d) { return CholeskyFactor(Matrix::Identity(d, d)); }

Matrix CholeskyFactor::recompose() const { return lower_ * lower_.transpose(); }

void CholeskyFactor::scale(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("CholeskyFactor::scale: factor must be positive");
  lower_ *= s;
}

void CholeskyFactor::update(const Vector& v) {
  const Eigen::Index d = dim();
  if (v.size() != d) throw std::invalid_argument("rank_one_update: dimension mismatch");
  Vector w = v;
  Matrix& L = lower_;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (w(k) == 0.0) continue;
    const double r = std::hypot(L(k, k), w(k));
    const double c = r / L(k, k);
    const double s = w(k) / L(k, k);
    L(k, k) = r;
    for (Eigen::Index i = k + 1; i < d; ++i) {
      L(i, k) = (L(i, k) + s * w(i)) / c;
      w(i) = c * w(i) - s * L(i, k);
    }
  }
}

CholeskyFactor cholesky(const Matrix& C) {
  if (C.rows() != C.cols() || C.rows() < 1) {
    throw std::invalid_argument("cholesky: expected a non-empty square matrix");
  }
  const Eigen::Index d = C.rows();
  const Matrix S = 0.5 * (C + C.transpose());
  Matrix L = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double pivot = S(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is not positive (" +
                                std::to_string(pivot) + ")");
    }
    const double ljj = std::sqrt(pivot);
    L(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < d; ++i) {
      double acc = S(i, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
      L(i, j) = acc / ljj;
    }
  }
  return CholeskyFactor(std::move(L));
}

CholeskyFactor rank_one_update(CholeskyFactor R, const Vector& v) {
  R.update(v);
  return R;
}

Vector mvn_transform(const Vector& mean, const CholeskyFactor& R, const Vector& z) {
  if (mean.size() != R.dim() || z.size() != R.dim()) {
    throw std::invalid_argument("mvn_sample: dimension mismatch");
  }
  return mean + R.lower().triangularView<Eigen::Lower>() * z;
}

Vector mvn_sample(const Vector& mean, const CholeskyFactor& R, RandomStream& rng) {
  Vector z(R.dim());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mvn_transform(mean, R, z);
}

GaussianDensity::GaussianDensity(Vector mean, const Matrix& C) : mean_(std::move(mean)), factor_(cholesky(C)) {
  if (mean_.size() != factor_.dim()) throw std::invalid_argument("GaussianDensity: dimension mismatch");
  const double log_det = 2.0 * factor_.lower().diagonal().array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi) + log_det);
}

double GaussianDensity::mahalanobis_sq(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("GaussianDensity: dimension mismatch");
  const Vector u = factor_.lower().triangularView<Eigen::Lower>().solve(x - mean_);
  return u.squaredNorm();
}

double GaussianDensity::log_density(const Vector& x) const { return log_norm_ - 0.5 * mahalanobis_sq(x); }

double log_mvn_density(const Vector& x, const Vector& mean, const Matrix& C) {
  return GaussianDensity(mean, C).log_density(x);
}

}  // namespace tsam
