#include "emunet/basis.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "emunet/errors.hpp"

namespace emunet {

void Ensemble::validate() const {
  design.validate(false);
  if (outputs.cols() != design.points.rows())
    throw ConfigError("ensemble: output column count must equal design point count");
  if (outputs.rows() < 2) throw ConfigError("ensemble: outputs must have at least 2 coordinates");
  if (!output_labels.empty() && static_cast<int>(output_labels.size()) != l())
    throw ConfigError("ensemble: output label count mismatch");
}

void GaussianVector::validate() const {
  if (variances.size() != means.size()) throw ConfigError("gaussian vector: size mismatch");
  for (Eigen::Index i = 0; i < variances.size(); ++i)
    if (variances[i] < 0.0) throw ConfigError("gaussian vector: negative variance");
}

PcBasis::PcBasis(Vector mean, double scale, Matrix basis, Vector singular_values,
                 Vector residual_var, bool degenerate)
    : mean_(std::move(mean)),
      scale_(scale),
      basis_(std::move(basis)),
      singular_values_(std::move(singular_values)),
      residual_var_(std::move(residual_var)),
      degenerate_(degenerate) {
  if (scale_ <= 0.0) throw NumericalError("basis scale must be positive");
  if (basis_.rows() != mean_.size() || residual_var_.size() != mean_.size())
    throw NumericalError("basis shape mismatch");
  const Matrix gram = basis_.transpose() * basis_;
  const double off = (gram - Matrix::Identity(q(), q())).cwiseAbs().maxCoeff();
  if (off > 1e-10) throw NumericalError("basis columns are not orthonormal");
  for (Eigen::Index i = 1; i < singular_values_.size(); ++i)
    if (singular_values_[i] > singular_values_[i - 1] + 1e-12)
      throw NumericalError("singular values must be non-increasing");
}

double PcBasis::cumulative_variance_fraction(int k) const {
  const double total = singular_values_.squaredNorm();
  if (total <= 0.0) return 1.0;
  const int kk = std::min<int>(k, static_cast<int>(singular_values_.size()));
  return singular_values_.head(kk).squaredNorm() / total;
}

PcBasis build_basis(const Ensemble& ensemble, const TruncationRule& rule) {
  ensemble.validate();
  const int n = ensemble.n();
  const int l = ensemble.l();
  if (n < 3) throw ConfigError("build_basis: need at least 3 runs");

  const Vector mu = ensemble.outputs.rowwise().mean();
  Matrix centered = ensemble.outputs.colwise() - mu;

  double scale = std::sqrt(centered.squaredNorm() / (static_cast<double>(l) * n - 1.0));
  // Relative threshold: identical columns differ from their mean only by
  // summation roundoff.
  const double magnitude = ensemble.outputs.cwiseAbs().maxCoeff();
  const bool degenerate = !std::isfinite(scale) || scale <= 1e-13 * (1.0 + magnitude);
  if (degenerate) scale = 1.0;
  centered /= scale;

  Eigen::JacobiSVD<Matrix> svd(centered.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank_cap = n - 1;  // centering removes one degree of freedom
  Vector singular_values = Vector::Zero(rank_cap);
  const int available = static_cast<int>(svd.singularValues().size());
  if (!degenerate)
    singular_values.head(std::min(rank_cap, available)) =
        svd.singularValues().head(std::min(rank_cap, available));

  Matrix gamma = Matrix::Zero(l, rank_cap);
  const int v_cols = std::min<int>(rank_cap, static_cast<int>(svd.matrixV().cols()));
  gamma.leftCols(v_cols) = svd.matrixV().leftCols(v_cols);
  // Deterministic sign convention: the entry of largest magnitude in each
  // basis vector is positive.
  for (int i = 0; i < rank_cap; ++i) {
    Eigen::Index arg = 0;
    gamma.col(i).cwiseAbs().maxCoeff(&arg);
    if (gamma(arg, i) < 0.0) gamma.col(i) = -gamma.col(i);
  }

  int q = 1;
  if (rule.fixed_q) {
    q = *rule.fixed_q;
    if (q < 1 || q > rank_cap) throw ConfigError("build_basis: fixed q out of range [1, n-1]");
  } else if (!degenerate) {
    const double total = singular_values.squaredNorm();
    double cum = 0.0;
    for (q = 1; q <= rank_cap; ++q) {
      cum += singular_values[q - 1] * singular_values[q - 1];
      if (total <= 0.0 || cum / total >= rule.variance_fraction) break;
    }
    q = std::min(q, rank_cap);
  }

  // Discarded-component variance per coordinate, back in original units:
  // scale^2 / n * sum_{i>q} sv_i^2 gamma_i gamma_i' has zero-mean residuals
  // over the training ensemble by construction.
  Vector residual_var = Vector::Zero(l);
  for (int i = q; i < rank_cap; ++i)
    residual_var += (singular_values[i] * singular_values[i]) *
                    gamma.col(i).array().square().matrix();
  residual_var *= scale * scale / static_cast<double>(n);

  return PcBasis(mu, scale, gamma.leftCols(q), singular_values, residual_var, degenerate);
}

Vector project(const PcBasis& basis, const Vector& y) {
  if (y.size() != basis.mean().size()) throw ConfigError("project: length mismatch");
  return basis.basis().transpose() * ((y - basis.mean()) / basis.scale());
}

Matrix coefficient_matrix(const PcBasis& basis, const Ensemble& ensemble) {
  if (ensemble.l() != basis.l()) throw ConfigError("coefficient_matrix: length mismatch");
  Matrix coeff(basis.q(), ensemble.n());
  for (int i = 0; i < ensemble.n(); ++i) coeff.col(i) = project(basis, ensemble.outputs.col(i));
  return coeff;
}

Moments reconstruct_moments(const PcBasis& basis, const GaussianVector& coeff) {
  coeff.validate();
  if (coeff.size() != basis.q()) throw ConfigError("reconstruct_moments: coefficient count mismatch");
  Moments out;
  out.mean = basis.mean() + basis.scale() * (basis.basis() * coeff.means);
  out.variance = basis.scale() * basis.scale() *
                     (basis.basis().array().square().matrix() * coeff.variances) +
                 basis.residual_var();
  return out;
}

}  // namespace emunet
