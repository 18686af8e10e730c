#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emunet/domain.hpp"

namespace emunet {

// Paired design points and multivariate simulator outputs. Column i of
// `outputs` is the l-vector response at design point i.
struct Ensemble {
  DesignMatrix design;
  Matrix outputs;                         // l x n
  std::vector<std::string> output_labels; // length l (year labels)

  int n() const { return static_cast<int>(outputs.cols()); }
  int l() const { return static_cast<int>(outputs.rows()); }
  void validate() const;
};

struct TruncationRule {
  double variance_fraction = 0.95;
  std::optional<int> fixed_q;
};

// Independent-Gaussian coefficient distributions passed between layers.
struct GaussianVector {
  Vector means;
  Vector variances;

  int size() const { return static_cast<int>(means.size()); }
  void validate() const;
};

struct Moments {
  Vector mean;
  Vector variance;
};

// Centered/scaled SVD basis of an output ensemble. A single global scale (the
// standard deviation of all centered entries) keeps the basis orthonormal in
// the original coordinates up to that scalar.
class PcBasis {
 public:
  PcBasis() = default;
  PcBasis(Vector mean, double scale, Matrix basis, Vector singular_values, Vector residual_var,
          bool degenerate);

  const Vector& mean() const { return mean_; }
  double scale() const { return scale_; }
  const Matrix& basis() const { return basis_; }              // l x q, orthonormal columns
  const Vector& singular_values() const { return singular_values_; }  // all n-1, non-increasing
  const Vector& residual_var() const { return residual_var_; }        // per-coordinate, original units
  int q() const { return static_cast<int>(basis_.cols()); }
  int l() const { return static_cast<int>(basis_.rows()); }
  bool degenerate() const { return degenerate_; }

  // Fraction of total squared singular value mass carried by the first k
  // components; 1.0 for a degenerate (zero-variance) ensemble.
  double cumulative_variance_fraction(int k) const;

 private:
  Vector mean_;
  double scale_ = 1.0;
  Matrix basis_;
  Vector singular_values_;
  Vector residual_var_;
  bool degenerate_ = false;
};

// SVD of the scaled centered ensemble; q is the smallest count reaching the
// rule's variance fraction unless fixed explicitly.
PcBasis build_basis(const Ensemble& ensemble, const TruncationRule& rule = {});

// Coefficients of y in the truncated basis: Gamma_q' (y - mean) / scale.
Vector project(const PcBasis& basis, const Vector& y);

// Per-run coefficients of every ensemble column, q x n.
Matrix coefficient_matrix(const PcBasis& basis, const Ensemble& ensemble);

// Pushes independent coefficient moments back to the original coordinates;
// the discarded-component variance is added per coordinate.
Moments reconstruct_moments(const PcBasis& basis, const GaussianVector& coeff);

}  // namespace emunet
