#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdint>

#include "emunet/domain.hpp"

namespace emunet {

enum class TrendKind { Constant, Linear };

int trend_size(TrendKind kind, int p);
// h(u) on unit-cube coordinates: (1) or (1, u_1, ..., u_p).
Vector trend_vector(TrendKind kind, const Vector& u);
Matrix trend_matrix(TrendKind kind, const Matrix& unit_points);

// Squared-exponential correlation with per-dimension lengthscales on the
// unit-cube scale: r(a,b) = exp(-sum_k (a_k-b_k)^2 / ls_k^2).
double se_correlation(const Vector& a, const Vector& b, const Vector& lengthscales);

struct KernelSpec {
  Vector lengthscales;   // unit-cube scale, one per input dimension
  double nugget = 1e-8;

  void validate(int p) const;
};

struct FitOptions {
  int n_starts = 10;
  std::uint64_t seed = 0;
  double nugget = 1e-8;
  double max_nugget = 1e-4;   // escalation ceiling on factorization failure
  double log_lengthscale_lower = std::log(0.01);
  double log_lengthscale_upper = std::log(10.0);
  int max_iterations = 400;   // simplex iterations per start
  double tolerance = 1e-10;
  bool parallel = true;       // run starts across OpenMP threads
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  bool extrapolated = false;
};

// One fitted univariate emulator: generalized-least-squares trend, SE
// correlation over unit-cube inputs, and the cached factorizations needed
// for prediction. Immutable after construction; predict is safe for
// concurrent readers.
class GpModel {
 public:
  GpModel() = default;
  // Builds all factorizations for fixed hyperparameters. Training inputs are
  // given in unit-cube coordinates; rows must be pre-sorted (fit_gp
  // canonicalizes order so fits are exactly permutation invariant).
  GpModel(Domain domain, Matrix unit_inputs, Vector outputs, TrendKind trend, KernelSpec kernel);

  Prediction predict(const Vector& x) const;            // natural units
  Prediction predict_unit(const Vector& u, bool extrapolated = false) const;

  const Domain& domain() const { return domain_; }
  const Matrix& inputs_unit() const { return inputs_; }
  const Vector& outputs() const { return outputs_; }
  TrendKind trend() const { return trend_; }
  const Vector& beta() const { return beta_; }
  const KernelSpec& kernel() const { return kernel_; }
  double sigma2() const { return sigma2_; }
  const Vector& alpha() const { return alpha_; }
  int n() const { return static_cast<int>(inputs_.rows()); }
  int p() const { return static_cast<int>(inputs_.cols()); }
  int m() const { return static_cast<int>(beta_.size()); }

  // Internals consumed by the linked-layer moment assembly.
  const Eigen::LLT<Matrix>& corr_llt() const { return corr_llt_; }
  const Matrix& rinv_trend() const { return rinv_trend_; }           // R^{-1} H
  const Eigen::LLT<Matrix>& trend_gram_llt() const { return gram_llt_; }  // chol(H' R^{-1} H)

 private:
  Domain domain_;
  Matrix inputs_;    // n x p, unit cube
  Vector outputs_;   // n
  TrendKind trend_ = TrendKind::Constant;
  KernelSpec kernel_;
  Vector beta_;
  double sigma2_ = 0.0;
  Eigen::LLT<Matrix> corr_llt_;
  Vector alpha_;     // R^{-1}(f - H beta)
  Matrix rinv_trend_;
  Eigen::LLT<Matrix> gram_llt_;
};

// Maximum-a-posteriori lengthscales under the reference prior with the trend
// coefficients and process variance integrated out; multi-start simplex
// search on log-lengthscales. Deterministic given options.seed.
GpModel fit_gp(const DesignMatrix& design, const Vector& outputs, TrendKind trend,
               const FitOptions& options = {});

// Integrated log posterior of the lengthscales (up to a constant):
//   -(n-m)/2 log sigma2(ls) - 1/2 log det R - 1/2 log det(H'R^{-1}H).
// Returns -infinity when R (or the trend Gram) is not positive definite.
double loglik_profile(const DesignMatrix& design, const Vector& outputs, TrendKind trend,
                      const Vector& lengthscales, double nugget = 1e-8);

}  // namespace emunet
