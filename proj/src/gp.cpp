#include "emunet/gp.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "emunet/errors.hpp"
#include "emunet/parallel.hpp"
#include "emunet/rng.hpp"

namespace emunet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix correlation_matrix(const Matrix& U, const Vector& ls, double nugget) {
  const int n = static_cast<int>(U.rows());
  Matrix R = Matrix::Identity(n, n) * (1.0 + nugget);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = se_correlation(U.row(i).transpose(), U.row(j).transpose(), ls);
      R(i, j) = r;
      R(j, i) = r;
    }
  return R;
}

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double sigma2_floor(const Vector& f) {
  return 1e-14 * (1.0 + f.squaredNorm() / static_cast<double>(f.size()));
}

// Integrated log posterior of the lengthscales; -inf on factorization failure.
double profile_value(const Matrix& U, const Vector& f, const Matrix& H, const Vector& ls,
                     double nugget) {
  const int n = static_cast<int>(U.rows());
  const int m = static_cast<int>(H.cols());
  Eigen::LLT<Matrix> llt(correlation_matrix(U, ls, nugget));
  if (llt.info() != Eigen::Success) return kNegInf;
  const Matrix rinv_h = llt.solve(H);
  Matrix gram = H.transpose() * rinv_h;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::LLT<Matrix> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success) return kNegInf;
  const Vector rinv_f = llt.solve(f);
  const Vector beta = gram_llt.solve(H.transpose() * rinv_f);
  const Vector resid = f - H * beta;
  const double sigma2 = std::max(resid.dot(llt.solve(resid)) / (n - m), sigma2_floor(f));
  return -0.5 * (n - m) * std::log(sigma2) - 0.5 * log_det_from_llt(llt) -
         0.5 * log_det_from_llt(gram_llt);
}

struct NmResult {
  Vector x;
  double value = kNegInf;  // maximized objective
};

// Nelder-Mead simplex minimization; deterministic given the start point.
NmResult nelder_mead_max(const std::function<double(const Vector&)>& objective, const Vector& x0,
                         double step, int max_iter, double tol) {
  const int d = static_cast<int>(x0.size());
  auto cost = [&](const Vector& x) { return -objective(x); };

  std::vector<Vector> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 1; i <= d; ++i) xs[i][i - 1] += step;
  for (int i = 0; i <= d; ++i) fs[i] = cost(xs[i]);

  std::vector<int> order(d + 1);
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0], second_worst = order[d - 1], worst = order[d];
    if (std::abs(fs[worst] - fs[best]) <= tol * (1.0 + std::abs(fs[best]))) break;

    Vector centroid = Vector::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= d;

    const Vector reflected = centroid + (centroid - xs[worst]);
    const double fr = cost(reflected);
    if (fr < fs[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = cost(expanded);
      if (fe < fr) {
        xs[worst] = expanded;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
    } else if (fr < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = fr;
    } else {
      const Vector contracted = centroid + 0.5 * (xs[worst] - centroid);
      const double fc = cost(contracted);
      if (fc < fs[worst]) {
        xs[worst] = contracted;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = cost(xs[i]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (fs[i] < fs[best]) best = i;
  return NmResult{xs[best], -fs[best]};
}

// Canonical (lexicographic) row order makes fits exactly invariant under
// permutation of the training data.
std::vector<int> canonical_order(const Matrix& U) {
  std::vector<int> idx(U.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      if (U(a, j) < U(b, j)) return true;
      if (U(a, j) > U(b, j)) return false;
    }
    return false;
  });
  return idx;
}

}  // namespace

int trend_size(TrendKind kind, int p) { return kind == TrendKind::Constant ? 1 : p + 1; }

Vector trend_vector(TrendKind kind, const Vector& u) {
  if (kind == TrendKind::Constant) return Vector::Ones(1);
  Vector h(u.size() + 1);
  h[0] = 1.0;
  h.tail(u.size()) = u;
  return h;
}

Matrix trend_matrix(TrendKind kind, const Matrix& unit_points) {
  const int n = static_cast<int>(unit_points.rows());
  Matrix H(n, trend_size(kind, static_cast<int>(unit_points.cols())));
  for (int i = 0; i < n; ++i)
    H.row(i) = trend_vector(kind, unit_points.row(i).transpose()).transpose();
  return H;
}

double se_correlation(const Vector& a, const Vector& b, const Vector& lengthscales) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / lengthscales[k];
    s += d * d;
  }
  return std::exp(-s);
}

void KernelSpec::validate(int p) const {
  if (static_cast<int>(lengthscales.size()) != p)
    throw ConfigError("kernel lengthscale count does not match input dimension");
  for (Eigen::Index k = 0; k < lengthscales.size(); ++k)
    if (!(lengthscales[k] > 0.0)) throw ConfigError("kernel lengthscales must be positive");
  if (nugget < 0.0) throw ConfigError("kernel nugget must be non-negative");
}

GpModel::GpModel(Domain domain, Matrix unit_inputs, Vector outputs, TrendKind trend,
                 KernelSpec kernel)
    : domain_(std::move(domain)),
      inputs_(std::move(unit_inputs)),
      outputs_(std::move(outputs)),
      trend_(trend),
      kernel_(std::move(kernel)) {
  const int n = static_cast<int>(inputs_.rows());
  const int p = static_cast<int>(inputs_.cols());
  kernel_.validate(p);
  if (outputs_.size() != n) throw ConfigError("training output length does not match design");
  const int m = trend_size(trend_, p);
  if (n <= m) throw ConfigError("need more runs than trend coefficients");

  corr_llt_.compute(correlation_matrix(inputs_, kernel_.lengthscales, kernel_.nugget));
  if (corr_llt_.info() != Eigen::Success)
    throw NumericalError("correlation matrix factorization failed");

  const Matrix H = trend_matrix(trend_, inputs_);
  rinv_trend_ = corr_llt_.solve(H);
  Matrix gram = H.transpose() * rinv_trend_;
  gram = 0.5 * (gram + gram.transpose()).eval();
  gram_llt_.compute(gram);
  if (gram_llt_.info() != Eigen::Success)
    throw NumericalError("trend Gram matrix factorization failed");

  beta_ = gram_llt_.solve(H.transpose() * corr_llt_.solve(outputs_));
  const Vector resid = outputs_ - H * beta_;
  alpha_ = corr_llt_.solve(resid);
  sigma2_ = std::max(resid.dot(alpha_) / (n - m), sigma2_floor(outputs_));
}

Prediction GpModel::predict(const Vector& x) const {
  const bool extrapolated = !domain_.contains(x);
  return predict_unit(domain_.to_unit_cube_unchecked(x), extrapolated);
}

Prediction GpModel::predict_unit(const Vector& u, bool extrapolated) const {
  const int n = this->n();
  Vector r(n);
  for (int i = 0; i < n; ++i)
    r[i] = se_correlation(u, inputs_.row(i).transpose(), kernel_.lengthscales);
  // The nugget is part of the correlation kernel (a delta at coincident
  // points), so a query that lands on a training input reproduces the stored
  // run exactly even when R is badly conditioned.
  for (int i = 0; i < n; ++i) {
    if ((u - inputs_.row(i).transpose()).lpNorm<Eigen::Infinity>() <= 1e-10) {
      r[i] += kernel_.nugget;
      break;
    }
  }
  const Vector h = trend_vector(trend_, u);

  Prediction out;
  out.extrapolated = extrapolated;
  out.mean = h.dot(beta_) + r.dot(alpha_);
  const Vector rinv_r = corr_llt_.solve(r);
  const Vector trend_gap = h - rinv_trend_.transpose() * r;
  const double var =
      sigma2_ * (1.0 - r.dot(rinv_r) + trend_gap.dot(gram_llt_.solve(trend_gap)));
  out.variance = std::max(var, 0.0);
  return out;
}

GpModel fit_gp(const DesignMatrix& design, const Vector& outputs, TrendKind trend,
               const FitOptions& options) {
  design.validate();
  const int n = design.n();
  const int p = design.p();
  if (outputs.size() != n) throw ConfigError("fit_gp: output length does not match design");
  const int m = trend_size(trend, p);
  if (n < m + 2) throw ConfigError("fit_gp: need at least m + 2 runs");

  Matrix U_raw = design.domain.to_unit_cube_rows(design.points);
  const auto order = canonical_order(U_raw);
  Matrix U(n, p);
  Vector f(n);
  for (int i = 0; i < n; ++i) {
    U.row(i) = U_raw.row(order[i]);
    f[i] = outputs[order[i]];
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((U.row(i) - U.row(j)).lpNorm<Eigen::Infinity>() <= 1e-10)
        throw NumericalError("fit_gp: duplicate design points");

  const Matrix H = trend_matrix(trend, U);
  const double lo = options.log_lengthscale_lower;
  const double hi = options.log_lengthscale_upper;

  auto objective = [&](const Vector& log_ls) {
    Vector clamped = log_ls.cwiseMax(lo).cwiseMin(hi);
    const double excess = (log_ls - clamped).squaredNorm();
    const double value = profile_value(U, f, H, clamped.array().exp().matrix(), options.nugget);
    return value - 1e3 * excess;
  };

  const int n_starts = std::max(options.n_starts, 1);
  std::vector<NmResult> results(n_starts);
  auto run_start = [&](std::int64_t s) {
    Vector x0(p);
    if (s == 0) {
      x0.setConstant(std::log(0.5));
    } else {
      Rng rng(derive_seed(options.seed, 1000 + static_cast<std::uint64_t>(s)));
      for (int k = 0; k < p; ++k) x0[k] = rng.uniform(lo, hi);
    }
    results[s] = nelder_mead_max(objective, x0, 0.5, options.max_iterations * p,
                                 options.tolerance);
  };
  if (options.parallel)
    parallel_for(n_starts, run_start);
  else
    serial_for(n_starts, run_start);

  int best = 0;
  for (int s = 1; s < n_starts; ++s)
    if (results[s].value > results[best].value) best = s;
  if (results[best].value == kNegInf)
    throw NumericalError("fit_gp: no start produced a positive definite correlation matrix");

  const Vector log_ls = results[best].x.cwiseMax(lo).cwiseMin(hi);
  KernelSpec kernel{log_ls.array().exp().matrix(), options.nugget};

  // Escalate the nugget on factorization failure; deterministic simulators
  // need it only for stability.
  for (;;) {
    try {
      return GpModel(design.domain, U, f, trend, kernel);
    } catch (const NumericalError&) {
      kernel.nugget *= 10.0;
      if (kernel.nugget > options.max_nugget) throw;
    }
  }
}

double loglik_profile(const DesignMatrix& design, const Vector& outputs, TrendKind trend,
                      const Vector& lengthscales, double nugget) {
  design.validate();
  const int n = design.n();
  if (outputs.size() != n) throw ConfigError("loglik_profile: output length does not match design");
  KernelSpec spec{lengthscales, nugget};
  spec.validate(design.p());

  Matrix U_raw = design.domain.to_unit_cube_rows(design.points);
  const auto order = canonical_order(U_raw);
  Matrix U(n, design.p());
  Vector f(n);
  for (int i = 0; i < n; ++i) {
    U.row(i) = U_raw.row(order[i]);
    f[i] = outputs[order[i]];
  }
  return profile_value(U, f, trend_matrix(trend, U), lengthscales, nugget);
}

}  // namespace emunet
