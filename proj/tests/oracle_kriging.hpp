#pragma once

// Independent textbook kriging oracle: plain dense inverses and explicit
// formulas, sharing no code with the library's factorization path.

#include <Eigen/Dense>
#include <cmath>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Krige {
  double mean = 0.0;
  double variance = 0.0;
};

// U: n x p unit-cube inputs, f: outputs, linear_trend toggles (1, u) vs (1),
// u: query point in unit-cube coordinates.
inline Krige dense_krige(const Matrix& U, const Vector& f, bool linear_trend, const Vector& ls,
                         double nugget, const Vector& u) {
  const int n = static_cast<int>(U.rows());
  const int p = static_cast<int>(U.cols());
  const int m = linear_trend ? p + 1 : 1;

  auto corr = [&](const Vector& a, const Vector& b) {
    double s = 0.0;
    for (int k = 0; k < p; ++k) {
      const double d = (a[k] - b[k]) / ls[k];
      s += d * d;
    }
    return std::exp(-s);
  };
  auto trend = [&](const Vector& x) {
    Vector h = Vector::Ones(m);
    if (linear_trend) h.tail(p) = x;
    return h;
  };

  Matrix R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      R(i, j) = corr(U.row(i).transpose(), U.row(j).transpose()) + (i == j ? nugget : 0.0);
  Matrix H(n, m);
  for (int i = 0; i < n; ++i) H.row(i) = trend(U.row(i).transpose()).transpose();

  const Matrix Rinv = R.inverse();
  const Matrix Ginv = (H.transpose() * Rinv * H).inverse();
  const Vector beta = Ginv * (H.transpose() * (Rinv * f));
  const Vector resid = f - H * beta;
  const double sigma2 = resid.dot(Rinv * resid) / (n - m);

  Vector r(n);
  for (int i = 0; i < n; ++i) r[i] = corr(u, U.row(i).transpose());
  const Vector h = trend(u);
  const Vector gap = h - H.transpose() * (Rinv * r);

  Krige out;
  out.mean = h.dot(beta) + r.dot(Rinv * resid);
  out.variance = sigma2 * (1.0 - r.dot(Rinv * r) + gap.dot(Ginv * gap));
  return out;
}

}  // namespace oracle
