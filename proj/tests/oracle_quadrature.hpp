#pragma once

// Numerical-quadrature oracle for the closed-form kernel-moment factors:
// adaptive Gauss-Kronrod over the defining Gaussian integrals.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace oracle {

// E[g(W)] for W ~ N(m, v), v > 0.
template <class G>
double gaussian_expectation(double m, double v, G&& g) {
  const double sd = std::sqrt(v);
  const double norm = 1.0 / (sd * std::sqrt(2.0 * 3.14159265358979323846));
  auto integrand = [&](double x) {
    const double z = (x - m) / sd;
    return g(x) * norm * std::exp(-0.5 * z * z);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, m - 14.0 * sd, m + 14.0 * sd, 15, 1e-13);
}

inline double xi_quad(double m, double v, double delta, double w) {
  return gaussian_expectation(m, v, [&](double x) {
    const double d = (x - w) / delta;
    return std::exp(-d * d);
  });
}

inline double zeta_quad(double m, double v, double delta, double wt, double ws) {
  return gaussian_expectation(m, v, [&](double x) {
    const double dt = (x - wt) / delta;
    const double ds = (x - ws) / delta;
    return std::exp(-dt * dt - ds * ds);
  });
}

inline double psi_quad(double m, double v, double delta, double w) {
  return gaussian_expectation(m, v, [&](double x) {
    const double d = (x - w) / delta;
    return x * std::exp(-d * d);
  });
}

}  // namespace oracle
