#include <doctest.h>

#include <cmath>
#include <numbers>

#include "emunet/design.hpp"
#include "emunet/errors.hpp"
#include "emunet/gp.hpp"
#include "emunet/rng.hpp"
#include "oracle_kriging.hpp"

using namespace emunet;

namespace {

DesignMatrix grid_design_1d(int n, double lo = 0.0, double hi = 1.0) {
  Domain d({{"x", lo, hi}});
  Matrix pts(n, 1);
  for (int i = 0; i < n; ++i) pts(i, 0) = lo + (hi - lo) * (i + 0.5) / n;
  return DesignMatrix{pts, d};
}

FitOptions fast_fit(std::uint64_t seed = 0) {
  FitOptions opts;
  opts.n_starts = 4;
  opts.seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("constant outputs give a constant predictive mean with near-zero variance") {
  const auto design = grid_design_1d(6);
  const Vector f = Vector::Constant(6, 3.25);
  const GpModel model = fit_gp(design, f, TrendKind::Constant, fast_fit());
  for (double x : {0.05, 0.33, 0.71, 0.98}) {
    const Prediction p = model.predict(Vector::Constant(1, x));
    CHECK(p.mean == doctest::Approx(3.25).epsilon(1e-9));
  }
  for (int i = 0; i < design.n(); ++i) {
    const Prediction p = model.predict(design.points.row(i).transpose());
    CHECK(p.variance <= 10.0 * model.kernel().nugget * model.sigma2() + 1e-300);
  }
}

TEST_CASE("linear trend absorbs a linear function exactly") {
  const auto design = grid_design_1d(5);
  Vector f(5);
  for (int i = 0; i < 5; ++i) f[i] = design.points(i, 0);
  const GpModel model = fit_gp(design, f, TrendKind::Linear, fast_fit());
  CHECK(model.beta()[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(model.beta()[1] == doctest::Approx(1.0).epsilon(1e-8));
  for (double x : {0.11, 0.52, 0.9}) {
    const Prediction p = model.predict(Vector::Constant(1, x));
    CHECK(p.mean == doctest::Approx(x).epsilon(1e-7));
  }
}

TEST_CASE("prediction matches the independent dense kriging oracle on sin data") {
  const auto design = grid_design_1d(6);
  Vector f(6);
  for (int i = 0; i < 6; ++i) f[i] = std::sin(2.0 * std::numbers::pi * design.points(i, 0));
  const GpModel model = fit_gp(design, f, TrendKind::Constant, fast_fit(3));

  const Matrix U = design.domain.to_unit_cube_rows(design.points);
  // re-derive the training outputs in the model's canonical row order
  Vector f_model = model.outputs();
  for (double x : {0.17, 0.42, 0.63, 0.88}) {
    const Vector u = Vector::Constant(1, x);
    const auto got = model.predict_unit(u);
    const auto want = oracle::dense_krige(model.inputs_unit(), f_model, false,
                                          model.kernel().lengthscales, model.kernel().nugget, u);
    CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
    CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-8));
  }
}

TEST_CASE("oracle agreement holds in 3 dimensions with a linear trend") {
  Domain dom({{"a", -1.0, 1.0}, {"b", 0.5, 1.0}, {"c", 5.0, 20.0}});
  const auto design = lhc_maximin(14, dom, 4, 17);
  Vector f(14);
  for (int i = 0; i < 14; ++i) {
    const auto x = design.points.row(i);
    f[i] = std::sin(x[0]) + 0.5 * x[1] * x[1] + 0.01 * x[2];
  }
  const GpModel model = fit_gp(design, f, TrendKind::Linear, fast_fit(5));
  Rng rng(9);
  for (int t = 0; t < 5; ++t) {
    Vector u(3);
    for (int k = 0; k < 3; ++k) u[k] = rng.uniform();
    const auto got = model.predict_unit(u);
    const auto want = oracle::dense_krige(model.inputs_unit(), model.outputs(), true,
                                          model.kernel().lengthscales, model.kernel().nugget, u);
    CHECK(got.mean == doctest::Approx(want.mean).epsilon(1e-8));
    CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-8));
  }
}

TEST_CASE("training points are interpolated") {
  const auto design = grid_design_1d(8);
  Vector f(8);
  for (int i = 0; i < 8; ++i) f[i] = std::exp(design.points(i, 0)) - 0.3;
  const GpModel model = fit_gp(design, f, TrendKind::Linear, fast_fit(1));
  for (int i = 0; i < 8; ++i) {
    const Prediction p = model.predict(design.points.row(i).transpose());
    CHECK(std::abs(p.mean - f[i]) <= 1e-6 * (1.0 + std::abs(f[i])));
    CHECK(p.variance <= 10.0 * model.kernel().nugget * model.sigma2());
  }
}

TEST_CASE("far from the data the variance reverts to at least sigma2") {
  const auto design = grid_design_1d(5, 0.0, 0.2);
  Vector f(5);
  for (int i = 0; i < 5; ++i) f[i] = std::cos(8.0 * design.points(i, 0));
  // fixed small lengthscale so 10 lengthscales fit inside the unit interval
  Domain wide({{"x", 0.0, 1.0}});
  Matrix unit(5, 1);
  for (int i = 0; i < 5; ++i) unit(i, 0) = design.points(i, 0);
  const GpModel model(wide, unit, f, TrendKind::Constant, KernelSpec{Vector::Constant(1, 0.02), 1e-8});
  const Prediction p = model.predict_unit(Vector::Constant(1, 0.9));
  CHECK(p.variance >= model.sigma2());
}

TEST_CASE("extrapolation is flagged, not fatal") {
  const auto design = grid_design_1d(5);
  Vector f(5);
  for (int i = 0; i < 5; ++i) f[i] = design.points(i, 0) * 2.0;
  const GpModel model = fit_gp(design, f, TrendKind::Linear, fast_fit());
  const Prediction inside = model.predict(Vector::Constant(1, 0.5));
  const Prediction outside = model.predict(Vector::Constant(1, 1.3));
  CHECK_FALSE(inside.extrapolated);
  CHECK(outside.extrapolated);
}

TEST_CASE("duplicate design points are rejected") {
  Domain d({{"x", 0.0, 1.0}});
  Matrix pts(4, 1);
  pts << 0.1, 0.5, 0.5, 0.9;
  Vector f(4);
  f << 1.0, 2.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_gp(DesignMatrix{pts, d}, f, TrendKind::Constant, fast_fit()),
                  NumericalError);
}

TEST_CASE("too few runs for the trend is a config error") {
  const auto design = grid_design_1d(3);
  Vector f(3);
  f << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(fit_gp(design, f, TrendKind::Linear, fast_fit()), ConfigError);
}

TEST_CASE("profile objective: location invariance and scale equivariance") {
  const auto design = grid_design_1d(7);
  Vector f(7);
  for (int i = 0; i < 7; ++i) f[i] = std::sin(5.0 * design.points(i, 0));
  const Vector ls = Vector::Constant(1, 0.4);

  const double base = loglik_profile(design, f, TrendKind::Linear, ls);
  const double shifted = loglik_profile(design, f.array() + 11.0, TrendKind::Linear, ls);
  CHECK(shifted == doctest::Approx(base).epsilon(1e-9));

  const double c = 3.7;
  const double scaled = loglik_profile(design, c * f, TrendKind::Linear, ls);
  const int n_minus_m = 7 - 2;
  CHECK(scaled == doctest::Approx(base - n_minus_m * std::log(c)).epsilon(1e-9));
}

TEST_CASE("optimizer beats random lengthscale draws") {
  const auto design = grid_design_1d(8);
  Vector f(8);
  for (int i = 0; i < 8; ++i) {
    const double x = design.points(i, 0);
    f[i] = std::sin(2.0 * std::numbers::pi * x) + 0.2 * x;
  }
  const GpModel model = fit_gp(design, f, TrendKind::Constant, fast_fit(11));
  const double best =
      loglik_profile(design, f, TrendKind::Constant, model.kernel().lengthscales,
                     model.kernel().nugget);
  Rng rng(101);
  for (int t = 0; t < 20; ++t) {
    const Vector ls = Vector::Constant(1, std::exp(rng.uniform(std::log(0.01), std::log(10.0))));
    CHECK(best >= loglik_profile(design, f, TrendKind::Constant, ls, model.kernel().nugget) - 1e-7);
  }
}

TEST_CASE("fits are exactly invariant under permutation of training rows") {
  Domain dom({{"a", 0.0, 1.0}, {"b", 0.0, 2.0}});
  const auto design = lhc_maximin(10, dom, 3, 23);
  Vector f(10);
  for (int i = 0; i < 10; ++i)
    f[i] = std::sin(3.0 * design.points(i, 0)) + design.points(i, 1);

  Matrix shuffled = design.points;
  Vector f_shuffled = f;
  Rng rng(4);
  for (int i = 9; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    shuffled.row(i).swap(shuffled.row(j));
    std::swap(f_shuffled[i], f_shuffled[j]);
  }

  const GpModel a = fit_gp(design, f, TrendKind::Linear, fast_fit(6));
  const GpModel b = fit_gp(DesignMatrix{shuffled, dom}, f_shuffled, TrendKind::Linear, fast_fit(6));
  CHECK(a.kernel().lengthscales == b.kernel().lengthscales);
  Rng qrng(8);
  for (int t = 0; t < 10; ++t) {
    Vector x(2);
    x << qrng.uniform(), qrng.uniform(0.0, 2.0);
    const auto pa = a.predict(x);
    const auto pb = b.predict(x);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.variance == pb.variance);
  }
}

TEST_CASE("optimized lengthscales are stable under affine output transforms") {
  const auto design = grid_design_1d(9);
  Vector f(9);
  for (int i = 0; i < 9; ++i) f[i] = std::sin(6.0 * design.points(i, 0));
  const GpModel a = fit_gp(design, f, TrendKind::Linear, fast_fit(2));
  const GpModel b = fit_gp(design, (2.5 * f).array() + 40.0, TrendKind::Linear, fast_fit(2));
  CHECK(a.kernel().lengthscales[0] ==
        doctest::Approx(b.kernel().lengthscales[0]).epsilon(1e-3));
}
