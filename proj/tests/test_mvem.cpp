#include <doctest.h>

#include <cmath>

#include "emunet/design.hpp"
#include "emunet/errors.hpp"
#include "emunet/mvem.hpp"
#include "emunet/rng.hpp"

using namespace emunet;

namespace {

// Smooth 2-input family of 10-vector outputs.
Ensemble toy_ensemble(const DesignMatrix& design) {
  Ensemble ens;
  ens.design = design;
  const int l = 10;
  ens.outputs.resize(l, design.n());
  for (int i = 0; i < design.n(); ++i) {
    const double a = design.points(i, 0);
    const double b = design.points(i, 1);
    for (int j = 0; j < l; ++j)
      ens.outputs(j, i) = (2.0 + std::sin(2.0 * a)) * std::cos(0.25 * j) +
                          0.8 * b * std::sin(0.4 * j + 1.0);
  }
  return ens;
}

Domain toy_domain() { return Domain({{"a", 0.0, 1.0}, {"b", -1.0, 1.0}}); }

MvSpec fast_spec(std::uint64_t seed = 0) {
  MvSpec spec;
  spec.rule = TruncationRule{0.95, 2};
  spec.fit.n_starts = 4;
  spec.fit.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("inactive inputs drive their lengthscales to the upper half of the bound") {
  const auto design = lhc_maximin(14, toy_domain(), 4, 51);
  Ensemble ens;
  ens.design = design;
  ens.outputs.resize(8, design.n());
  for (int i = 0; i < design.n(); ++i) {
    const double a = design.points(i, 0);  // coordinate b is inert
    for (int j = 0; j < 8; ++j) ens.outputs(j, i) = std::sin(3.0 * a + 0.3 * j) + 0.5 * a * j;
  }
  const MvEmulator em = fit_mv(ens, fast_spec(3));
  for (const auto& model : em.coeff_models) CHECK(model.kernel().lengthscales[1] >= 5.0);
}

TEST_CASE("training points are reproduced through the truncated basis") {
  const auto design = lhc_maximin(12, toy_domain(), 4, 52);
  const Ensemble ens = toy_ensemble(design);
  const MvEmulator em = fit_mv(ens, fast_spec(4));
  for (int i = 0; i < ens.n(); ++i) {
    const MvPrediction pred = predict_mv(em, ens.design.points.row(i).transpose());
    const Vector coeff = project(em.basis, ens.outputs.col(i));
    const Vector truncated = em.basis.mean() + em.basis.scale() * (em.basis.basis() * coeff);
    for (int j = 0; j < ens.l(); ++j) {
      const double trunc_err = std::abs(truncated[j] - ens.outputs(j, i));
      CHECK(std::abs(pred.mean[j] - ens.outputs(j, i)) <= 2.0 * trunc_err + 1e-6);
      CHECK(pred.variance[j] >= em.basis.residual_var()[j] - 1e-15);
    }
  }
}

TEST_CASE("output variance equals the dense coefficient-variance push-through") {
  const auto design = lhc_maximin(12, toy_domain(), 4, 53);
  const MvEmulator em = fit_mv(toy_ensemble(design), fast_spec(5));
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    Vector x(2);
    x << rng.uniform(), rng.uniform(-1.0, 1.0);
    const MvPrediction pred = predict_mv(em, x);
    const double s2 = em.basis.scale() * em.basis.scale();
    for (int j = 0; j < em.basis.l(); ++j) {
      double direct = em.basis.residual_var()[j];
      for (int k = 0; k < em.q(); ++k)
        direct += s2 * em.basis.basis()(j, k) * em.basis.basis()(j, k) * pred.coeff.variances[k];
      CHECK(pred.variance[j] == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("refitting a column-permuted ensemble gives identical predictions") {
  const auto design = lhc_maximin(11, toy_domain(), 4, 54);
  const Ensemble ens = toy_ensemble(design);

  Ensemble shuffled = ens;
  Rng rng(7);
  for (int i = ens.n() - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(i + 1));
    shuffled.design.points.row(i).swap(shuffled.design.points.row(j));
    shuffled.outputs.col(i).swap(shuffled.outputs.col(j));
  }

  const MvEmulator a = fit_mv(ens, fast_spec(8));
  const MvEmulator b = fit_mv(shuffled, fast_spec(8));
  Rng qrng(9);
  for (int t = 0; t < 8; ++t) {
    Vector x(2);
    x << qrng.uniform(), qrng.uniform(-1.0, 1.0);
    const MvPrediction pa = predict_mv(a, x);
    const MvPrediction pb = predict_mv(b, x);
    CHECK(pa.mean == pb.mean);
    CHECK(pa.variance == pb.variance);
  }
}

TEST_CASE("cross-validation on the training set itself is fully covered") {
  const auto design = lhc_maximin(10, toy_domain(), 4, 55);
  const Ensemble ens = toy_ensemble(design);
  const MvEmulator em = fit_mv(ens, fast_spec(10));
  const ValidationReport report = cross_validate(em, ens);
  for (const auto& rec : report.coeff_records) CHECK(rec.inside);
  CHECK(report.overall_coeff_coverage == doctest::Approx(1.0));
  CHECK(report.overall_output_coverage == doctest::Approx(1.0));
}

TEST_CASE("a mis-specified emulator covers less than the fitted one") {
  const auto train = lhc_maximin(16, toy_domain(), 4, 56);
  const auto test = random_test_design(25, toy_domain(), 57);
  const Ensemble train_ens = toy_ensemble(train);
  const Ensemble test_ens = toy_ensemble(test);

  const MvEmulator fitted = fit_mv(train_ens, fast_spec(11));
  MvEmulator broken = fitted;
  for (std::size_t k = 0; k < broken.coeff_models.size(); ++k) {
    const GpModel& model = fitted.coeff_models[k];
    KernelSpec kernel = model.kernel();
    kernel.lengthscales *= 100.0;
    kernel.nugget = 1e-4;  // x100 lengthscales need heavy regularization
    broken.coeff_models[k] =
        GpModel(model.domain(), model.inputs_unit(), model.outputs(), model.trend(), kernel);
  }
  const double cov_fitted = cross_validate(fitted, test_ens).overall_coeff_coverage;
  const double cov_broken = cross_validate(broken, test_ens).overall_coeff_coverage;
  CHECK(cov_broken < cov_fitted);
}

TEST_CASE("coverage is invariant under an affine transform of the output units") {
  const auto train = lhc_maximin(12, toy_domain(), 4, 58);
  const auto test = random_test_design(15, toy_domain(), 59);
  Ensemble train_ens = toy_ensemble(train);
  Ensemble test_ens = toy_ensemble(test);

  const ValidationReport base = cross_validate(fast_spec(12), train_ens, test_ens);

  auto transform = [](Ensemble e, double a, double b) {
    e.outputs = ((b * e.outputs).array() + a).matrix();
    return e;
  };
  // power-of-two scale: bitwise identical arithmetic
  const ValidationReport scaled =
      cross_validate(fast_spec(12), transform(train_ens, 0.0, 2.0), transform(test_ens, 0.0, 2.0));
  CHECK(scaled.coeff_coverage == base.coeff_coverage);
  CHECK(scaled.output_coverage == base.output_coverage);

  const ValidationReport affine = cross_validate(
      fast_spec(12), transform(train_ens, 300.0, 1.5), transform(test_ens, 300.0, 1.5));
  CHECK(affine.coeff_coverage == base.coeff_coverage);
  CHECK(affine.output_coverage == base.output_coverage);
}

TEST_CASE("cross-validation rejects a foreign test domain") {
  const auto design = lhc_maximin(10, toy_domain(), 4, 60);
  const MvEmulator em = fit_mv(toy_ensemble(design), fast_spec(13));
  const Domain other({{"a", 0.0, 2.0}, {"b", -1.0, 1.0}});
  Ensemble bad = toy_ensemble(design);
  bad.design.domain = other;
  CHECK_THROWS_AS(cross_validate(em, bad), ConfigError);
}
