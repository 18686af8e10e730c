#include "emunet/mvem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emunet/csv.hpp"
#include "emunet/errors.hpp"
#include "emunet/parallel.hpp"
#include "emunet/rng.hpp"

namespace emunet {

namespace {

// Reorder ensemble columns by lexicographic design-row order so downstream
// linear algebra sees a canonical arrangement.
Ensemble canonicalize(const Ensemble& ensemble) {
  const Matrix U = ensemble.design.domain.to_unit_cube_rows(ensemble.design.points);
  std::vector<int> idx(ensemble.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      if (U(a, j) < U(b, j)) return true;
      if (U(a, j) > U(b, j)) return false;
    }
    return false;
  });
  Ensemble out;
  out.design.domain = ensemble.design.domain;
  out.design.points.resize(ensemble.design.points.rows(), ensemble.design.points.cols());
  out.outputs.resize(ensemble.outputs.rows(), ensemble.outputs.cols());
  out.output_labels = ensemble.output_labels;
  for (int i = 0; i < ensemble.n(); ++i) {
    out.design.points.row(i) = ensemble.design.points.row(idx[i]);
    out.outputs.col(i) = ensemble.outputs.col(idx[i]);
  }
  return out;
}

}  // namespace

void MvEmulator::validate() const {
  if (coeff_models.empty()) throw ConfigError("emulator has no coefficient models");
  if (q() != basis.q()) throw ConfigError("coefficient model count does not match basis");
  for (const auto& model : coeff_models)
    if (!(model.domain() == domain()))
      throw ConfigError("coefficient models must share one input domain");
}

MvEmulator fit_mv(const Ensemble& ensemble, const MvSpec& spec, const std::string& provenance,
                  const std::string& input_provenance) {
  const Ensemble canon = canonicalize(ensemble);
  MvEmulator em;
  em.basis = build_basis(canon, spec.rule);
  em.provenance = provenance;
  em.input_provenance = input_provenance;

  const Matrix coeff = coefficient_matrix(em.basis, canon);
  em.coeff_models.resize(em.basis.q());
  for (int i = 0; i < em.basis.q(); ++i) {
    FitOptions opts = spec.fit;
    opts.seed = derive_seed(spec.fit.seed, static_cast<std::uint64_t>(i));
    em.coeff_models[i] = fit_gp(canon.design, coeff.row(i).transpose(), spec.trend, opts);
  }
  em.validate();
  return em;
}

MvPrediction predict_mv(const MvEmulator& em, const Vector& x) {
  MvPrediction out;
  const int q = em.q();
  out.coeff.means.resize(q);
  out.coeff.variances.resize(q);
  for (int i = 0; i < q; ++i) {
    const Prediction p = em.coeff_models[i].predict(x);
    out.coeff.means[i] = p.mean;
    out.coeff.variances[i] = p.variance;
    out.extrapolated = out.extrapolated || p.extrapolated;
  }
  const Moments moments = reconstruct_moments(em.basis, out.coeff);
  out.mean = std::move(moments.mean);
  out.variance = std::move(moments.variance);
  return out;
}

ValidationReport cross_validate(const MvEmulator& em, const Ensemble& test) {
  test.validate();
  if (!(test.design.domain == em.domain()))
    throw ConfigError("cross_validate: test design domain does not match emulator");
  if (test.l() != em.basis.l()) throw ConfigError("cross_validate: output length mismatch");

  const int n = test.n();
  const int q = em.q();
  const int l = test.l();

  std::vector<MvPrediction> preds(n);
  parallel_for(n, [&](std::int64_t i) {
    preds[i] = predict_mv(em, test.design.points.row(i).transpose());
  });

  ValidationReport report;
  report.coeff_records.reserve(static_cast<std::size_t>(n) * q);
  report.output_records.reserve(static_cast<std::size_t>(n) * l);
  report.coeff_coverage = Vector::Zero(q);
  report.output_coverage = Vector::Zero(l);

  for (int i = 0; i < n; ++i) {
    const Vector true_coeff = project(em.basis, test.outputs.col(i));
    for (int k = 0; k < q; ++k) {
      ValidationRecord rec;
      rec.point = i;
      rec.index = k;
      rec.pred_mean = preds[i].coeff.means[k];
      rec.pred_sd = std::sqrt(preds[i].coeff.variances[k]);
      rec.truth = true_coeff[k];
      // absolute slack keeps exact-interpolation points (sd ~ 0) inside
      rec.inside =
          std::abs(rec.truth - rec.pred_mean) <= 2.0 * rec.pred_sd + 1e-9 * (1.0 + std::abs(rec.truth));
      if (rec.inside) report.coeff_coverage[k] += 1.0;
      report.coeff_records.push_back(rec);
    }
    for (int j = 0; j < l; ++j) {
      ValidationRecord rec;
      rec.point = i;
      rec.index = j;
      rec.pred_mean = preds[i].mean[j];
      rec.pred_sd = std::sqrt(preds[i].variance[j]);
      rec.truth = test.outputs(j, i);
      rec.inside =
          std::abs(rec.truth - rec.pred_mean) <= 2.0 * rec.pred_sd + 1e-9 * (1.0 + std::abs(rec.truth));
      if (rec.inside) report.output_coverage[j] += 1.0;
      report.output_records.push_back(rec);
    }
  }
  report.coeff_coverage /= n;
  report.output_coverage /= n;
  report.overall_coeff_coverage = report.coeff_coverage.mean();
  report.overall_output_coverage = report.output_coverage.mean();
  return report;
}

ValidationReport cross_validate(const MvSpec& spec, const Ensemble& train, const Ensemble& test) {
  return cross_validate(fit_mv(train, spec), test);
}

void write_validation_csv(const ValidationReport& report, const std::filesystem::path& coeff_csv,
                          const std::filesystem::path& output_csv) {
  const std::vector<std::string> header = {"point",   "index",  "pred_mean",
                                           "pred_sd", "truth",  "inside_2sd"};
  auto rows_of = [](const std::vector<ValidationRecord>& records) {
    CsvRows rows;
    rows.reserve(records.size());
    for (const auto& r : records)
      rows.push_back({std::to_string(r.point), std::to_string(r.index), format_double(r.pred_mean),
                      format_double(r.pred_sd), format_double(r.truth),
                      r.inside ? "1" : "0"});
    return rows;
  };
  write_csv(coeff_csv, header, rows_of(report.coeff_records));
  write_csv(output_csv, header, rows_of(report.output_records));
}

}  // namespace emunet
