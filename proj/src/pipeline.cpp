#include "emunet/pipeline.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>
#include <algorithm>

#include "emunet/csv.hpp"
#include "emunet/design.hpp"
#include "emunet/errors.hpp"
#include "emunet/parallel.hpp"
#include "emunet/rng.hpp"

namespace emunet {

namespace {

// Fixed stream tags for every seeded stage.
enum SeedStream : std::uint64_t {
  kSeedHeatTrain = 11,
  kSeedHeatTest = 12,
  kSeedEnergyTrain = 13,
  kSeedEnergyTest = 14,
  kSeedFitHeat = 21,
  kSeedFitEnergy = 22,
  kSeedProjectMc = 31,
};

Domain energy_base_domain(const PipelineConfig& cfg) {
  std::vector<Dimension> dims = cfg.heat_domain.dims();
  dims.push_back({"gas_shift", cfg.gas_shift_lower, cfg.gas_shift_upper});
  return Domain(std::move(dims));
}

std::vector<std::string> year_labels(const PipelineConfig& cfg) {
  std::vector<std::string> labels;
  labels.reserve(cfg.temperature_series.years.size());
  for (int y : cfg.temperature_series.years) labels.push_back(std::to_string(y));
  return labels;
}

}  // namespace

void write_design_csv(const std::filesystem::path& path, const DesignMatrix& design) {
  write_csv(path, design.domain.names(), design.points);
}

DesignMatrix read_design_csv(const std::filesystem::path& path, const Domain& domain) {
  const Csv csv = read_csv(path);
  if (csv.header != domain.names())
    throw MissingArtifactError("design csv header does not match domain: " + path.string());
  DesignMatrix design{csv.numeric(), domain};
  design.validate(false);
  return design;
}

void write_ensemble_csv(const std::filesystem::path& path, const Ensemble& ensemble) {
  std::vector<std::string> header = ensemble.design.domain.names();
  header.insert(header.end(), ensemble.output_labels.begin(), ensemble.output_labels.end());
  Matrix rows(ensemble.n(), ensemble.design.p() + ensemble.l());
  rows.leftCols(ensemble.design.p()) = ensemble.design.points;
  rows.rightCols(ensemble.l()) = ensemble.outputs.transpose();
  write_csv(path, header, rows);
}

Ensemble read_ensemble_csv(const std::filesystem::path& path, const Domain& domain) {
  const Csv csv = read_csv(path);
  const int p = static_cast<int>(domain.size());
  if (static_cast<int>(csv.header.size()) <= p)
    throw MissingArtifactError("ensemble csv has no output columns: " + path.string());
  const std::vector<std::string> names(csv.header.begin(), csv.header.begin() + p);
  if (names != domain.names())
    throw MissingArtifactError("ensemble csv header does not match domain: " + path.string());

  const Matrix all = csv.numeric();
  Ensemble ens;
  ens.design = DesignMatrix{all.leftCols(p), domain};
  ens.outputs = all.rightCols(all.cols() - p).transpose();
  ens.output_labels.assign(csv.header.begin() + p, csv.header.end());
  ens.validate();
  return ens;
}

Matrix evaluate_columns(const DesignMatrix& design, int output_len,
                        const std::function<Vector(const Vector&)>& fn) {
  Matrix out(output_len, design.n());
  parallel_for(design.n(), [&](std::int64_t i) {
    out.col(i) = fn(design.points.row(i).transpose());
  });
  return out;
}

Matrix evaluate_columns_serial(const DesignMatrix& design, int output_len,
                               const std::function<Vector(const Vector&)>& fn) {
  Matrix out(output_len, design.n());
  serial_for(design.n(), [&](std::int64_t i) {
    out.col(i) = fn(design.points.row(i).transpose());
  });
  return out;
}

Vector heat_series_at(const Vector& x, const PipelineConfig& cfg) {
  const HeatModelInput input{x[0], x[1], x[2]};
  return heat_demand(input, cfg.temperature_series, cfg.heat_model);
}

Vector cost_series_at(const Vector& x4, const PipelineConfig& cfg) {
  const Vector demand = heat_series_at(x4.head(3), cfg);
  return energy_cost(demand, x4[3], cfg.gas_price_series, cfg.shares, cfg.cost_model);
}

Ensemble heat_ensemble(const DesignMatrix& design, const PipelineConfig& cfg, bool parallel) {
  const int l = cfg.temperature_series.size();
  auto fn = [&](const Vector& x) { return heat_series_at(x, cfg); };
  Ensemble ens;
  ens.design = design;
  ens.outputs = parallel ? evaluate_columns(design, l, fn) : evaluate_columns_serial(design, l, fn);
  ens.output_labels = year_labels(cfg);
  return ens;
}

PipelineContext open_context(PipelineConfig config, const std::filesystem::path& outdir) {
  config.validate();
  std::filesystem::create_directories(outdir);
  const auto manifest_path = outdir / kManifestFile;
  RunManifest manifest(config.checksum());
  if (std::filesystem::exists(manifest_path)) {
    manifest = RunManifest::load(manifest_path);
    if (manifest.config_checksum() != config.checksum())
      throw ConfigError("output directory was produced under a different config; use a fresh --out");
  }
  return PipelineContext{std::move(config), outdir, std::move(manifest)};
}

void close_context(PipelineContext& ctx) { ctx.manifest.save(ctx.outdir / kManifestFile); }

void stage_design(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  const Domain base = energy_base_domain(cfg);

  LhcOptions opts1;
  opts1.max_sweeps = cfg.layer1.lhc_max_sweeps;
  LhcOptions opts2;
  opts2.max_sweeps = cfg.layer2.lhc_max_sweeps;

  const auto heat_train =
      lhc_maximin(cfg.layer1.n_train, cfg.heat_domain, cfg.layer1.lhc_restarts,
                  derive_seed(cfg.seed, kSeedHeatTrain), opts1);
  const auto heat_test =
      random_test_design(cfg.layer1.n_test, cfg.heat_domain, derive_seed(cfg.seed, kSeedHeatTest));
  const auto energy_train = lhc_maximin(cfg.layer2.n_train, base, cfg.layer2.lhc_restarts,
                                        derive_seed(cfg.seed, kSeedEnergyTrain), opts2);
  const auto energy_test =
      random_test_design(cfg.layer2.n_test, base, derive_seed(cfg.seed, kSeedEnergyTest));

  write_design_csv(ctx.outdir / artifacts::kDesignHeatTrain, heat_train);
  write_design_csv(ctx.outdir / artifacts::kDesignHeatTest, heat_test);
  write_design_csv(ctx.outdir / artifacts::kDesignEnergyTrain, energy_train);
  write_design_csv(ctx.outdir / artifacts::kDesignEnergyTest, energy_test);
  for (const char* name : {artifacts::kDesignHeatTrain, artifacts::kDesignHeatTest,
                           artifacts::kDesignEnergyTrain, artifacts::kDesignEnergyTest})
    ctx.manifest.record_file(ctx.outdir, name, "design");
  std::cout << "design: " << cfg.layer1.n_train << "+" << cfg.layer1.n_test << " heat points, "
            << cfg.layer2.n_train << "+" << cfg.layer2.n_test << " energy points\n";
}

void stage_run_ensemble(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  ctx.manifest.require(ctx.outdir,
                       {artifacts::kDesignHeatTrain, artifacts::kDesignHeatTest,
                        artifacts::kDesignEnergyTrain, artifacts::kDesignEnergyTest});
  const Domain base = energy_base_domain(cfg);
  const int l = cfg.temperature_series.size();

  const auto heat_train = read_design_csv(ctx.outdir / artifacts::kDesignHeatTrain, cfg.heat_domain);
  const auto heat_test = read_design_csv(ctx.outdir / artifacts::kDesignHeatTest, cfg.heat_domain);
  const auto energy_train = read_design_csv(ctx.outdir / artifacts::kDesignEnergyTrain, base);
  const auto energy_test = read_design_csv(ctx.outdir / artifacts::kDesignEnergyTest, base);

  write_ensemble_csv(ctx.outdir / artifacts::kEnsembleHeatTrain, heat_ensemble(heat_train, cfg));
  write_ensemble_csv(ctx.outdir / artifacts::kEnsembleHeatTest, heat_ensemble(heat_test, cfg));

  auto demand_fn = [&](const Vector& x4) { return heat_series_at(x4.head(3), cfg); };
  auto cost_fn = [&](const Vector& x4) { return cost_series_at(x4, cfg); };
  for (const auto& [design, demand_name, cost_name] :
       {std::tuple{&energy_train, artifacts::kDemandAtEnergyTrain,
                   artifacts::kEnsembleEnergyBaseTrain},
        std::tuple{&energy_test, artifacts::kDemandAtEnergyTest,
                   artifacts::kEnsembleEnergyBaseTest}}) {
    Ensemble demand;
    demand.design = *design;
    demand.outputs = evaluate_columns(*design, l, demand_fn);
    demand.output_labels = year_labels(cfg);
    write_ensemble_csv(ctx.outdir / demand_name, demand);

    Ensemble cost;
    cost.design = *design;
    cost.outputs = evaluate_columns(*design, l, cost_fn);
    cost.output_labels = year_labels(cfg);
    write_ensemble_csv(ctx.outdir / cost_name, cost);
  }

  for (const char* name :
       {artifacts::kEnsembleHeatTrain, artifacts::kEnsembleHeatTest,
        artifacts::kDemandAtEnergyTrain, artifacts::kEnsembleEnergyBaseTrain,
        artifacts::kDemandAtEnergyTest, artifacts::kEnsembleEnergyBaseTest})
    ctx.manifest.record_file(ctx.outdir, name, "run-ensemble");
  std::cout << "run-ensemble: evaluated " << 2 * (cfg.layer1.n_train + cfg.layer1.n_test)
            << " simulator runs\n";
}

namespace {

// Coefficient-channel bounds from the training projections, widened by the
// configured margin. Constant channels get a tiny symmetric box.
Domain coefficient_domain(const Matrix& coeff_train, double margin, const PipelineConfig& cfg) {
  std::vector<Dimension> dims;
  for (Eigen::Index i = 0; i < coeff_train.rows(); ++i) {
    const double lo = coeff_train.row(i).minCoeff();
    const double hi = coeff_train.row(i).maxCoeff();
    double pad = margin * (hi - lo);
    if (!(pad > 0.0)) pad = std::max(1e-6, 1e-3 * std::abs(0.5 * (lo + hi)));
    dims.push_back({"heat_coeff_" + std::to_string(i + 1), lo - pad, hi + pad});
  }
  dims.push_back({"gas_shift", cfg.gas_shift_lower, cfg.gas_shift_upper});
  return Domain(std::move(dims));
}

Ensemble projected_energy_ensemble(const Matrix& coeff, const DesignMatrix& base_design,
                                   const Ensemble& cost, const Domain& coeff_domain) {
  const int n = base_design.n();
  const int q = static_cast<int>(coeff.rows());
  Matrix points(n, q + 1);
  points.leftCols(q) = coeff.transpose();
  points.col(q) = base_design.points.col(base_design.p() - 1);  // gas shift
  Ensemble ens;
  ens.design = DesignMatrix{std::move(points), coeff_domain};
  ens.outputs = cost.outputs;
  ens.output_labels = cost.output_labels;
  return ens;
}

Matrix project_columns(const PcBasis& basis, const Matrix& outputs) {
  Matrix coeff(basis.q(), outputs.cols());
  for (Eigen::Index i = 0; i < outputs.cols(); ++i) coeff.col(i) = project(basis, outputs.col(i));
  return coeff;
}

}  // namespace

void stage_fit(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  ctx.manifest.require(ctx.outdir,
                       {artifacts::kEnsembleHeatTrain, artifacts::kDemandAtEnergyTrain,
                        artifacts::kEnsembleEnergyBaseTrain, artifacts::kDemandAtEnergyTest,
                        artifacts::kEnsembleEnergyBaseTest});
  const Domain base = energy_base_domain(cfg);

  // Layer 1: heat demand emulator.
  const Ensemble heat_train = read_ensemble_csv(ctx.outdir / artifacts::kEnsembleHeatTrain,
                                                cfg.heat_domain);
  MvSpec spec1{cfg.layer1.trend, cfg.layer1.rule, cfg.fit};
  spec1.fit.seed = derive_seed(cfg.seed, kSeedFitHeat);
  const MvEmulator heat_em = fit_mv(heat_train, spec1, "heat_demand");
  save_json(ctx.outdir / artifacts::kEmulatorHeat, mv_to_json(heat_em));

  // Layer 2: coefficient channels come from projecting the demand runs at
  // the energy design points through layer 1's own basis.
  const Ensemble demand_train =
      read_ensemble_csv(ctx.outdir / artifacts::kDemandAtEnergyTrain, base);
  const Ensemble demand_test = read_ensemble_csv(ctx.outdir / artifacts::kDemandAtEnergyTest, base);
  const Ensemble cost_train =
      read_ensemble_csv(ctx.outdir / artifacts::kEnsembleEnergyBaseTrain, base);
  const Ensemble cost_test =
      read_ensemble_csv(ctx.outdir / artifacts::kEnsembleEnergyBaseTest, base);

  const Matrix coeff_train = project_columns(heat_em.basis, demand_train.outputs);
  const Matrix coeff_test = project_columns(heat_em.basis, demand_test.outputs);
  const Domain coeff_domain = coefficient_domain(coeff_train, cfg.coeff_margin, cfg);

  const Ensemble energy_train =
      projected_energy_ensemble(coeff_train, demand_train.design, cost_train, coeff_domain);
  const Ensemble energy_test =
      projected_energy_ensemble(coeff_test, demand_test.design, cost_test, coeff_domain);
  write_ensemble_csv(ctx.outdir / artifacts::kEnsembleEnergyTrain, energy_train);
  write_ensemble_csv(ctx.outdir / artifacts::kEnsembleEnergyTest, energy_test);

  MvSpec spec2{cfg.layer2.trend, cfg.layer2.rule, cfg.fit};
  spec2.fit.seed = derive_seed(cfg.seed, kSeedFitEnergy);
  const MvEmulator energy_em =
      fit_mv(energy_train, spec2, "energy_cost", basis_fingerprint(heat_em.basis));
  save_json(ctx.outdir / artifacts::kEmulatorEnergy, mv_to_json(energy_em));

  for (const char* name : {artifacts::kEmulatorHeat, artifacts::kEmulatorEnergy,
                           artifacts::kEnsembleEnergyTrain, artifacts::kEnsembleEnergyTest})
    ctx.manifest.record_file(ctx.outdir, name, "fit");
  std::cout << "fit: heat emulator q=" << heat_em.q() << " (2-component variance fraction "
            << heat_em.basis.cumulative_variance_fraction(2) << "), energy emulator q="
            << energy_em.q() << " (fraction " << energy_em.basis.cumulative_variance_fraction(2)
            << ")\n";
}

bool stage_validate(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  ctx.manifest.require(ctx.outdir, {artifacts::kEmulatorHeat, artifacts::kEmulatorEnergy,
                                    artifacts::kEnsembleHeatTest, artifacts::kEnsembleEnergyTest});

  const MvEmulator heat_em = mv_from_json(load_json(ctx.outdir / artifacts::kEmulatorHeat));
  const MvEmulator energy_em = mv_from_json(load_json(ctx.outdir / artifacts::kEmulatorEnergy));
  const Ensemble heat_test =
      read_ensemble_csv(ctx.outdir / artifacts::kEnsembleHeatTest, cfg.heat_domain);
  const Ensemble energy_test =
      read_ensemble_csv(ctx.outdir / artifacts::kEnsembleEnergyTest, energy_em.domain());

  const ValidationReport heat_report = cross_validate(heat_em, heat_test);
  const ValidationReport energy_report = cross_validate(energy_em, energy_test);

  write_validation_csv(heat_report, ctx.outdir / artifacts::kValidateHeatCoeffs,
                       ctx.outdir / artifacts::kValidateHeatOutputs);
  write_validation_csv(energy_report, ctx.outdir / artifacts::kValidateEnergyCoeffs,
                       ctx.outdir / artifacts::kValidateEnergyOutputs);

  CsvRows summary;
  bool ok = true;
  auto summarize = [&](const std::string& name, const ValidationReport& report) {
    for (int k = 0; k < report.coeff_coverage.size(); ++k) {
      const double coverage = report.coeff_coverage[k];
      ok = ok && coverage >= cfg.min_coverage;
      summary.push_back({name, "coefficient_" + std::to_string(k + 1), format_double(coverage)});
      std::cout << "validate: " << name << " coefficient " << (k + 1) << " 2sd coverage "
                << coverage << (coverage >= cfg.min_coverage ? " (pass)" : " (FAIL)") << "\n";
    }
    summary.push_back({name, "outputs_overall", format_double(report.overall_output_coverage)});
    std::cout << "validate: " << name << " output coverage "
              << report.overall_output_coverage << "\n";
  };
  summarize("heat_demand", heat_report);
  summarize("energy_cost", energy_report);
  summary.push_back({"threshold", "min_coverage", format_double(cfg.min_coverage)});
  write_csv(ctx.outdir / artifacts::kValidationSummary, {"emulator", "quantity", "value"}, summary);

  for (const char* name : {artifacts::kValidateHeatCoeffs, artifacts::kValidateHeatOutputs,
                           artifacts::kValidateEnergyCoeffs, artifacts::kValidateEnergyOutputs,
                           artifacts::kValidationSummary})
    ctx.manifest.record_file(ctx.outdir, name, "validate");
  return ok;
}

void stage_link(PipelineContext& ctx) {
  ctx.manifest.require(ctx.outdir, {artifacts::kEmulatorHeat, artifacts::kEmulatorEnergy});
  MvEmulator heat_em = mv_from_json(load_json(ctx.outdir / artifacts::kEmulatorHeat));
  MvEmulator energy_em = mv_from_json(load_json(ctx.outdir / artifacts::kEmulatorEnergy));
  const LinkedNetwork net = make_two_layer_network(std::move(heat_em), std::move(energy_em), 1);
  save_json(ctx.outdir / artifacts::kNetwork, network_to_json(net));
  ctx.manifest.record_file(ctx.outdir, artifacts::kNetwork, "link");
  std::cout << "link: two-layer network assembled (provenance verified)\n";
}

void stage_project(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  ctx.manifest.require(ctx.outdir, {artifacts::kNetwork});
  const LinkedNetwork net = network_from_json(load_json(ctx.outdir / artifacts::kNetwork));

  Vector x1(3);
  x1 << cfg.query.temp_shift, cfg.query.efficiency, cfg.query.transmission;
  Vector z(1);
  z << cfg.query.gas_shift;

  const LinkedResult linked = linked_predict(net, x1, z);
  const MvPrediction composed = composed_predict(net, x1, z);
  const McResult mc = mc_propagate(net, x1, z, cfg.mc_samples, derive_seed(cfg.seed, kSeedProjectMc));

  const auto labels = year_labels(cfg);
  CsvRows rows;
  auto emit = [&](const Vector& mean, const Vector& variance, const std::string& method) {
    for (int y = 0; y < static_cast<int>(labels.size()); ++y) {
      const double sd = std::sqrt(std::max(variance[y], 0.0));
      rows.push_back({labels[y], format_double(mean[y]), format_double(sd),
                      format_double(mean[y] - 2.0 * sd), format_double(mean[y] + 2.0 * sd),
                      method});
    }
  };
  emit(linked.mean, linked.variance, "linked");
  emit(composed.mean, composed.variance, "composed");
  emit(mc.mean, mc.variance, "mc");
  write_csv(ctx.outdir / artifacts::kProject,
            {"year", "mean", "sd", "lower_2sd", "upper_2sd", "method"}, rows);
  ctx.manifest.record_file(ctx.outdir, artifacts::kProject, "project");
  std::cout << "project: " << labels.size() << " years x {linked, composed, mc} at query point\n";
}

bool stage_compare(PipelineContext& ctx) {
  const auto& cfg = ctx.config;
  ctx.manifest.require(ctx.outdir, {artifacts::kProject});
  const Csv csv = read_csv(ctx.outdir / artifacts::kProject);
  const int year_col = csv.column("year");
  const int mean_col = csv.column("mean");
  const int sd_col = csv.column("sd");
  const int method_col = csv.column("method");
  if (year_col < 0 || mean_col < 0 || sd_col < 0 || method_col < 0)
    throw MissingArtifactError("project csv missing expected columns");

  struct Series {
    std::vector<std::string> years;
    std::vector<double> mean, sd;
  };
  std::map<std::string, Series> by_method;
  for (const auto& row : csv.rows) {
    Series& s = by_method[row[method_col]];
    s.years.push_back(row[year_col]);
    s.mean.push_back(std::stod(row[mean_col]));
    s.sd.push_back(std::stod(row[sd_col]));
  }
  for (const char* method : {"linked", "composed", "mc"})
    if (!by_method.count(method))
      throw MissingArtifactError(std::string("project csv lacks method rows: ") + method);
  const Series& linked = by_method["linked"];
  const Series& composed = by_method["composed"];
  const Series& mc = by_method["mc"];
  const std::size_t n_years = linked.years.size();
  if (composed.years.size() != n_years || mc.years.size() != n_years)
    throw MissingArtifactError("project csv method blocks have differing year counts");

  bool ratio_ok = true;
  bool mc_ok = true;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = -std::numeric_limits<double>::infinity();
  CsvRows rows;
  const double root_n = std::sqrt(static_cast<double>(cfg.mc_samples));
  for (std::size_t y = 0; y < n_years; ++y) {
    const double ratio = linked.sd[y] / composed.sd[y];
    ratio_ok = ratio_ok && ratio >= 1.0 - 1e-9;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    // Conservative MC standard error from the reported predictive sd.
    const double se = mc.sd[y] / root_n;
    const double gap_se = std::abs(mc.mean[y] - linked.mean[y]) / se;
    mc_ok = mc_ok && gap_se <= 3.0;
    rows.push_back({linked.years[y], format_double(linked.sd[y]), format_double(composed.sd[y]),
                    format_double(ratio), format_double(gap_se)});
  }
  write_csv(ctx.outdir / artifacts::kCompare,
            {"year", "sd_linked", "sd_composed", "sd_ratio", "mc_mean_gap_se"}, rows);
  ctx.manifest.record_file(ctx.outdir, artifacts::kCompare, "compare");

  std::cout << "compare: sd ratio linked/composed in [" << ratio_min << ", " << ratio_max
            << "]; ratio assertion " << (ratio_ok ? "pass" : "FAIL") << ", mc agreement "
            << (mc_ok ? "pass" : "FAIL") << "\n";
  return ratio_ok && mc_ok;
}

}  // namespace emunet
