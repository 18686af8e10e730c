#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "emunet/config.hpp"
#include "emunet/linked.hpp"
#include "emunet/manifest.hpp"

namespace emunet {

namespace artifacts {
inline constexpr const char* kDesignHeatTrain = "design_heat_train.csv";
inline constexpr const char* kDesignHeatTest = "design_heat_test.csv";
inline constexpr const char* kDesignEnergyTrain = "design_energy_train.csv";
inline constexpr const char* kDesignEnergyTest = "design_energy_test.csv";
inline constexpr const char* kEnsembleHeatTrain = "ensemble_heat_train.csv";
inline constexpr const char* kEnsembleHeatTest = "ensemble_heat_test.csv";
inline constexpr const char* kDemandAtEnergyTrain = "demand_at_energy_train.csv";
inline constexpr const char* kDemandAtEnergyTest = "demand_at_energy_test.csv";
inline constexpr const char* kEnsembleEnergyBaseTrain = "ensemble_energy_base_train.csv";
inline constexpr const char* kEnsembleEnergyBaseTest = "ensemble_energy_base_test.csv";
inline constexpr const char* kEnsembleEnergyTrain = "ensemble_energy_train.csv";
inline constexpr const char* kEnsembleEnergyTest = "ensemble_energy_test.csv";
inline constexpr const char* kEmulatorHeat = "emulator_heat.json";
inline constexpr const char* kEmulatorEnergy = "emulator_energy.json";
inline constexpr const char* kValidateHeatCoeffs = "validate_heat_coeffs.csv";
inline constexpr const char* kValidateHeatOutputs = "validate_heat_outputs.csv";
inline constexpr const char* kValidateEnergyCoeffs = "validate_energy_coeffs.csv";
inline constexpr const char* kValidateEnergyOutputs = "validate_energy_outputs.csv";
inline constexpr const char* kValidationSummary = "validation_summary.csv";
inline constexpr const char* kNetwork = "network.json";
inline constexpr const char* kProject = "project.csv";
inline constexpr const char* kCompare = "compare.csv";
}  // namespace artifacts

// Design and ensemble CSV round trips (header = dimension names, then one
// output column label per coordinate for ensembles).
void write_design_csv(const std::filesystem::path& path, const DesignMatrix& design);
DesignMatrix read_design_csv(const std::filesystem::path& path, const Domain& domain);
void write_ensemble_csv(const std::filesystem::path& path, const Ensemble& ensemble);
Ensemble read_ensemble_csv(const std::filesystem::path& path, const Domain& domain);

// Fills one output column per design point. The OpenMP kernel and its serial
// reference must produce identical matrices.
Matrix evaluate_columns(const DesignMatrix& design, int output_len,
                        const std::function<Vector(const Vector&)>& fn);
Matrix evaluate_columns_serial(const DesignMatrix& design, int output_len,
                               const std::function<Vector(const Vector&)>& fn);

// Simulator-backed ensemble builders used by run-ensemble and the tests.
Ensemble heat_ensemble(const DesignMatrix& design, const PipelineConfig& cfg, bool parallel = true);
Vector heat_series_at(const Vector& x, const PipelineConfig& cfg);
Vector cost_series_at(const Vector& x4, const PipelineConfig& cfg);

struct PipelineContext {
  PipelineConfig config;
  std::filesystem::path outdir;
  RunManifest manifest;
};

// Opens (or initializes) an output directory; rejects a manifest written
// under a different config.
PipelineContext open_context(PipelineConfig config, const std::filesystem::path& outdir);
void close_context(PipelineContext& ctx);

void stage_design(PipelineContext& ctx);
void stage_run_ensemble(PipelineContext& ctx);
void stage_fit(PipelineContext& ctx);
// Returns false when any per-coefficient coverage falls below the threshold.
bool stage_validate(PipelineContext& ctx);
void stage_link(PipelineContext& ctx);
void stage_project(PipelineContext& ctx);
// Returns false when the sd ratio or MC agreement assertions fail.
bool stage_compare(PipelineContext& ctx);

}  // namespace emunet
