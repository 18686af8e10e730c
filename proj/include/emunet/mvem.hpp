#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emunet/basis.hpp"
#include "emunet/gp.hpp"

namespace emunet {

// PC basis plus one independent GP per retained coefficient, all sharing one
// training design. Immutable after fit.
struct MvEmulator {
  PcBasis basis;
  std::vector<GpModel> coeff_models;
  std::string provenance;        // free-form label
  std::string input_provenance;  // fingerprint of the upstream basis that
                                 // produced coefficient-channel inputs, if any

  int q() const { return static_cast<int>(coeff_models.size()); }
  const Domain& domain() const { return coeff_models.front().domain(); }
  void validate() const;
};

struct MvSpec {
  TrendKind trend = TrendKind::Linear;
  TruncationRule rule;
  FitOptions fit;
};

// Builds the basis and fits one GP per retained coefficient. Ensemble columns
// are canonicalized by design-row order first, so refits are exactly
// invariant under permutation of the ensemble.
MvEmulator fit_mv(const Ensemble& ensemble, const MvSpec& spec, const std::string& provenance = "",
                  const std::string& input_provenance = "");

struct MvPrediction {
  GaussianVector coeff;
  Vector mean;
  Vector variance;
  bool extrapolated = false;
};

MvPrediction predict_mv(const MvEmulator& em, const Vector& x);

struct ValidationRecord {
  int point = 0;
  int index = 0;  // coefficient index, or output coordinate index
  double pred_mean = 0.0;
  double pred_sd = 0.0;
  double truth = 0.0;
  bool inside = false;  // |truth - mean| <= 2 sd
};

struct ValidationReport {
  std::vector<ValidationRecord> coeff_records;
  std::vector<ValidationRecord> output_records;
  Vector coeff_coverage;    // per coefficient
  Vector output_coverage;   // per output coordinate
  double overall_coeff_coverage = 0.0;
  double overall_output_coverage = 0.0;
};

// Held-out diagnostics: per test point and coefficient, predicted moments
// against the projected true coefficient; per output coordinate likewise.
ValidationReport cross_validate(const MvEmulator& em, const Ensemble& test);
ValidationReport cross_validate(const MvSpec& spec, const Ensemble& train, const Ensemble& test);

// CSV emission for external plotting (one row per test point per index).
void write_validation_csv(const ValidationReport& report, const std::filesystem::path& coeff_csv,
                          const std::filesystem::path& output_csv);

}  // namespace emunet
