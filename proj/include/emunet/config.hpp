#pragma once

#include <cstdint>
#include <string>

#include "emunet/basis.hpp"
#include "emunet/domain.hpp"
#include "emunet/gp.hpp"
#include "emunet/serialize.hpp"
#include "emunet/sim.hpp"

namespace emunet {

struct LayerConfig {
  int n_train = 30;
  int n_test = 30;
  TrendKind trend = TrendKind::Linear;
  TruncationRule rule{0.95, 2};  // fixed q = 2 by default
  int lhc_restarts = 50;
  int lhc_max_sweeps = 20;
};

struct QueryPoint {
  double temp_shift = 0.35;
  double efficiency = 0.8;
  double transmission = 12.5;
  double gas_shift = 0.25;
};

// One JSON document drives the whole pipeline; every random stage draws its
// stream from `seed`, never from the wall clock.
struct PipelineConfig {
  std::uint64_t seed = 2021;

  Domain heat_domain;                 // temp_shift, efficiency, transmission
  double gas_shift_lower = -1.0;
  double gas_shift_upper = 1.0;

  LayerConfig layer1;
  LayerConfig layer2;
  double coeff_margin = 0.1;          // widening of coefficient-channel bounds

  ScenarioSeries temperature_series;
  ScenarioSeries gas_price_series;
  HeatModelParams heat_model;
  CostParams cost_model;
  SeasonShares shares;

  FitOptions fit;                     // seed field is derived per model
  int mc_samples = 100000;
  QueryPoint query;
  double min_coverage = 0.85;

  static PipelineConfig defaults();
  static PipelineConfig from_json(const Json& j);
  Json to_json() const;
  std::string checksum() const;       // over the fully resolved document
  void validate() const;
};

PipelineConfig load_config(const std::string& path_or_empty);

}  // namespace emunet
