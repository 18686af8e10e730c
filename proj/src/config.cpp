#include "emunet/config.hpp"

#include "emunet/errors.hpp"

namespace emunet {

namespace {

Json layer_to_json(const LayerConfig& c) {
  Json j;
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["trend"] = trend_to_string(c.trend);
  j["variance_fraction"] = c.rule.variance_fraction;
  if (c.rule.fixed_q)
    j["fixed_q"] = *c.rule.fixed_q;
  else
    j["fixed_q"] = nullptr;
  j["lhc_restarts"] = c.lhc_restarts;
  j["lhc_max_sweeps"] = c.lhc_max_sweeps;
  return j;
}

LayerConfig layer_from_json(const Json& j, const LayerConfig& base) {
  LayerConfig c = base;
  c.n_train = j.value("n_train", c.n_train);
  c.n_test = j.value("n_test", c.n_test);
  if (j.contains("trend")) c.trend = trend_from_string(j.at("trend").get<std::string>());
  c.rule.variance_fraction = j.value("variance_fraction", c.rule.variance_fraction);
  if (j.contains("fixed_q")) {
    if (j.at("fixed_q").is_null())
      c.rule.fixed_q.reset();
    else
      c.rule.fixed_q = j.at("fixed_q").get<int>();
  }
  c.lhc_restarts = j.value("lhc_restarts", c.lhc_restarts);
  c.lhc_max_sweeps = j.value("lhc_max_sweeps", c.lhc_max_sweeps);
  return c;
}

ScenarioSeries series_from_config(const Json& j, const ScenarioSeries& fallback) {
  if (j.is_string() && j.get<std::string>() == "default") return fallback;
  return series_from_json(j);
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.heat_domain = Domain({{"temp_shift", -1.0, 1.0},
                          {"efficiency", 0.5, 1.0},
                          {"transmission", 5.0, 20.0}});
  c.temperature_series = default_temperature_series();
  c.gas_price_series = default_gas_price_series();
  c.shares = SeasonShares::defaults();
  return c;
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  PipelineConfig c = defaults();
  if (!j.is_object()) throw ConfigError("config must be a json object");
  c.seed = j.value("seed", c.seed);

  if (j.contains("heat_domain")) c.heat_domain = domain_from_json(j.at("heat_domain"));
  c.gas_shift_lower = j.value("gas_shift_lower", c.gas_shift_lower);
  c.gas_shift_upper = j.value("gas_shift_upper", c.gas_shift_upper);

  if (j.contains("layer1")) c.layer1 = layer_from_json(j.at("layer1"), c.layer1);
  if (j.contains("layer2")) c.layer2 = layer_from_json(j.at("layer2"), c.layer2);
  c.coeff_margin = j.value("coeff_margin", c.coeff_margin);

  if (j.contains("temperature_series"))
    c.temperature_series = series_from_config(j.at("temperature_series"), c.temperature_series);
  if (j.contains("gas_price_series"))
    c.gas_price_series = series_from_config(j.at("gas_price_series"), c.gas_price_series);

  if (j.contains("heat_model")) {
    const auto& h = j.at("heat_model");
    c.heat_model.base_temp = h.value("base_temp", c.heat_model.base_temp);
    c.heat_model.seasonal_amplitude = h.value("seasonal_amplitude", c.heat_model.seasonal_amplitude);
    c.heat_model.days_per_year = h.value("days_per_year", c.heat_model.days_per_year);
    c.heat_model.coldest_day = h.value("coldest_day", c.heat_model.coldest_day);
  }
  if (j.contains("cost_model")) {
    const auto& e = j.at("cost_model");
    c.cost_model.boiler_efficiency = e.value("boiler_efficiency", c.cost_model.boiler_efficiency);
    c.cost_model.day_multiplier = e.value("day_multiplier", c.cost_model.day_multiplier);
    c.cost_model.night_multiplier = e.value("night_multiplier", c.cost_model.night_multiplier);
    c.cost_model.fixed_om = e.value("fixed_om", c.cost_model.fixed_om);
    if (e.contains("shares")) c.shares = shares_from_json(e.at("shares"));
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    c.fit.n_starts = f.value("n_starts", c.fit.n_starts);
    c.fit.nugget = f.value("nugget", c.fit.nugget);
    c.fit.max_nugget = f.value("max_nugget", c.fit.max_nugget);
    c.fit.max_iterations = f.value("max_iterations", c.fit.max_iterations);
  }
  c.mc_samples = j.value("mc_samples", c.mc_samples);
  if (j.contains("query")) {
    const auto& q = j.at("query");
    c.query.temp_shift = q.value("temp_shift", c.query.temp_shift);
    c.query.efficiency = q.value("efficiency", c.query.efficiency);
    c.query.transmission = q.value("transmission", c.query.transmission);
    c.query.gas_shift = q.value("gas_shift", c.query.gas_shift);
  }
  c.min_coverage = j.value("min_coverage", c.min_coverage);
  c.validate();
  return c;
}

Json PipelineConfig::to_json() const {
  Json j;
  j["seed"] = seed;
  j["heat_domain"] = domain_to_json(heat_domain);
  j["gas_shift_lower"] = gas_shift_lower;
  j["gas_shift_upper"] = gas_shift_upper;
  j["layer1"] = layer_to_json(layer1);
  j["layer2"] = layer_to_json(layer2);
  j["coeff_margin"] = coeff_margin;
  j["temperature_series"] = series_to_json(temperature_series);
  j["gas_price_series"] = series_to_json(gas_price_series);
  j["heat_model"] = Json{{"base_temp", heat_model.base_temp},
                         {"seasonal_amplitude", heat_model.seasonal_amplitude},
                         {"days_per_year", heat_model.days_per_year},
                         {"coldest_day", heat_model.coldest_day}};
  j["cost_model"] = Json{{"boiler_efficiency", cost_model.boiler_efficiency},
                         {"day_multiplier", cost_model.day_multiplier},
                         {"night_multiplier", cost_model.night_multiplier},
                         {"fixed_om", cost_model.fixed_om},
                         {"shares", shares_to_json(shares)}};
  j["fit"] = Json{{"n_starts", fit.n_starts},
                  {"nugget", fit.nugget},
                  {"max_nugget", fit.max_nugget},
                  {"max_iterations", fit.max_iterations}};
  j["mc_samples"] = mc_samples;
  j["query"] = Json{{"temp_shift", query.temp_shift},
                    {"efficiency", query.efficiency},
                    {"transmission", query.transmission},
                    {"gas_shift", query.gas_shift}};
  j["min_coverage"] = min_coverage;
  return j;
}

std::string PipelineConfig::checksum() const { return fnv1a_hex(to_json().dump()); }

void PipelineConfig::validate() const {
  if (heat_domain.size() != 3) throw ConfigError("heat domain must have 3 dimensions");
  if (!(gas_shift_lower < gas_shift_upper)) throw ConfigError("gas shift bounds invalid");
  if (layer1.n_train < 3 || layer2.n_train < 3) throw ConfigError("n_train must be >= 3");
  if (layer1.n_test < 1 || layer2.n_test < 1) throw ConfigError("n_test must be >= 1");
  if (layer1.lhc_restarts < 1 || layer2.lhc_restarts < 1)
    throw ConfigError("lhc_restarts must be >= 1");
  if (coeff_margin < 0.0) throw ConfigError("coeff_margin must be non-negative");
  if (mc_samples < 100) throw ConfigError("mc_samples must be >= 100");
  if (min_coverage < 0.0 || min_coverage > 1.0) throw ConfigError("min_coverage must be in [0,1]");
  if (fit.n_starts < 1) throw ConfigError("fit n_starts must be >= 1");
  if (fit.nugget < 0.0 || fit.max_nugget < fit.nugget) throw ConfigError("invalid nugget settings");
  temperature_series.validate();
  gas_price_series.validate();
  if (temperature_series.years != gas_price_series.years)
    throw ConfigError("temperature and price series must cover the same years");
  shares.validate();
  if (query.temp_shift < -1.0 || query.temp_shift > 1.0 ||
      query.gas_shift < gas_shift_lower || query.gas_shift > gas_shift_upper)
    throw ConfigError("query point outside scenario shift bounds");
}

PipelineConfig load_config(const std::string& path_or_empty) {
  if (path_or_empty.empty()) return PipelineConfig::defaults();
  return PipelineConfig::from_json(load_json(path_or_empty));
}

}  // namespace emunet
