#include "emunet/sim.hpp"

#include <cmath>
#include <numbers>

#include "emunet/errors.hpp"

namespace emunet {

void ScenarioSeries::validate() const {
  const auto n = years.size();
  if (n == 0) throw ConfigError("scenario series is empty");
  if (low.size() != static_cast<Eigen::Index>(n) || central.size() != static_cast<Eigen::Index>(n) ||
      high.size() != static_cast<Eigen::Index>(n))
    throw ConfigError("scenario series length mismatch");
  for (std::size_t i = 1; i < n; ++i)
    if (years[i] <= years[i - 1]) throw ConfigError("scenario series years must be strictly increasing");
}

ScenarioSeries make_linear_series(int first_year, int last_year, double central_start,
                                  double central_end, double low_offset, double high_offset) {
  if (last_year < first_year) throw ConfigError("make_linear_series: bad year range");
  const int n = last_year - first_year + 1;
  ScenarioSeries s;
  s.years.resize(n);
  s.low.resize(n);
  s.central.resize(n);
  s.high.resize(n);
  for (int i = 0; i < n; ++i) {
    s.years[i] = first_year + i;
    const double t = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
    s.central[i] = central_start + t * (central_end - central_start);
    s.low[i] = s.central[i] + low_offset;
    s.high[i] = s.central[i] + high_offset;
  }
  return s;
}

ScenarioSeries default_temperature_series() {
  return make_linear_series(2021, 2050, 9.5, 11.5, -1.2, 1.2);
}

ScenarioSeries default_gas_price_series() {
  ScenarioSeries s = make_linear_series(2021, 2050, 0.05, 0.08, 0.0, 0.0);
  s.low = 0.7 * s.central;
  s.high = 1.3 * s.central;
  return s;
}

Vector interpolate_series(const ScenarioSeries& series, double shift) {
  series.validate();
  if (shift < -1.0 || shift > 1.0)
    throw DomainError("interpolate_series: shift must lie in [-1, 1]");
  if (shift >= 0.0) return series.central + shift * (series.high - series.central);
  return series.central + (-shift) * (series.low - series.central);
}

double degree_days(std::span<const double> daily_temps, double base) {
  double total = 0.0;
  for (double t : daily_temps) {
    if (!std::isfinite(t)) throw DomainError("degree_days: non-finite temperature");
    total += std::max(0.0, base - t);
  }
  return total;
}

std::vector<double> daily_temperature_profile(double annual_mean, const HeatModelParams& params) {
  std::vector<double> temps(params.days_per_year);
  const double w = 2.0 * std::numbers::pi / params.days_per_year;
  for (int d = 0; d < params.days_per_year; ++d)
    temps[d] = annual_mean - params.seasonal_amplitude * std::cos(w * (d - params.coldest_day));
  return temps;
}

Vector heat_demand(const HeatModelInput& input, const ScenarioSeries& temperatures,
                   const HeatModelParams& params) {
  if (input.efficiency <= 0.0) throw DomainError("heat_demand: efficiency must be positive");
  const Vector annual_means = interpolate_series(temperatures, input.shift);
  Vector demand(annual_means.size());
  for (Eigen::Index y = 0; y < annual_means.size(); ++y) {
    const auto profile = daily_temperature_profile(annual_means[y], params);
    const double dd = degree_days(profile, params.base_temp);
    demand[y] = input.transmission * dd * 24.0 / input.efficiency;
  }
  return demand;
}

SeasonShares SeasonShares::defaults() {
  SeasonShares s;
  s.day = {0.265, 0.177, 0.122, 0.245};
  s.night = {0.0466, 0.0511, 0.0412, 0.0514};
  return s;
}

void SeasonShares::validate(double tol) const {
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (day[i] < 0.0 || night[i] < 0.0) throw ConfigError("season shares must be non-negative");
    total += day[i] + night[i];
  }
  if (std::abs(total - 1.0) > tol) throw ConfigError("season shares must sum to 1");
}

Vector energy_cost(const Vector& demand, double gas_shift, const ScenarioSeries& prices,
                   const SeasonShares& shares, const CostParams& params) {
  shares.validate();
  if (params.boiler_efficiency <= 0.0) throw ConfigError("energy_cost: boiler efficiency must be positive");
  const Vector price = interpolate_series(prices, gas_shift);
  if (price.size() != demand.size()) throw ConfigError("energy_cost: demand/price length mismatch");

  double weight = 0.0;
  for (int s = 0; s < 4; ++s)
    weight += shares.day[s] * params.day_multiplier + shares.night[s] * params.night_multiplier;

  Vector cost(demand.size());
  for (Eigen::Index y = 0; y < demand.size(); ++y) {
    if (demand[y] < 0.0) throw DomainError("energy_cost: negative demand");
    cost[y] = demand[y] / params.boiler_efficiency * price[y] * weight + params.fixed_om;
  }
  return cost;
}

}  // namespace emunet
