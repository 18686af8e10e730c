#pragma once

#include <array>
#include <span>
#include <vector>

#include "emunet/domain.hpp"

namespace emunet {

// Low / central / high annual projections over a fixed horizon (temperature
// in degC or fuel price in currency/kWh). A scalar shift in [-1,1] selects a
// series on the continuum between them.
struct ScenarioSeries {
  std::vector<int> years;
  Vector low;
  Vector central;
  Vector high;

  int size() const { return static_cast<int>(years.size()); }
  void validate() const;
};

ScenarioSeries make_linear_series(int first_year, int last_year, double central_start,
                                  double central_end, double low_offset, double high_offset);

// Case-study defaults over 2021..2050: warming 9.5 -> 11.5 degC with a
// +/-1.2 degC scenario band, and gas price 0.05 -> 0.08 currency/kWh with a
// +/-30% band.
ScenarioSeries default_temperature_series();
ScenarioSeries default_gas_price_series();

// Piecewise-linear interpolation: shift 0 is central, +1 high, -1 low.
Vector interpolate_series(const ScenarioSeries& series, double shift);

// Sum of positive shortfalls of daily temperature below `base` (degC*day).
double degree_days(std::span<const double> daily_temps, double base);

struct HeatModelInput {
  double shift = 0.0;         // temperature scenario shift, [-1,1]
  double efficiency = 0.75;   // E
  double transmission = 12.5; // H, kW/degC
};

struct HeatModelParams {
  double base_temp = 15.5;        // degree-day threshold, degC
  double seasonal_amplitude = 6.0;// degC swing around the annual mean
  int days_per_year = 365;
  int coldest_day = 14;           // day index of the seasonal minimum (mid January)
};

// Deterministic daily profile around an annual mean: mean - A*cos(...) with
// the minimum at `coldest_day`. The cosine sums to zero over the equally
// spaced grid, so the profile's mean is exactly the annual mean.
std::vector<double> daily_temperature_profile(double annual_mean, const HeatModelParams& params);

// Annual heating demand series (kWh/yr): H * degree_days * 24 / E per year,
// with daily temperatures synthesized from the shifted scenario series.
Vector heat_demand(const HeatModelInput& input, const ScenarioSeries& temperatures,
                   const HeatModelParams& params = {});

// Share of annual heat demand per season and day/night period, as fractions.
struct SeasonShares {
  std::array<double, 4> day{};    // winter, spring, summer, autumn
  std::array<double, 4> night{};

  // Metered defaults; the published table rounds to 99.93%, so validation
  // accepts a 2e-3 slack around 1.
  static SeasonShares defaults();
  void validate(double tol = 2e-3) const;
};

struct CostParams {
  double boiler_efficiency = 0.85;
  double day_multiplier = 1.0;
  double night_multiplier = 0.9;
  double fixed_om = 0.0;  // currency/yr
};

// Annual operational cost (currency/yr) of meeting `demand` with a gas
// boiler: seasonal day/night shares weight the price multipliers.
Vector energy_cost(const Vector& demand, double gas_shift, const ScenarioSeries& prices,
                   const SeasonShares& shares, const CostParams& params = {});

}  // namespace emunet
