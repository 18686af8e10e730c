#include <doctest.h>

#include <cmath>

#include "emunet/errors.hpp"
#include "emunet/sim.hpp"

using namespace emunet;

TEST_CASE("series interpolation hits the named scenarios exactly") {
  const auto s = default_temperature_series();
  CHECK(interpolate_series(s, 0.0) == s.central);
  CHECK(interpolate_series(s, 1.0) == s.high);
  CHECK(interpolate_series(s, -1.0) == s.low);
  const Vector mid = interpolate_series(s, 0.5);
  for (int y = 0; y < s.size(); ++y)
    CHECK(mid[y] == doctest::Approx(0.5 * (s.central[y] + s.high[y])));
  CHECK_THROWS_AS(interpolate_series(s, 1.5), DomainError);
  CHECK_THROWS_AS(interpolate_series(s, -1.0001), DomainError);
}

TEST_CASE("series interpolation is continuous at the central scenario") {
  const auto s = default_gas_price_series();
  const Vector up = interpolate_series(s, 1e-9);
  const Vector down = interpolate_series(s, -1e-9);
  CHECK((up - down).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("degree days: basic sums") {
  std::vector<double> warm(365, 20.0);
  CHECK(degree_days(warm, 15.5) == 0.0);
  std::vector<double> cold(365, 10.5);
  CHECK(degree_days(cold, 15.5) == doctest::Approx(1825.0));
  std::vector<double> bad = {1.0, std::nan("")};
  CHECK_THROWS_AS(degree_days(bad, 15.5), DomainError);
}

TEST_CASE("degree days on the synthetic year match a day-by-day oracle and fall with warming") {
  HeatModelParams params;
  auto dd_at = [&](double mean) {
    const auto profile = daily_temperature_profile(mean, params);
    // brute-force daily sum, written out independently of degree_days
    double total = 0.0;
    for (double t : profile) total += t < params.base_temp ? params.base_temp - t : 0.0;
    CHECK(degree_days(profile, params.base_temp) == doctest::Approx(total).epsilon(1e-12));
    return total;
  };
  const double cold = dd_at(9.5);
  const double mid = dd_at(10.0);
  const double warm = dd_at(10.5);
  CHECK(cold > mid);
  CHECK(mid > warm);
}

TEST_CASE("daily profile averages to the annual mean") {
  HeatModelParams params;
  const auto profile = daily_temperature_profile(10.0, params);
  double sum = 0.0;
  for (double t : profile) sum += t;
  CHECK(sum / profile.size() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("heat demand: zero when every year stays warm") {
  ScenarioSeries warm = make_linear_series(2021, 2050, 25.0, 27.0, -1.0, 1.0);
  const Vector demand = heat_demand({0.0, 0.75, 12.5}, warm);
  CHECK(demand.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("heat demand homogeneity: degree 1 in H, degree -1 in E") {
  const auto temps = default_temperature_series();
  const Vector base = heat_demand({0.3, 0.8, 10.0}, temps);
  const Vector double_h = heat_demand({0.3, 0.8, 20.0}, temps);
  const Vector half_e = heat_demand({0.3, 0.4, 10.0}, temps);
  for (int y = 0; y < base.size(); ++y) {
    CHECK(double_h[y] == doctest::Approx(2.0 * base[y]).epsilon(1e-12));
    CHECK(half_e[y] == doctest::Approx(2.0 * base[y]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(heat_demand({0.0, 0.0, 10.0}, temps), DomainError);
}

TEST_CASE("heat demand central scenario matches a day-level oracle") {
  const auto temps = default_temperature_series();
  HeatModelParams params;
  const HeatModelInput input{0.0, 0.75, 12.5};
  const Vector demand = heat_demand(input, temps, params);
  for (int y = 0; y < temps.size(); ++y) {
    const auto profile = daily_temperature_profile(temps.central[y], params);
    double dd = 0.0;
    for (double t : profile) dd += std::max(0.0, params.base_temp - t);
    const double expected = input.transmission * dd * 24.0 / input.efficiency;
    CHECK(demand[y] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("season share defaults carry the metered table and validate") {
  const auto s = SeasonShares::defaults();
  CHECK(s.day[0] == 0.265);
  CHECK(s.night[0] == 0.0466);
  CHECK_NOTHROW(s.validate());
  SeasonShares bad = s;
  bad.day[0] = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.night[1] = -0.01;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("energy cost: zero demand leaves only fixed O&M") {
  const auto prices = default_gas_price_series();
  CostParams params;
  params.fixed_om = 350.0;
  const Vector cost =
      energy_cost(Vector::Zero(prices.size()), 0.0, prices, SeasonShares::defaults(), params);
  for (int y = 0; y < cost.size(); ++y) CHECK(cost[y] == doctest::Approx(350.0));
}

TEST_CASE("energy cost with unit multipliers and shares summing to one is demand*price/eta") {
  ScenarioSeries prices = make_linear_series(2021, 2050, 0.06, 0.06, 0.0, 0.0);
  SeasonShares shares;
  shares.day = {0.2, 0.2, 0.2, 0.2};
  shares.night = {0.05, 0.05, 0.05, 0.05};
  CostParams params;
  params.day_multiplier = 1.0;
  params.night_multiplier = 1.0;
  params.fixed_om = 0.0;
  Vector demand(prices.size());
  for (int y = 0; y < demand.size(); ++y) demand[y] = 1000.0 + 10.0 * y;
  const Vector cost = energy_cost(demand, 0.0, prices, shares, params);
  for (int y = 0; y < cost.size(); ++y)
    CHECK(cost[y] == doctest::Approx(demand[y] * 0.06 / params.boiler_efficiency).epsilon(1e-12));
}

TEST_CASE("table shares enter the weighted sum exactly") {
  ScenarioSeries prices = make_linear_series(2021, 2050, 0.05, 0.05, 0.0, 0.0);
  const auto shares = SeasonShares::defaults();
  CostParams params;
  const Vector demand = Vector::Constant(prices.size(), 10000.0);
  const Vector cost = energy_cost(demand, 0.0, prices, shares, params);
  const double weight = (0.265 + 0.177 + 0.122 + 0.245) * params.day_multiplier +
                        (0.0466 + 0.0511 + 0.0412 + 0.0514) * params.night_multiplier;
  for (int y = 0; y < cost.size(); ++y)
    CHECK(cost[y] ==
          doctest::Approx(10000.0 / params.boiler_efficiency * 0.05 * weight).epsilon(1e-12));
}

TEST_CASE("energy cost is linear in demand and monotone in price") {
  const auto prices = default_gas_price_series();
  const auto shares = SeasonShares::defaults();
  CostParams params;
  params.fixed_om = 0.0;
  Vector demand(prices.size());
  for (int y = 0; y < demand.size(); ++y) demand[y] = 5000.0 + 100.0 * y;
  const Vector c1 = energy_cost(demand, 0.0, prices, shares, params);
  const Vector c2 = energy_cost(2.0 * demand, 0.0, prices, shares, params);
  const Vector high = energy_cost(demand, 0.8, prices, shares, params);
  for (int y = 0; y < demand.size(); ++y) {
    CHECK(c2[y] == doctest::Approx(2.0 * c1[y]).epsilon(1e-12));
    CHECK(high[y] >= c1[y]);
  }
  Vector negative = demand;
  negative[0] = -1.0;
  CHECK_THROWS_AS(energy_cost(negative, 0.0, prices, shares, params), DomainError);
}
