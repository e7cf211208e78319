#pragma once

#include <stdexcept>

namespace ridepool {

// Peak-hour operating and procurement cost comparison between a ride-pooling
// fleet and the private cars it replaces. Maintenance, insurance, and depot
// costs are out of scope.
struct CostParams {
  double hourly_wage = 18.0;                 // EUR per driver-hour
  double energy_use = 32.6;                  // kWh per 100 km (electric fleet)
  double energy_price = 0.30;                // EUR per kWh
  double fuel_use = 7.0;                     // L per 100 km (private, diesel)
  double fuel_price = 1.946;                 // EUR per L
  double pooling_vehicle_price = 42690.0;    // EUR
  double private_vehicle_price = 18800.0;    // EUR, pre-owned
  double working_days = 251.0;               // per year
  double peak_share = 0.088;                 // share of daily trips in the peak hour
  double n_travelers = 40000.0;
  double operating_hours = 1.0;              // length of the costed window

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    pos(hourly_wage, "hourly_wage");
    pos(energy_use, "energy_use");
    pos(energy_price, "energy_price");
    pos(fuel_use, "fuel_use");
    pos(fuel_price, "fuel_price");
    pos(pooling_vehicle_price, "pooling_vehicle_price");
    pos(private_vehicle_price, "private_vehicle_price");
    pos(working_days, "working_days");
    pos(n_travelers, "n_travelers");
    pos(operating_hours, "operating_hours");
    if (!(peak_share > 0.0) || peak_share > 1.0)
      throw std::invalid_argument("peak_share must be in (0,1]");
  }
};

struct CostReport {
  double wages = 0.0;
  double energy = 0.0;
  double pooling_operating_total = 0.0;
  double fare_per_trip = 0.0;
  double fare_per_year = 0.0;
  double private_fuel_total = 0.0;
  double private_cost_per_trip = 0.0;
  double private_cost_per_year = 0.0;
  double pooling_procurement_total = 0.0;
  double pooling_procurement_peak_share = 0.0;
  double pooling_procurement_per_customer = 0.0;
  double private_procurement_total = 0.0;
};

inline CostReport cost_report(int fleet_size, double fleet_km, double private_km,
                              const CostParams& p) {
  p.validate();
  if (fleet_size < 1) throw std::invalid_argument("fleet_size must be >= 1");
  if (fleet_km < 0.0) throw std::invalid_argument("fleet_km must be >= 0");
  if (private_km < 0.0) throw std::invalid_argument("private_km must be >= 0");
  CostReport r;
  r.wages = fleet_size * p.hourly_wage * p.operating_hours;
  r.energy = fleet_km * p.energy_use / 100.0 * p.energy_price;
  r.pooling_operating_total = r.wages + r.energy;
  r.fare_per_trip = r.pooling_operating_total / p.n_travelers;
  r.fare_per_year = r.fare_per_trip * p.working_days;
  r.private_fuel_total = private_km * p.fuel_use / 100.0 * p.fuel_price;
  r.private_cost_per_trip = r.private_fuel_total / p.n_travelers;
  r.private_cost_per_year = r.private_cost_per_trip * p.working_days;
  r.pooling_procurement_total = fleet_size * p.pooling_vehicle_price;
  r.pooling_procurement_peak_share = r.pooling_procurement_total * p.peak_share;
  r.pooling_procurement_per_customer = r.pooling_procurement_peak_share / p.n_travelers;
  r.private_procurement_total = p.n_travelers * p.private_vehicle_price;
  return r;
}

}  // namespace ridepool
