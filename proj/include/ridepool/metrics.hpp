#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <set>
#include <thread>
#include <variant>

#include "ridepool/engine.hpp"

namespace ridepool {

struct WalkBySpeed {
  double speed_mps = kmh_to_mps(5.0);
};
struct WalkFixedPerLeg {
  double seconds_per_leg = 60.0;
};
using WalkMode = std::variant<WalkBySpeed, WalkFixedPerLeg>;

inline double walk_time(const WalkMode& mode, double leg_meters) {
  if (const auto* s = std::get_if<WalkBySpeed>(&mode)) return leg_meters / s->speed_mps;
  return std::get<WalkFixedPerLeg>(mode).seconds_per_leg;
}

// The six pooling characteristics of one run. Rejected requests fall back to
// their private-car baseline in both relative measures.
struct Characteristics {
  double serviced_share = 0.0;
  double relative_travel_time = 0.0;           // ratio of sums
  double relative_travel_time_mean = 0.0;      // mean of per-request ratios (auxiliary)
  double relative_driven_distance = 0.0;
  double empty_mileage_share = 0.0;
  double avg_occupancy_incl = 0.0;  // distance-weighted, empty mileage included
  double avg_occupancy_excl = 0.0;  // distance-weighted over occupied mileage only
  int empty_vehicles = 0;
};

inline Characteristics characteristics(const SimulationResult& result,
                                       const RequestSet& requests,
                                       const WalkMode& walk_mode) {
  if (result.outcomes.size() != requests.requests.size())
    throw std::invalid_argument("result does not match request set");
  Characteristics c;
  const size_t total = requests.requests.size();
  size_t served = 0;
  double time_num = 0.0, time_den = 0.0, ratio_sum = 0.0;
  double dist_num = 0.0, dist_den = 0.0;
  for (const Request& r : requests.requests) {
    const auto& o = result.outcomes[r.request_id];
    time_den += r.baseline_time;
    dist_den += r.baseline_distance;
    if (o.served) {
      ++served;
      const double pooled = walk_time(walk_mode, r.walk_in) + (o.pickup_time - r.request_time) +
                            (o.dropoff_time - o.pickup_time) + walk_time(walk_mode, r.walk_out);
      time_num += pooled;
      ratio_sum += pooled / r.baseline_time;
    } else {
      time_num += r.baseline_time;
      dist_num += r.baseline_distance;
      ratio_sum += 1.0;
    }
  }
  double fleet_total = 0.0, fleet_empty = 0.0, occupied_weighted = 0.0;
  for (const auto& v : result.vehicles) {
    fleet_total += v.odometer_total;
    fleet_empty += v.odometer_empty;
    for (const auto& s : v.segments) occupied_weighted += s.occupancy * s.distance;
    if (!v.ever_used) ++c.empty_vehicles;
  }
  dist_num += fleet_total;
  c.serviced_share = total ? static_cast<double>(served) / total : 0.0;
  c.relative_travel_time = time_den > 0.0 ? time_num / time_den : 0.0;
  c.relative_travel_time_mean = total ? ratio_sum / total : 0.0;
  c.relative_driven_distance = dist_den > 0.0 ? dist_num / dist_den : 0.0;
  c.empty_mileage_share = fleet_total > 0.0 ? fleet_empty / fleet_total : 0.0;
  c.avg_occupancy_incl = fleet_total > 0.0 ? occupied_weighted / fleet_total : 0.0;
  const double occupied_dist = fleet_total - fleet_empty;
  c.avg_occupancy_excl = occupied_dist > 0.0 ? occupied_weighted / occupied_dist : 0.0;
  return c;
}

// Piecewise-constant onboard count of one vehicle; changes only at executed
// pickup/dropoff actions.
struct OccupancySeries {
  int vehicle_id = 0;
  std::vector<std::pair<double, int>> steps;  // (time, occupancy from this time on)
};

inline OccupancySeries occupancy_series(const SimulationResult& result, int vehicle_id,
                                        std::optional<std::pair<double, double>> trim = {}) {
  if (vehicle_id < 0 || vehicle_id >= static_cast<int>(result.vehicles.size()))
    throw std::out_of_range("unknown vehicle id " + std::to_string(vehicle_id));
  const auto& trace = result.vehicles[vehicle_id];
  OccupancySeries series;
  series.vehicle_id = vehicle_id;
  int occ = 0;
  for (const auto& e : trace.events) {
    occ += e.delta;
    if (trim && (e.time < trim->first || e.time > trim->second)) continue;
    if (!series.steps.empty() && series.steps.back().first == e.time)
      series.steps.back().second = occ;
    else
      series.steps.emplace_back(e.time, occ);
  }
  return series;
}

// Time-weighted mean of the step function over [t0, t1]; untrimmed calls use
// the vehicle's own active span.
inline double mean_occupancy(const OccupancySeries& series,
                             std::optional<std::pair<double, double>> window = {}) {
  if (series.steps.empty()) return 0.0;
  const double t0 = window ? window->first : series.steps.front().first;
  const double t1 = window ? window->second : series.steps.back().first;
  if (!(t1 > t0)) return 0.0;
  double integral = 0.0;
  int occ = 0;
  double t = t0;
  for (const auto& [time, value] : series.steps) {
    if (time <= t0) {
      occ = value;
      continue;
    }
    if (time >= t1) break;
    integral += occ * (time - t);
    t = time;
    occ = value;
  }
  integral += occ * (t1 - t);
  return integral / (t1 - t0);
}

struct SweepPoint {
  int fleet_size = 0;
  Characteristics characteristics;
  uint64_t seed = 0;
  double serviced_share() const { return characteristics.serviced_share; }
};

struct SweepSpec {
  std::vector<int> fleet_sizes;
  int replicates = 1;
  uint64_t base_seed = 0;
};

// Runs all (size, replicate) points; points are independent, so they fan out
// over `jobs` workers and are collected in deterministic index order.
inline std::vector<SweepPoint> run_sweep(const DistanceOracle& oracle, const RequestSet& requests,
                                         ServiceParams params, const Placement& placement,
                                         const WalkMode& walk_mode, const SweepSpec& spec,
                                         int jobs = 1) {
  struct Point {
    int size;
    uint64_t seed;
  };
  std::vector<Point> points;
  for (int size : spec.fleet_sizes)
    for (int rep = 0; rep < spec.replicates; ++rep)
      points.push_back({size, spec.base_seed + static_cast<uint64_t>(rep)});
  std::vector<SweepPoint> out(points.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
      ServiceParams local = params;
      local.fleet_size = points[i].size;
      SimulationResult result = simulate(oracle, requests, local, placement, points[i].seed);
      out[i] = {points[i].size, characteristics(result, requests, walk_mode), points[i].seed};
    }
  };
  if (jobs < 1) jobs = 1;
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

struct MinFleetResult {
  bool found = false;
  int min_fleet = 0;
  std::vector<SweepPoint> evidence;  // every evaluated point, in evaluation order
};

// Smallest fleet size (to `resolution` granularity) serving every request.
/// Nested placement makes sizes comparable: with one seed, a smaller fleet is a
// prefix of a larger one. Doubles up from the lower bound, then bisects.
inline MinFleetResult min_fleet_search(const DistanceOracle& oracle, const RequestSet& requests,
                                       ServiceParams params, const Placement& placement,
                                       const WalkMode& walk_mode, uint64_t seed,
                                       std::pair<int, int> bounds, int resolution) {
  if (bounds.first < 1 || bounds.second < bounds.first)
    throw std::invalid_argument("invalid fleet-size bounds");
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  MinFleetResult res;
  auto serves_all = [&](int size) {
    ServiceParams local = params;
    local.fleet_size = size;
    SimulationResult result = simulate(oracle, requests, local, placement, seed);
    res.evidence.push_back({size, characteristics(result, requests, walk_mode), seed});
    return res.evidence.back().serviced_share() >= 1.0;
  };

  int lo = bounds.first;
  if (serves_all(lo)) {
    res.found = true;
    res.min_fleet = lo;
    return res;
  }
  int hi = lo;
  bool hi_ok = false;
  while (hi < bounds.second) {
    hi = std::min(hi * 2, bounds.second);
    if (serves_all(hi)) {
      hi_ok = true;
      break;
    }
    lo = hi;
  }
  if (!hi_ok) return res;  // not found within bounds
  while (hi - lo > resolution) {
    const int mid = lo + (hi - lo) / 2;
    if (serves_all(mid))
      hi = mid;
    else
      lo = mid;
  }
  // greedy dispatch is not strictly monotone in fleet size; walk down while
  // the predecessor still serves everything
  while (hi - resolution >= bounds.first && serves_all(hi - resolution)) hi -= resolution;
  res.found = true;
  res.min_fleet = hi;
  return res;
}

// Spatial mismatch between supply and demand: where the never-used vehicles
// sit versus where the rejected requests originate.
struct MismatchReport {
  std::vector<StopId> unused_vehicle_stops;
  std::vector<StopId> rejected_origins;
  std::vector<StopId> origin_free_stops;  // stops with zero request origins
  std::vector<StopId> overlap;            // unused vehicle at an origin-free stop
};

inline MismatchReport mismatch_analysis(const SimulationResult& result,
                                        const RequestSet& requests, const StopNetwork& net) {
  std::set<StopId> unused, rejected, origin_free;
  std::vector<char> has_origin(net.size(), 0);
  for (const Request& r : requests.requests) has_origin[r.origin_stop] = 1;
  for (const auto& v : result.vehicles)
    if (!v.ever_used) unused.insert(v.final_stop);
  for (const Request& r : requests.requests)
    if (!result.outcomes[r.request_id].served) rejected.insert(r.origin_stop);
  for (StopId s = 0; s < net.size(); ++s)
    if (!has_origin[s]) origin_free.insert(s);
  MismatchReport report;
  report.unused_vehicle_stops.assign(unused.begin(), unused.end());
  report.rejected_origins.assign(rejected.begin(), rejected.end());
  report.origin_free_stops.assign(origin_free.begin(), origin_free.end());
  std::set_intersection(unused.begin(), unused.end(), origin_free.begin(), origin_free.end(),
                        std::back_inserter(report.overlap));
  return report;
}

}  // namespace ridepool
