#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ridepool/cost.hpp"
#include "ridepool/demand.hpp"
#include "ridepool/engine.hpp"
#include "ridepool/metrics.hpp"

namespace ridepool::io {

using nlohmann::json;

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings on all platforms
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

inline void write_requests_csv(const std::filesystem::path& path, const RequestSet& set,
                               const SimulationResult* result = nullptr) {
  auto out = open_out(path);
  out << "request_id,origin_stop,dest_stop,request_time_s,direct_distance_m,direct_time_s,"
         "baseline_distance_m,baseline_time_s,walk_in_m,walk_out_m";
  if (result) out << ",outcome,vehicle_id,pickup_time_s,dropoff_time_s";
  out << "\n";
  for (const Request& r : set.requests) {
    out << r.request_id << ',' << r.origin_stop << ',' << r.dest_stop << ','
        << fmt(r.request_time) << ',' << fmt(r.direct_distance) << ',' << fmt(r.direct_time)
        << ',' << fmt(r.baseline_distance) << ',' << fmt(r.baseline_time) << ','
        << fmt(r.walk_in) << ',' << fmt(r.walk_out);
    if (result) {
      const auto& o = result->outcomes[r.request_id];
      if (o.served)
        out << ",served," << o.vehicle_id << ',' << fmt(o.pickup_time) << ','
            << fmt(o.dropoff_time);
      else
        out << ",rejected,,,";
    }
    out << "\n";
  }
}

inline void write_vehicles_csv(const std::filesystem::path& path, const SimulationResult& result) {
  auto out = open_out(path);
  out << "vehicle_id,start_stop,final_stop,odometer_total_m,odometer_empty_m,ever_used\n";
  for (const auto& v : result.vehicles)
    out << v.vehicle_id << ',' << v.start_stop << ',' << v.final_stop << ','
        << fmt(v.odometer_total) << ',' << fmt(v.odometer_empty) << ','
        << (v.ever_used ? 1 : 0) << "\n";
}

inline void write_segments_csv(const std::filesystem::path& path, const SimulationResult& result) {
  auto out = open_out(path);
  out << "vehicle_id,from_stop,to_stop,depart_s,arrive_s,distance_m,occupancy\n";
  for (const auto& v : result.vehicles)
    for (const auto& s : v.segments)
      out << v.vehicle_id << ',' << s.from << ',' << s.to << ',' << fmt(s.depart) << ','
          << fmt(s.arrive) << ',' << fmt(s.distance) << ',' << s.occupancy << "\n";
}

inline void write_occupancy_csv(const std::filesystem::path& path, const OccupancySeries& series) {
  auto out = open_out(path);
  out << "time_s,occupancy\n";
  for (const auto& [t, occ] : series.steps) out << fmt(t) << ',' << occ << "\n";
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<SweepPoint>& points) {
  auto out = open_out(path);
  out << "fleet_size,serviced_share,rel_time,rel_distance,empty_share,occupancy_incl,"
         "occupancy_excl,empty_vehicles,seed\n";
  for (const auto& p : points) {
    const auto& c = p.characteristics;
    out << p.fleet_size << ',' << fmt(c.serviced_share) << ',' << fmt(c.relative_travel_time)
        << ',' << fmt(c.relative_driven_distance) << ',' << fmt(c.empty_mileage_share) << ','
        << fmt(c.avg_occupancy_incl) << ',' << fmt(c.avg_occupancy_excl) << ','
        << c.empty_vehicles << ',' << p.seed << "\n";
  }
}

inline void write_mismatch_csv(const std::filesystem::path& path, const MismatchReport& report,
                               const StopNetwork& net) {
  auto out = open_out(path);
  out << "stop_id,x,y,category\n";
  auto rows = [&](const std::vector<StopId>& stops, const char* category) {
    for (StopId s : stops)
      out << s << ',' << fmt(net.position(s).x) << ',' << fmt(net.position(s).y) << ','
          << category << "\n";
  };
  rows(report.unused_vehicle_stops, "unused_vehicle");
  rows(report.rejected_origins, "rejected_origin");
  rows(report.origin_free_stops, "origin_free");
  rows(report.overlap, "overlap");
}

inline json to_json(const Characteristics& c) {
  return json{{"serviced_share", c.serviced_share},
              {"relative_travel_time", c.relative_travel_time},
              {"relative_travel_time_mean", c.relative_travel_time_mean},
              {"relative_driven_distance", c.relative_driven_distance},
              {"empty_mileage_share", c.empty_mileage_share},
              {"avg_occupancy_incl", c.avg_occupancy_incl},
              {"avg_occupancy_excl", c.avg_occupancy_excl},
              {"empty_vehicles", c.empty_vehicles}};
}

inline json to_json(const IngestStats& s) {
  return json{{"parsed", s.parsed},
              {"kept", s.kept},
              {"dropped_same_stop", s.dropped_same_stop},
              {"dropped_outside_window", s.dropped_outside_window},
              {"mean_walk_m", s.mean_walk_m}};
}

inline json to_json(const CostReport& r) {
  return json{{"wages", r.wages},
              {"energy", r.energy},
              {"pooling_operating_total", r.pooling_operating_total},
              {"fare_per_trip", r.fare_per_trip},
              {"fare_per_year", r.fare_per_year},
              {"private_fuel_total", r.private_fuel_total},
              {"private_cost_per_trip", r.private_cost_per_trip},
              {"private_cost_per_year", r.private_cost_per_year},
              {"pooling_procurement_total", r.pooling_procurement_total},
              {"pooling_procurement_peak_share", r.pooling_procurement_peak_share},
              {"pooling_procurement_per_customer", r.pooling_procurement_per_customer},
              {"private_procurement_total", r.private_procurement_total}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace ridepool::io
