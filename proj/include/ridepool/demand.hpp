#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ridepool/oracle.hpp"

namespace ridepool {

struct TripRecord {
  long long trip_id = 0;
  double depart_time = 0.0;  // seconds since midnight
  Coord origin;
  Coord destination;
  double recorded_distance = 0.0;  // meters
  double recorded_duration = 0.0;  // seconds
};

enum class BaselineMode { Recorded, ShortestPath };
enum class Provenance { Ingested, Synthetic };

struct Request {
  int request_id = 0;
  StopId origin_stop = 0;
  StopId dest_stop = 0;
  double request_time = 0.0;
  double direct_distance = 0.0;  // network shortest path origin->dest
  double direct_time = 0.0;      // direct_distance / configured speed
  double baseline_distance = 0.0;
  double baseline_time = 0.0;
  double walk_in = 0.0;   // meters, raw origin to origin_stop
  double walk_out = 0.0;  // meters, dest_stop to raw destination
};

struct RequestSet {
  std::vector<Request> requests;  // sorted by request_time
  Provenance provenance = Provenance::Synthetic;
  BaselineMode baseline_mode = BaselineMode::ShortestPath;
};

struct IngestStats {
  size_t parsed = 0;
  size_t kept = 0;
  size_t dropped_same_stop = 0;
  size_t dropped_outside_window = 0;
  double mean_walk_m = 0.0;  // mean over both legs of kept requests
};

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 0.0;  // half-open [t0, t1)
};

namespace detail {

inline void finalize(RequestSet& set) {
  std::stable_sort(set.requests.begin(), set.requests.end(),
                   [](const Request& a, const Request& b) {
                     return a.request_time < b.request_time;
                   });
  for (size_t i = 0; i < set.requests.size(); ++i)
    set.requests[i].request_id = static_cast<int>(i);
}

}  // namespace detail

// Maps trip records onto the stop network. Trips whose mapped origin stop
// equals the mapped destination stop cannot be pooled and are dropped.
inline std::pair<RequestSet, IngestStats> ingest_trips(const std::string& file,
                                                       const DistanceOracle& oracle,
                                                       TimeWindow window,
                                                       BaselineMode baseline_mode,
                                                       double vehicle_speed_mps) {
  if (!(window.t0 < window.t1)) throw std::invalid_argument("window must satisfy t0 < t1");
  const StopNetwork& net = oracle.network();
  RequestSet set;
  set.provenance = Provenance::Ingested;
  set.baseline_mode = baseline_mode;
  IngestStats stats;
  double walk_sum = 0.0;
  csv::read_file(
      file,
      {"trip_id", "depart_time_s", "origin_x", "origin_y", "dest_x", "dest_y",
       "distance_m", "duration_s"},
      [&](size_t row, const std::vector<std::string>& cells) {
        TripRecord rec;
        rec.trip_id = csv::to_int(cells[0], file, row);
        rec.depart_time = csv::to_double(cells[1], file, row);
        rec.origin = {csv::to_double(cells[2], file, row), csv::to_double(cells[3], file, row)};
        rec.destination = {csv::to_double(cells[4], file, row), csv::to_double(cells[5], file, row)};
        rec.recorded_distance = csv::to_double(cells[6], file, row);
        rec.recorded_duration = csv::to_double(cells[7], file, row);
        if (rec.recorded_distance < 0.0 || !(rec.recorded_duration > 0.0))
          throw std::runtime_error(file + ": row " + std::to_string(row) +
                                   ": invalid recorded distance/duration");
        ++stats.parsed;
        if (rec.depart_time < window.t0 || rec.depart_time >= window.t1) {
          ++stats.dropped_outside_window;
          return;
        }
        auto [o_stop, walk_in] = nearest_stop(net, rec.origin);
        auto [d_stop, walk_out] = nearest_stop(net, rec.destination);
        if (o_stop == d_stop) {
          ++stats.dropped_same_stop;
          return;
        }
        Request r;
        r.origin_stop = o_stop;
        r.dest_stop = d_stop;
        r.request_time = rec.depart_time;
        r.direct_distance = oracle.distance(o_stop, d_stop);
        r.direct_time = travel_time(r.direct_distance, vehicle_speed_mps);
        if (baseline_mode == BaselineMode::Recorded) {
          // zero-length records survive stop mapping only when GPS noise maps
          // distinct points to distinct stops; fall back to the network path
          r.baseline_distance = rec.recorded_distance > 0.0 ? rec.recorded_distance
                                                            : r.direct_distance;
          r.baseline_time = rec.recorded_duration;
        } else {
          r.baseline_distance = r.direct_distance;
          r.baseline_time = r.direct_time;
        }
        r.walk_in = walk_in;
        r.walk_out = walk_out;
        walk_sum += walk_in + walk_out;
        set.requests.push_back(r);
        ++stats.kept;
      });
  stats.mean_walk_m = stats.kept ? walk_sum / (2.0 * stats.kept) : 0.0;
  detail::finalize(set);
  return {std::move(set), stats};
}

struct UniformOd {};
struct HotspotOd {
  int centers = 3;
  double concentration_m = 500.0;  // gaussian kernel width around each center
};
using OdModel = std::variant<UniformOd, HotspotOd>;

// Poisson request stream over the window; reproducible from the seed. Given
// the same seed, a longer window extends the arrival sequence of a shorter
// one rather than resampling it.
inline RequestSet synth_requests(const DistanceOracle& oracle, double rate_per_s,
                                 TimeWindow window, const OdModel& od_model,
                                 uint64_t seed, double vehicle_speed_mps) {
  if (!(rate_per_s > 0.0)) throw std::invalid_argument("rate must be > 0");
  if (!(window.t0 < window.t1)) throw std::invalid_argument("window must satisfy t0 < t1");
  const StopNetwork& net = oracle.network();
  if (net.size() < 2) throw std::invalid_argument("need at least 2 stops for demand");

  std::mt19937_64 arrival_rng(seed);
  std::mt19937_64 od_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::exponential_distribution<double> gap(rate_per_s);
  std::uniform_int_distribution<StopId> any_stop(0, net.size() - 1);

  // hotspot model: mixture of gaussian kernels centered on sampled stops
  std::vector<std::discrete_distribution<StopId>> kernels;
  if (const auto* hs = std::get_if<HotspotOd>(&od_model)) {
    if (hs->centers < 1 || !(hs->concentration_m > 0.0))
      throw std::invalid_argument("hotspot model needs centers >= 1, concentration > 0");
    std::mt19937_64 center_rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
    for (int k = 0; k < hs->centers; ++k) {
      Coord c = net.position(any_stop(center_rng));
      std::vector<double> w(net.size());
      double total = 0.0;
      for (StopId s = 0; s < net.size(); ++s) {
        double d = euclidean(net.position(s), c);
        w[s] = std::exp(-0.5 * (d / hs->concentration_m) * (d / hs->concentration_m));
        total += w[s];
      }
      if (!(total > 0.0)) throw std::invalid_argument("hotspot center off-network");
      kernels.emplace_back(w.begin(), w.end());
    }
  }
  auto draw_stop = [&]() -> StopId {
    if (kernels.empty()) return any_stop(od_rng);
    std::uniform_int_distribution<size_t> pick(0, kernels.size() - 1);
    return kernels[pick(od_rng)](od_rng);
  };

  RequestSet set;
  set.provenance = Provenance::Synthetic;
  set.baseline_mode = BaselineMode::ShortestPath;
  double t = window.t0;
  while (true) {
    t += gap(arrival_rng);
    if (t >= window.t1) break;
    Request r;
    r.request_time = t;
    r.origin_stop = draw_stop();
    do {
      r.dest_stop = draw_stop();
    } while (r.dest_stop == r.origin_stop);
    r.direct_distance = oracle.distance(r.origin_stop, r.dest_stop);
    r.direct_time = travel_time(r.direct_distance, vehicle_speed_mps);
    r.baseline_distance = r.direct_distance;
    r.baseline_time = r.direct_time;
    set.requests.push_back(r);
  }
  detail::finalize(set);
  return set;
}

// Share of daily trips in the given hour, from an hourly profile summing to 1.
inline double window_share(const std::vector<double>& profile, int hour) {
  if (profile.size() != 24) throw std::invalid_argument("profile must have 24 hourly bins");
  double sum = 0.0;
  for (double f : profile) {
    if (f < 0.0) throw std::invalid_argument("profile fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("profile must sum to 1");
  if (hour < 0 || hour >= 24) throw std::invalid_argument("hour must be in [0,24)");
  return profile[static_cast<size_t>(hour)];
}

}  // namespace ridepool
