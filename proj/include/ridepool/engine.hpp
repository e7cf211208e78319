#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "ridepool/demand.hpp"
#include "ridepool/oracle.hpp"

namespace ridepool {

// Anchor for the frozen dropoff deadline. The promised-pickup anchor keeps
// feasibility checks static after assignment.
enum class DelayAnchor { PromisedPickup, RequestTime };

struct ServiceParams {
  double max_wait = 360.0;                    // seconds
  double max_delay = 460.0;                   // seconds
  double vehicle_speed = kmh_to_mps(25.3);    // m/s
  int seat_capacity = 6;
  double dwell_time = 0.0;                    // seconds per stop action
  int fleet_size = 1;
  DelayAnchor delay_anchor = DelayAnchor::PromisedPickup;

  void validate() const {
    if (!(max_wait > 0.0)) throw std::invalid_argument("max_wait must be > 0");
    if (!(max_delay > 0.0)) throw std::invalid_argument("max_delay must be > 0");
    if (!(vehicle_speed > 0.0)) throw std::invalid_argument("vehicle_speed must be > 0");
    if (seat_capacity < 1) throw std::invalid_argument("seat_capacity must be >= 1");
    if (dwell_time < 0.0) throw std::invalid_argument("dwell_time must be >= 0");
    if (fleet_size < 1) throw std::invalid_argument("fleet_size must be >= 1");
  }
};

enum class ActionKind { Pickup, Dropoff };

struct StopAction {
  StopId stop;
  ActionKind kind;
  int request_id;
  double planned_arrival;
  double deadline;  // frozen at assignment
};

struct Vehicle {
  int id = 0;
  int seat_capacity = 6;
  StopId anchor_stop = 0;       // last executed stop (or initial position)
  double anchor_time = 0.0;     // arrival time at anchor_stop
  double anchor_depart = 0.0;   // departure time toward stoplist[0]
  std::vector<StopAction> stoplist;
  int onboard = 0;
  double odometer_total = 0.0;
  double odometer_empty = 0.0;
  bool ever_used = false;

  bool idle() const { return stoplist.empty(); }
};

struct Insertion {
  int vehicle_id;
  int pickup_index;   // position in the pre-insertion stoplist
  int dropoff_index;  // >= pickup_index; dropoff goes right after the pickup when equal
  double added_distance;
  double promised_pickup;
  double promised_dropoff;
};

struct Segment {
  StopId from;
  StopId to;
  double depart;
  double arrive;
  double distance;
  int occupancy;  // onboard count during the leg
};

struct OccupancyEvent {
  double time;
  int delta;  // +1 pickup, -1 dropoff
  int request_id;
};

struct VehicleTrace {
  int vehicle_id = 0;
  StopId start_stop = 0;
  StopId final_stop = 0;
  double odometer_total = 0.0;
  double odometer_empty = 0.0;
  bool ever_used = false;
  std::vector<Segment> segments;
  std::vector<OccupancyEvent> events;
};

struct RequestOutcome {
  bool served = false;
  double pickup_time = -1.0;
  double dropoff_time = -1.0;
  int vehicle_id = -1;
};

struct SimulationResult {
  std::vector<RequestOutcome> outcomes;  // indexed by request_id
  std::vector<VehicleTrace> vehicles;    // indexed by vehicle_id
  int seat_capacity = 6;
};

struct UniformPlacement {};
struct DemandWeightedPlacement {
  const RequestSet* demand = nullptr;  // vehicle start stops ~ request-origin counts
};
using Placement = std::variant<UniformPlacement, DemandWeightedPlacement>;

// Draws vehicle start positions sequentially from one RNG, so with a fixed
// seed the first n vehicles of any fleet of size >= n are identical.
inline std::vector<Vehicle> init_fleet(const StopNetwork& net, const ServiceParams& params,
                                       const Placement& placement, uint64_t seed,
                                       double start_time = 0.0) {
  params.validate();
  std::mt19937_64 rng(seed);
  std::vector<Vehicle> fleet(params.fleet_size);
  std::uniform_int_distribution<StopId> uniform(0, net.size() - 1);
  std::vector<double> weights;
  if (const auto* dw = std::get_if<DemandWeightedPlacement>(&placement)) {
    if (!dw->demand) throw std::invalid_argument("demand_weighted placement needs a request set");
    weights.assign(net.size(), 0.0);
    for (const auto& r : dw->demand->requests) weights[r.origin_stop] += 1.0;
  }
  std::discrete_distribution<StopId> weighted(weights.begin(), weights.end());
  for (int i = 0; i < params.fleet_size; ++i) {
    Vehicle& v = fleet[i];
    v.id = i;
    v.seat_capacity = params.seat_capacity;
    v.anchor_stop = weights.empty() ? uniform(rng) : weighted(rng);
    v.anchor_time = start_time;
    v.anchor_depart = start_time;
  }
  return fleet;
}

namespace detail {

constexpr double kTimeEps = 1e-9;

struct ScheduleView {
  const Vehicle& v;
  double now;
  const DistanceOracle& oracle;
  const ServiceParams& p;

  StopId stop_before(int i) const { return i == 0 ? v.anchor_stop : v.stoplist[i - 1].stop; }
  double depart_before(int i) const {
    if (i > 0) return v.stoplist[i - 1].planned_arrival + p.dwell_time;
    // an idle vehicle departs when assigned; anchor_depart covers any dwell
    // still owed at the anchor stop
    return v.idle() ? std::max(now, v.anchor_depart) : v.anchor_depart;
  }
  double leg_time(StopId a, StopId b) const {
    return oracle.distance(a, b) / p.vehicle_speed;
  }
};

}  // namespace detail

// Enumerates every feasible (pickup_index, dropoff_index) placement of the
// request into the vehicle's stoplist. The leg currently being driven is
// committed, so a busy vehicle only accepts insertions after its next stop.
// Emits candidates in (pickup_index, dropoff_index) order.
template <typename Emit>
inline void for_each_feasible_insertion(const Vehicle& v, const Request& req, double now,
                                        const DistanceOracle& oracle,
                                        const ServiceParams& params, Emit&& emit) {
  using detail::kTimeEps;
  const auto& sl = v.stoplist;
  const int len = static_cast<int>(sl.size());
  const detail::ScheduleView view{v, now, oracle, params};
  const double pickup_deadline = req.request_time + params.max_wait;
  const StopId origin = req.origin_stop;
  const StopId dest = req.dest_stop;

  // occupancy right before existing action i
  std::vector<int> occ_before(len + 1);
  occ_before[0] = v.onboard;
  for (int i = 0; i < len; ++i)
    occ_before[i + 1] = occ_before[i] + (sl[i].kind == ActionKind::Pickup ? 1 : -1);

  const int min_p = len > 0 ? 1 : 0;
  for (int p = min_p; p <= len; ++p) {
    if (occ_before[p] + 1 > v.seat_capacity) continue;
    const StopId prev = view.stop_before(p);
    const double arr_pickup = view.depart_before(p) + view.leg_time(prev, origin);
    if (arr_pickup > pickup_deadline + kTimeEps) continue;
    const double anchor_t =
        params.delay_anchor == DelayAnchor::PromisedPickup ? arr_pickup : req.request_time;
    const double dropoff_deadline = anchor_t + req.direct_time + params.max_delay;
    const double pickup_added =
        oracle.distance(prev, origin) +
        (p < len ? oracle.distance(origin, sl[p].stop) - oracle.distance(prev, sl[p].stop) : 0.0);

    double t = arr_pickup + params.dwell_time;
    StopId s = origin;
    int occ = occ_before[p] + 1;
    for (int d = p; d <= len; ++d) {
      if (d > p) {
        // extend the shifted chain over existing action d-1
        const int k = d - 1;
        const double arr_k = t + view.leg_time(s, sl[k].stop);
        if (arr_k > sl[k].deadline + kTimeEps) break;
        occ += sl[k].kind == ActionKind::Pickup ? 1 : -1;
        if (occ > v.seat_capacity) break;
        t = arr_k + params.dwell_time;
        s = sl[k].stop;
      }
      const double arr_dropoff = t + view.leg_time(s, dest);
      if (arr_dropoff > dropoff_deadline + kTimeEps) continue;
      // actions after the dropoff shift by the combined detour
      bool suffix_ok = true;
      double t2 = arr_dropoff + params.dwell_time;
      StopId s2 = dest;
      for (int k = d; k < len; ++k) {
        const double arr_k = t2 + view.leg_time(s2, sl[k].stop);
        if (arr_k > sl[k].deadline + kTimeEps) {
          suffix_ok = false;
          break;
        }
        t2 = arr_k + params.dwell_time;
        s2 = sl[k].stop;
      }
      if (!suffix_ok) continue;
      double added;
      if (d == p) {
        added = oracle.distance(prev, origin) + oracle.distance(origin, dest) +
                (p < len ? oracle.distance(dest, sl[p].stop) - oracle.distance(prev, sl[p].stop)
                         : 0.0);
      } else {
        added = pickup_added + oracle.distance(sl[d - 1].stop, dest) +
                (d < len
                     ? oracle.distance(dest, sl[d].stop) - oracle.distance(sl[d - 1].stop, sl[d].stop)
                     : 0.0);
      }
      emit(Insertion{v.id, p, d, added, arr_pickup, arr_dropoff});
    }
  }
}

inline std::vector<Insertion> feasible_insertions(const Vehicle& v, const Request& req,
                                                  double now, const DistanceOracle& oracle,
                                                  const ServiceParams& params) {
  std::vector<Insertion> out;
  for_each_feasible_insertion(v, req, now, oracle, params,
                              [&](const Insertion& ins) { out.push_back(ins); });
  return out;
}

namespace detail {

// added-distance ties within 1e-6 m count as equal so that independently
// computed sums land on the same side
constexpr double kDistTieEps = 1e-6;

inline bool on_duty(const Vehicle& v) {
  return v.ever_used && (!v.stoplist.empty() || v.onboard > 0);
}

// Tie order: on-duty used vehicles beat idle used vehicles beat never-used
// vehicles; remaining ties go to the lower id.
inline int tie_rank(const Vehicle& v) { return on_duty(v) ? 2 : (v.ever_used ? 1 : 0); }

inline bool beats(double added_a, const Vehicle& a, double added_b, const Vehicle& b) {
  if (added_a < added_b - kDistTieEps) return true;
  if (added_a > added_b + kDistTieEps) return false;
  if (tie_rank(a) != tie_rank(b)) return tie_rank(a) > tie_rank(b);
  return a.id < b.id;
}

inline void apply_insertion(Vehicle& v, const Request& req, double now, const Insertion& ins,
                            const DistanceOracle& oracle, const ServiceParams& params) {
  auto& sl = v.stoplist;
  const bool was_idle = v.idle();
  const double anchor_t = params.delay_anchor == DelayAnchor::PromisedPickup
                              ? ins.promised_pickup
                              : req.request_time;
  sl.insert(sl.begin() + ins.pickup_index,
            StopAction{req.origin_stop, ActionKind::Pickup, req.request_id, ins.promised_pickup,
                       req.request_time + params.max_wait});
  sl.insert(sl.begin() + ins.dropoff_index + 1,
            StopAction{req.dest_stop, ActionKind::Dropoff, req.request_id, ins.promised_dropoff,
                       anchor_t + req.direct_time + params.max_delay});
  if (was_idle) v.anchor_depart = std::max(now, v.anchor_depart);
  // recompute arrivals from the insertion point on
  double t = ins.pickup_index == 0 ? v.anchor_depart
                                   : sl[ins.pickup_index - 1].planned_arrival + params.dwell_time;
  StopId s = ins.pickup_index == 0 ? v.anchor_stop : sl[ins.pickup_index - 1].stop;
  for (size_t i = ins.pickup_index; i < sl.size(); ++i) {
    t += oracle.distance(s, sl[i].stop) / params.vehicle_speed;
    sl[i].planned_arrival = t;
    if (t > sl[i].deadline + kTimeEps)
      throw std::logic_error("insertion pushed an action past its frozen deadline");
    t += params.dwell_time;
    s = sl[i].stop;
  }
  v.ever_used = true;
}

}  // namespace detail

struct DispatchOutcome {
  bool assigned = false;
  Insertion insertion{};
};

// Assigns the request to the vehicle able to serve it with minimal additional
// driving distance; rejects when no vehicle can meet the time constraints.
inline DispatchOutcome dispatch(std::vector<Vehicle>& fleet, const Request& req, double now,
                                const DistanceOracle& oracle, const ServiceParams& params) {
  int best_vehicle = -1;
  Insertion best{};
  for (const Vehicle& v : fleet) {
    // cheap lower bound: the pickup cannot arrive earlier than the best
    // departure point in the schedule allows
    bool reachable = false;
    const detail::ScheduleView view{v, now, oracle, params};
    const double deadline = req.request_time + params.max_wait;
    for (int i = v.idle() ? 0 : 1; i <= static_cast<int>(v.stoplist.size()); ++i) {
      if (view.depart_before(i) + view.leg_time(view.stop_before(i), req.origin_stop) <=
          deadline + detail::kTimeEps) {
        reachable = true;
        break;
      }
    }
    if (!reachable) continue;
    bool have = false;
    Insertion local{};
    for_each_feasible_insertion(v, req, now, oracle, params, [&](const Insertion& ins) {
      if (!have || ins.added_distance < local.added_distance - detail::kDistTieEps) {
        local = ins;
        have = true;
      }
    });
    if (!have) continue;
    if (best_vehicle < 0 ||
        detail::beats(local.added_distance, v, best.added_distance, fleet[best_vehicle])) {
      best = local;
      best_vehicle = v.id;
    }
  }
  if (best_vehicle < 0) return {};
  detail::apply_insertion(fleet[best_vehicle], req, now, best, oracle, params);
  return {true, best};
}

namespace detail {

inline void advance_vehicle(Vehicle& v, double until, const DistanceOracle& oracle,
                            const ServiceParams& params, VehicleTrace& trace,
                            std::vector<RequestOutcome>& outcomes) {
  // strictly-before: an action scheduled at exactly `until` stays pending, so a
  // request arriving at the same instant can still be inserted around it
  while (!v.stoplist.empty() && v.stoplist.front().planned_arrival < until - kTimeEps) {
    const StopAction a = v.stoplist.front();
    v.stoplist.erase(v.stoplist.begin());
    const double dist = oracle.distance(v.anchor_stop, a.stop);
    if (dist > 0.0) {
      trace.segments.push_back(
          {v.anchor_stop, a.stop, v.anchor_depart, a.planned_arrival, dist, v.onboard});
      v.odometer_total += dist;
      if (v.onboard == 0) v.odometer_empty += dist;
    }
    auto& out = outcomes[a.request_id];
    if (a.kind == ActionKind::Pickup) {
      out.pickup_time = a.planned_arrival;
      ++v.onboard;
      trace.events.push_back({a.planned_arrival, +1, a.request_id});
    } else {
      out.dropoff_time = a.planned_arrival;
      --v.onboard;
      trace.events.push_back({a.planned_arrival, -1, a.request_id});
    }
    v.anchor_stop = a.stop;
    v.anchor_time = a.planned_arrival;
    v.anchor_depart = a.planned_arrival + params.dwell_time;
  }
}

}  // namespace detail

// Event-driven replay: requests dispatched one by one in time order, then the
// remaining schedules run to completion (decay phase).
inline SimulationResult simulate(const DistanceOracle& oracle, const RequestSet& requests,
                                 const ServiceParams& params, const Placement& placement,
                                 uint64_t seed) {
  params.validate();
  const double start_time =
      requests.requests.empty() ? 0.0 : requests.requests.front().request_time;
  std::vector<Vehicle> fleet =
      init_fleet(oracle.network(), params, placement, seed, start_time);

  SimulationResult result;
  result.seat_capacity = params.seat_capacity;
  result.outcomes.resize(requests.requests.size());
  result.vehicles.resize(fleet.size());
  for (const Vehicle& v : fleet) {
    result.vehicles[v.id].vehicle_id = v.id;
    result.vehicles[v.id].start_stop = v.anchor_stop;
  }

  double prev_time = start_time;
  for (const Request& req : requests.requests) {
    if (req.request_time < prev_time - detail::kTimeEps)
      throw std::invalid_argument("request set not sorted by request_time");
    prev_time = req.request_time;
    for (Vehicle& v : fleet)
      detail::advance_vehicle(v, req.request_time, oracle, params, result.vehicles[v.id],
                              result.outcomes);
    const DispatchOutcome out = dispatch(fleet, req, req.request_time, oracle, params);
    result.outcomes[req.request_id].served = out.assigned;
    if (out.assigned) result.outcomes[req.request_id].vehicle_id = out.insertion.vehicle_id;
  }
  for (Vehicle& v : fleet) {
    detail::advance_vehicle(v, std::numeric_limits<double>::infinity(), oracle, params,
                            result.vehicles[v.id], result.outcomes);
    auto& trace = result.vehicles[v.id];
    trace.final_stop = v.anchor_stop;
    trace.odometer_total = v.odometer_total;
    trace.odometer_empty = v.odometer_empty;
    trace.ever_used = v.ever_used;
  }
  return result;
}

// Checks every run-level invariant; returns an empty string when clean.
inline std::string validate_result(const SimulationResult& result, const RequestSet& requests,
                                   const ServiceParams& params) {
  using detail::kTimeEps;
  if (result.outcomes.size() != requests.requests.size()) return "outcome/request size mismatch";
  for (const Request& r : requests.requests) {
    const auto& o = result.outcomes[r.request_id];
    if (!o.served) continue;
    if (o.pickup_time < r.request_time - kTimeEps) return "pickup before request time";
    if (o.dropoff_time < o.pickup_time - kTimeEps) return "dropoff before pickup";
    if (o.pickup_time - r.request_time > params.max_wait + 1e-6) return "max_wait violated";
    if (o.dropoff_time - o.pickup_time > r.direct_time + params.max_delay + 1e-6)
      return "max_delay violated";
  }
  for (const auto& v : result.vehicles) {
    double occupied = 0.0;
    double total = 0.0;
    double empty = 0.0;
    double last_arrive = -std::numeric_limits<double>::infinity();
    for (const auto& s : v.segments) {
      if (s.occupancy < 0 || s.occupancy > result.seat_capacity) return "capacity violated";
      if (s.depart < last_arrive - kTimeEps) return "overlapping segments";
      if (s.arrive <= s.depart) return "non-increasing segment times";
      last_arrive = s.arrive;
      total += s.distance;
      if (s.occupancy == 0)
        empty += s.distance;
      else
        occupied += s.distance;
    }
    if (std::abs(total - v.odometer_total) > 1e-6) return "odometer_total mismatch";
    if (std::abs(empty - v.odometer_empty) > 1e-6) return "odometer_empty mismatch";
    if (std::abs(v.odometer_total - (v.odometer_empty + occupied)) > 1e-6)
      return "distance conservation violated";
  }
  return {};
}

}  // namespace ridepool
