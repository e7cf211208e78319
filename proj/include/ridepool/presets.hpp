#pragma once

#include <string>

#include "ridepool/engine.hpp"
#include "ridepool/metrics.hpp"

namespace ridepool {

struct Preset {
  ServiceParams params;
  WalkMode walk_mode;
};

// Named parameter sets for the two Berlin service areas.
inline Preset preset(const std::string& name) {
  Preset p;
  if (name == "berlin") {
    p.params.vehicle_speed = kmh_to_mps(25.3);
    p.params.max_wait = 6 * 60.0;
    p.params.max_delay = 7 * 60.0 + 40.0;
    p.params.seat_capacity = 6;
    p.walk_mode = WalkFixedPerLeg{120.0};
  } else if (name == "berlin-center") {
    p.params.vehicle_speed = kmh_to_mps(18.3);
    p.params.max_wait = 6 * 60.0;
    p.params.max_delay = 7 * 60.0;
    p.params.seat_capacity = 6;
    p.walk_mode = WalkFixedPerLeg{60.0};
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (available: berlin, berlin-center)");
  }
  return p;
}

}  // namespace ridepool
