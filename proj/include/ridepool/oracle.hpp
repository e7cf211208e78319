#pragma once

#include <atomic>
#include <memory>
#include <thread>
#include <vector>

#include "ridepool/network.hpp"

namespace ridepool {

// Many-to-many distance/path provider. Caches one target-rooted Dijkstra
// column per queried target, so repeated queries against the same destination
// (the common pattern in dispatch) are O(1). Thread-safe; losers of a
// concurrent column race discard their copy.
class DistanceOracle {
 public:
  explicit DistanceOracle(const StopNetwork& net)
      : net_(&net), columns_(net.size()) {
    for (auto& c : columns_) c.store(nullptr, std::memory_order_relaxed);
  }

  ~DistanceOracle() {
    for (auto& c : columns_) delete c.load(std::memory_order_relaxed);
  }

  DistanceOracle(const DistanceOracle&) = delete;
  DistanceOracle& operator=(const DistanceOracle&) = delete;

  const StopNetwork& network() const { return *net_; }

  double distance(StopId from, StopId to) const {
    net_->check_id(from);
    return column(net_->check_id(to))[from];
  }

  PathResult path(StopId from, StopId to) const {
    net_->check_id(from);
    net_->check_id(to);
    if (from == to) return {0.0, {from}};
    const auto& col = column(to);
    return {col[from], detail::lexmin_path(*net_, from, to, col)};
  }

  double time(StopId from, StopId to, double speed_mps) const {
    return travel_time(distance(from, to), speed_mps);
  }

  // Precomputes every column; useful before large runs.
  void warm_all(int jobs = 1) const {
    if (jobs < 1) jobs = 1;
    std::atomic<int> next{0};
    auto work = [&] {
      for (int t = next.fetch_add(1); t < net_->size(); t = next.fetch_add(1)) column(t);
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < jobs; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }

 private:
  const std::vector<double>& column(StopId target) const {
    auto& slot = columns_[target];
    if (const auto* col = slot.load(std::memory_order_acquire)) return *col;
    auto* fresh = new std::vector<double>(detail::dijkstra(*net_, target, /*reverse=*/true));
    const std::vector<double>* expected = nullptr;
    if (!slot.compare_exchange_strong(expected, fresh, std::memory_order_acq_rel)) {
      delete fresh;
      return *expected;
    }
    return *fresh;
  }

  const StopNetwork* net_;
  mutable std::vector<std::atomic<const std::vector<double>*>> columns_;
};

}  // namespace ridepool
