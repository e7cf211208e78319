#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ridepool/csv.hpp"

namespace ridepool {

using StopId = int;

struct Coord {
  double x = 0.0;  // meters east
  double y = 0.0;  // meters north
};

inline double euclidean(const Coord& a, const Coord& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct EdgeTo {
  StopId to;
  double length;
};

// Directed, strongly connected stop graph with positive edge lengths.
// Stop ids are dense 0..n-1. Immutable after construction.
class StopNetwork {
 public:
  StopNetwork(std::vector<Coord> positions,
              const std::vector<std::tuple<StopId, StopId, double>>& edges)
      : positions_(std::move(positions)),
        out_(positions_.size()),
        in_(positions_.size()) {
    const int n = static_cast<int>(positions_.size());
    if (n == 0) throw std::invalid_argument("network has no stops");
    for (const auto& c : positions_)
      if (!std::isfinite(c.x) || !std::isfinite(c.y))
        throw std::invalid_argument("non-finite stop coordinate");
    for (const auto& [from, to, len] : edges) {
      if (from < 0 || from >= n || to < 0 || to >= n)
        throw std::invalid_argument("edge endpoint out of range: " + std::to_string(from) +
                                    "->" + std::to_string(to));
      if (!(len > 0.0))
        throw std::invalid_argument("non-positive edge length on edge " +
                                    std::to_string(from) + "->" + std::to_string(to));
      out_[from].push_back({to, len});
      in_[to].push_back({from, len});
    }
    for (auto& adj : out_)
      std::sort(adj.begin(), adj.end(),
                [](const EdgeTo& a, const EdgeTo& b) { return a.to < b.to; });
    check_strongly_connected();
    edge_count_ = edges.size();
  }

  int size() const { return static_cast<int>(positions_.size()); }
  size_t edge_count() const { return edge_count_; }
  const Coord& position(StopId s) const { return positions_[check_id(s)]; }
  const std::vector<Coord>& positions() const { return positions_; }
  const std::vector<EdgeTo>& out(StopId s) const { return out_[check_id(s)]; }
  const std::vector<EdgeTo>& in(StopId s) const { return in_[check_id(s)]; }

  StopId check_id(StopId s) const {
    if (s < 0 || s >= size())
      throw std::out_of_range("stop id out of range: " + std::to_string(s));
    return s;
  }

 private:
  void check_strongly_connected() const {
    if (size() == 1) return;
    auto unreachable = [this](const std::vector<std::vector<EdgeTo>>& adj) -> StopId {
      std::vector<char> seen(size(), 0);
      std::vector<StopId> stack{0};
      seen[0] = 1;
      while (!stack.empty()) {
        StopId u = stack.back();
        stack.pop_back();
        for (const auto& e : adj[u])
          if (!seen[e.to]) {
            seen[e.to] = 1;
            stack.push_back(e.to);
          }
      }
      for (StopId s = 0; s < size(); ++s)
        if (!seen[s]) return s;
      return -1;
    };
    // forward pass catches stops unreachable from 0, reverse pass stops that
    // cannot reach 0
    if (StopId s = unreachable(out_); s >= 0)
      throw std::invalid_argument("network not strongly connected: stop " +
                                  std::to_string(s) + " unreachable from stop 0");
    if (StopId s = unreachable(in_); s >= 0)
      throw std::invalid_argument("network not strongly connected: stop " +
                                  std::to_string(s) + " cannot reach stop 0");
  }

  std::vector<Coord> positions_;
  std::vector<std::vector<EdgeTo>> out_;
  std::vector<std::vector<EdgeTo>> in_;
  size_t edge_count_ = 0;
};

struct PathResult {
  double distance = 0.0;
  std::vector<StopId> path;  // first = source, last = target
};

inline StopNetwork load_network(const std::string& stops_file, const std::string& edges_file) {
  struct Row {
    StopId id;
    Coord pos;
  };
  std::vector<Row> rows;
  csv::read_file(stops_file, {"stop_id", "x", "y"}, [&](size_t row, const auto& cells) {
    rows.push_back({static_cast<StopId>(csv::to_int(cells[0], stops_file, row)),
                    {csv::to_double(cells[1], stops_file, row),
                     csv::to_double(cells[2], stops_file, row)}});
  });
  if (rows.empty()) throw std::runtime_error(stops_file + ": no stops");
  std::vector<Coord> positions(rows.size());
  std::vector<char> seen(rows.size(), 0);
  for (const auto& r : rows) {
    if (r.id < 0 || r.id >= static_cast<StopId>(rows.size()))
      throw std::runtime_error(stops_file + ": stop ids must be dense 0..n-1, got " +
                               std::to_string(r.id) + " for n=" + std::to_string(rows.size()));
    if (seen[r.id])
      throw std::runtime_error(stops_file + ": duplicate stop id " + std::to_string(r.id));
    seen[r.id] = 1;
    positions[r.id] = r.pos;
  }
  std::vector<std::tuple<StopId, StopId, double>> edges;
  csv::read_file(edges_file, {"from", "to", "length_m"}, [&](size_t row, const auto& cells) {
    edges.emplace_back(static_cast<StopId>(csv::to_int(cells[0], edges_file, row)),
                       static_cast<StopId>(csv::to_int(cells[1], edges_file, row)),
                       csv::to_double(cells[2], edges_file, row));
  });
  return StopNetwork(std::move(positions), edges);
}

// rows x cols lattice, bidirectional edges between 4-neighbors of length `spacing`.
inline StopNetwork grid_network(int rows, int cols, double spacing) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
  std::vector<Coord> positions;
  positions.reserve(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) positions.push_back({c * spacing, r * spacing});
  std::vector<std::tuple<StopId, StopId, double>> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        edges.emplace_back(id(r, c), id(r, c + 1), spacing);
        edges.emplace_back(id(r, c + 1), id(r, c), spacing);
      }
      if (r + 1 < rows) {
        edges.emplace_back(id(r, c), id(r + 1, c), spacing);
        edges.emplace_back(id(r + 1, c), id(r, c), spacing);
      }
    }
  return StopNetwork(std::move(positions), edges);
}

namespace detail {

// Dijkstra over the given adjacency (out_ for source-rooted, in_ for
// target-rooted searches). Heap ties resolved by smaller node id so runs are
// reproducible.
inline std::vector<double> dijkstra(const StopNetwork& net, StopId root,
                                    bool reverse) {
  std::vector<double> dist(net.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, StopId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[root] = 0.0;
  heap.push({0.0, root});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    const auto& adj = reverse ? net.in(u) : net.out(u);
    for (const auto& e : adj) {
      double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        heap.push({nd, e.to});
      }
    }
  }
  return dist;
}

constexpr double kPathEps = 1e-9;

// Walks forward from `from`, always taking the smallest-id neighbor that stays
// on a shortest path, which yields the lexicographically smallest node
// sequence among equal-length paths. `dist_to_target` is a target-rooted
// distance column.
inline std::vector<StopId> lexmin_path(const StopNetwork& net, StopId from, StopId to,
                                       const std::vector<double>& dist_to_target) {
  std::vector<StopId> path{from};
  StopId cur = from;
  while (cur != to) {
    StopId next = -1;
    for (const auto& e : net.out(cur)) {  // out() is sorted by id
      if (std::abs(e.length + dist_to_target[e.to] - dist_to_target[cur]) <=
          kPathEps * (1.0 + dist_to_target[cur])) {
        next = e.to;
        break;
      }
    }
    if (next < 0) throw std::logic_error("shortest-path reconstruction failed");
    path.push_back(next);
    cur = next;
  }
  return path;
}

}  // namespace detail

inline PathResult shortest_path(const StopNetwork& net, StopId from, StopId to) {
  net.check_id(from);
  net.check_id(to);
  if (from == to) return {0.0, {from}};
  auto dist = detail::dijkstra(net, to, /*reverse=*/true);
  return {dist[from], detail::lexmin_path(net, from, to, dist)};
}

inline double travel_time(double distance_m, double speed_mps) {
  if (!(speed_mps > 0.0)) throw std::invalid_argument("speed must be > 0");
  if (distance_m < 0.0) throw std::invalid_argument("distance must be >= 0");
  return distance_m / speed_mps;
}

// Euclidean argmin over all stops; ties go to the smaller stop id.
inline std::pair<StopId, double> nearest_stop(const StopNetwork& net, const Coord& p) {
  StopId best = 0;
  double best_d = euclidean(net.position(0), p);
  for (StopId s = 1; s < net.size(); ++s) {
    double d = euclidean(net.position(s), p);
    if (d < best_d) {
      best = s;
      best_d = d;
    }
  }
  return {best, best_d};
}

inline double kmh_to_mps(double kmh) { return kmh / 3.6; }

}  // namespace ridepool
