#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ridepool/network.hpp"
#include "ridepool/oracle.hpp"

using namespace ridepool;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

StopNetwork triangle() {
  // 0->1 (100), 1->2 (100), 0->2 (250), plus reverse edges for connectivity
  return StopNetwork({{0, 0}, {100, 0}, {200, 0}},
                     {{0, 1, 100}, {1, 0, 100}, {1, 2, 100}, {2, 1, 100}, {0, 2, 250}, {2, 0, 250}});
}

}  // namespace

TEST_CASE("load_network accepts a minimal valid graph") {
  auto stops = write_temp("stops_ok.csv", "stop_id,x,y\n0,0,0\n1,100,0\n");
  auto edges = write_temp("edges_ok.csv", "from,to,length_m\n0,1,100\n1,0,100\n");
  StopNetwork net = load_network(stops.string(), edges.string());
  CHECK(net.size() == 2);
  CHECK(net.edge_count() == 2);
}

TEST_CASE("load_network rejects invalid inputs with named offenders") {
  auto stops = write_temp("stops3.csv", "stop_id,x,y\n0,0,0\n1,100,0\n2,200,0\n");
  SUBCASE("zero edge length") {
    auto edges = write_temp("edges_zero.csv", "from,to,length_m\n0,1,0\n1,0,100\n");
    CHECK_THROWS_WITH_AS(load_network(stops.string(), edges.string()),
                         doctest::Contains("non-positive edge length on edge 0->1"),
                         std::invalid_argument);
  }
  SUBCASE("disconnected graph names the unreachable stop") {
    auto edges = write_temp("edges_disc.csv", "from,to,length_m\n0,1,100\n1,0,100\n");
    CHECK_THROWS_WITH_AS(load_network(stops.string(), edges.string()),
                         doctest::Contains("stop 2"), std::invalid_argument);
  }
  SUBCASE("duplicate stop id") {
    auto dup = write_temp("stops_dup.csv", "stop_id,x,y\n0,0,0\n0,1,1\n2,2,2\n");
    auto edges = write_temp("edges_any.csv", "from,to,length_m\n0,2,100\n2,0,100\n");
    CHECK_THROWS_WITH_AS(load_network(dup.string(), edges.string()),
                         doctest::Contains("stop id"), std::runtime_error);
  }
  SUBCASE("malformed row reports the row number") {
    auto bad = write_temp("stops_bad.csv", "stop_id,x,y\n0,0,0\n1,abc,0\n");
    auto edges = write_temp("edges_any2.csv", "from,to,length_m\n0,1,100\n1,0,100\n");
    CHECK_THROWS_WITH_AS(load_network(bad.string(), edges.string()),
                         doctest::Contains("row 3"), std::runtime_error);
  }
}

TEST_CASE("grid_network construction counts") {
  CHECK(grid_network(1, 1, 100).size() == 1);
  CHECK(grid_network(1, 1, 100).edge_count() == 0);
  StopNetwork g22 = grid_network(2, 2, 100);
  CHECK(g22.size() == 4);
  CHECK(g22.edge_count() == 8);
  CHECK_THROWS_AS(grid_network(0, 5, 100), std::invalid_argument);
  CHECK_THROWS_AS(grid_network(5, 5, 0), std::invalid_argument);
}

TEST_CASE("shortest_path basics") {
  StopNetwork g = grid_network(5, 5, 250);
  SUBCASE("self path") {
    PathResult r = shortest_path(g, 7, 7);
    CHECK(r.distance == 0.0);
    CHECK(r.path == std::vector<StopId>{7});
  }
  SUBCASE("grid metric: corner to corner = 8 hops") {
    CHECK(shortest_path(g, 0, 24).distance == doctest::Approx(2000.0));
  }
  SUBCASE("(0,0) to (2,1) = 750 m") {
    // row-major ids: (row 2, col 1) = 11
    CHECK(shortest_path(g, 0, 11).distance == doctest::Approx(750.0));
  }
  SUBCASE("triangle detour via middle") {
    StopNetwork t = triangle();
    PathResult r = shortest_path(t, 0, 2);
    CHECK(r.distance == doctest::Approx(200.0));
    CHECK(r.path == std::vector<StopId>{0, 1, 2});
  }
}

TEST_CASE("shortest_path breaks ties lexicographically") {
  StopNetwork g = grid_network(2, 2, 100);
  // 0->3 via 1 (0,1,3) and via 2 (0,2,3) are both 200 m
  PathResult r = shortest_path(g, 0, 3);
  CHECK(r.distance == doctest::Approx(200.0));
  CHECK(r.path == std::vector<StopId>{0, 1, 3});
}

TEST_CASE("path distance equals sum of edge lengths") {
  StopNetwork g = grid_network(4, 6, 130);
  std::mt19937 rng(7);
  std::uniform_int_distribution<StopId> pick(0, g.size() - 1);
  for (int i = 0; i < 50; ++i) {
    StopId a = pick(rng), b = pick(rng);
    PathResult r = shortest_path(g, a, b);
    double sum = 0.0;
    for (size_t k = 1; k < r.path.size(); ++k) {
      double leg = -1.0;
      for (const auto& e : g.out(r.path[k - 1]))
        if (e.to == r.path[k]) leg = e.length;
      REQUIRE(leg > 0.0);
      sum += leg;
    }
    CHECK(r.distance == doctest::Approx(sum));
    CHECK(r.path.front() == a);
    CHECK(r.path.back() == b);
  }
}

TEST_CASE("triangle inequality on a grid with an express edge") {
  std::vector<std::tuple<StopId, StopId, double>> edges;
  StopNetwork base = grid_network(4, 4, 100);
  for (StopId s = 0; s < base.size(); ++s)
    for (const auto& e : base.out(s)) edges.emplace_back(s, e.to, e.length);
  edges.emplace_back(0, 15, 240.0);  // shortcut
  edges.emplace_back(15, 0, 240.0);
  StopNetwork net(std::vector<Coord>(base.positions()), edges);
  DistanceOracle oracle(net);
  for (StopId a = 0; a < net.size(); ++a)
    for (StopId b = 0; b < net.size(); ++b)
      for (StopId c = 0; c < net.size(); ++c)
        CHECK(oracle.distance(a, c) <=
              oracle.distance(a, b) + oracle.distance(b, c) + 1e-9);
}

TEST_CASE("travel_time") {
  CHECK(travel_time(0.0, 10.0) == 0.0);
  CHECK(travel_time(25300.0, kmh_to_mps(25.3)) == doctest::Approx(3600.0));
  CHECK(travel_time(4575.0, kmh_to_mps(18.3)) == doctest::Approx(900.0));
  CHECK_THROWS_AS(travel_time(100.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(travel_time(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("nearest_stop") {
  StopNetwork g = grid_network(2, 2, 100);
  SUBCASE("exact hit") {
    auto [s, d] = nearest_stop(g, g.position(3));
    CHECK(s == 3);
    CHECK(d == 0.0);
  }
  SUBCASE("tie goes to the smaller id") {
    // midpoint between stop 0 (0,0) and stop 1 (100,0)
    auto [s, d] = nearest_stop(g, {50, 0});
    CHECK(s == 0);
    CHECK(d == doctest::Approx(50.0));
  }
  SUBCASE("hand euclidean") {
    // stop (0,100) is id 2 in row-major order
    auto [s, d] = nearest_stop(g, {10, 90});
    CHECK(s == 2);
    CHECK(d == doctest::Approx(std::sqrt(200.0)));
  }
  SUBCASE("true argmin against exhaustive scan") {
    StopNetwork big = grid_network(13, 11, 37.5);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-50.0, 500.0);
    for (int i = 0; i < 200; ++i) {
      Coord p{coord(rng), coord(rng)};
      auto [s, d] = nearest_stop(big, p);
      for (StopId q = 0; q < big.size(); ++q) {
        double dq = euclidean(big.position(q), p);
        CHECK(d <= dq + 1e-12);
        if (q < s) CHECK(dq > d);  // ties break to the smaller id
      }
    }
  }
}

TEST_CASE("distance oracle equals direct search on all pairs") {
  StopNetwork g = grid_network(4, 4, 100);
  DistanceOracle oracle(g);
  for (StopId a = 0; a < g.size(); ++a)
    for (StopId b = 0; b < g.size(); ++b) {
      PathResult direct = shortest_path(g, a, b);
      CHECK(oracle.distance(a, b) == direct.distance);
      CHECK(oracle.path(a, b).path == direct.path);
    }
}

TEST_CASE("oracle is deterministic and warm/cold agree") {
  StopNetwork g = grid_network(7, 7, 90);
  DistanceOracle cold(g);
  DistanceOracle warm(g);
  warm.warm_all(4);
  std::mt19937 rng(11);
  std::uniform_int_distribution<StopId> pick(0, g.size() - 1);
  for (int i = 0; i < 100; ++i) {
    StopId a = pick(rng), b = pick(rng);
    double d1 = cold.distance(a, b);
    CHECK(d1 == cold.distance(a, b));
    CHECK(d1 == warm.distance(a, b));
  }
}

TEST_CASE("grid metric holds everywhere") {
  const int rows = 6, cols = 5;
  const double s = 175.0;
  StopNetwork g = grid_network(rows, cols, s);
  DistanceOracle oracle(g);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      for (int k = 0; k < rows; ++k)
        for (int l = 0; l < cols; ++l)
          CHECK(oracle.distance(i * cols + j, k * cols + l) ==
                doctest::Approx(s * (std::abs(i - k) + std::abs(j - l))));
}
