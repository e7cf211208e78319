#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(RIDEPOOL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
#ifdef _WIN32
  return {status, ss.str()};
#else
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
#endif
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("ridepool_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t data_rows(const std::string& csv) {
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  return lines ? lines - 1 : 0;  // minus header
}

const char* kSynthConfig = R"({
  "network": {"grid": {"rows": 6, "cols": 6, "spacing_m": 150}},
  "demand": {"synthetic": {"rate_per_s": 0.02, "window": [0, 3600], "od_model": "uniform"}},
  "params": {"max_wait_s": 360, "max_delay_s": 460, "vehicle_speed_kmh": 25.3,
             "seat_capacity": 6, "fleet_size": 8},
  "seed": 7
})";

}  // namespace

TEST_CASE("cli simulate") {
  fs::path dir = fresh_dir("simulate");
  write_text(dir / "config.json", kSynthConfig);

  SUBCASE("valid config produces the full artifact set") {
    auto r = run_cli("simulate --config " + (dir / "config.json").string() + " --out " +
                         (dir / "out").string() + " --occupancy 0",
                     dir / "log.txt");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("summary.json") != std::string::npos);
    for (const char* f :
         {"summary.json", "requests.csv", "vehicles.csv", "segments.csv", "occupancy_0.csv",
          "metadata.json"})
      CHECK(fs::exists(dir / "out" / f));
    const std::string summary = slurp(dir / "out" / "summary.json");
    for (const char* key :
         {"serviced_share", "relative_travel_time", "relative_driven_distance",
          "empty_mileage_share", "avg_occupancy_incl", "avg_occupancy_excl", "empty_vehicles",
          "fleet_size", "fleet_km", "private_km", "seed", "config"})
      CHECK(summary.find(key) != std::string::npos);
    CHECK(data_rows(slurp(dir / "out" / "vehicles.csv")) == 8);
  }

  SUBCASE("missing trips file fails and names the path") {
    write_text(dir / "bad.json", R"({
      "network": {"grid": {"rows": 2, "cols": 2, "spacing_m": 100}},
      "demand": {"trips_file": "/nonexistent/trips.csv"}
    })");
    auto r = run_cli("simulate --config " + (dir / "bad.json").string() + " --out " +
                         (dir / "out2").string(),
                     dir / "log2.txt");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("/nonexistent/trips.csv") != std::string::npos);
  }

  SUBCASE("ambiguous network spec is rejected") {
    write_text(dir / "ambig.json", R"({
      "network": {"grid": {"rows": 2, "cols": 2, "spacing_m": 100},
                  "stops_file": "s.csv", "edges_file": "e.csv"},
      "demand": {"synthetic": {"rate_per_s": 0.01, "window": [0, 60]}}
    })");
    auto r = run_cli("simulate --config " + (dir / "ambig.json").string() + " --out " +
                         (dir / "out3").string(),
                     dir / "log3.txt");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("network") != std::string::npos);
  }

  SUBCASE("same config and seed give byte-identical artifacts") {
    const std::string cfg = (dir / "config.json").string();
    auto a = run_cli("simulate --config " + cfg + " --out " + (dir / "a").string(),
                     dir / "loga.txt");
    auto b = run_cli("simulate --config " + cfg + " --out " + (dir / "b").string(),
                     dir / "logb.txt");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    // metadata.json holds the volatile bits (timestamps) and is excluded
    for (const char* f : {"summary.json", "requests.csv", "vehicles.csv", "segments.csv"})
      CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }

  SUBCASE("--seed overrides the config seed") {
    const std::string cfg = (dir / "config.json").string();
    auto a = run_cli("simulate --config " + cfg + " --seed 99 --out " + (dir / "s99").string(),
                     dir / "logs.txt");
    REQUIRE(a.exit_code == 0);
    CHECK(slurp(dir / "s99" / "summary.json").find("\"seed\": 99") != std::string::npos);
  }
}

TEST_CASE("cli sweep and min-fleet") {
  fs::path dir = fresh_dir("sweep");
  write_text(dir / "config.json", kSynthConfig);
  const std::string cfg = (dir / "config.json").string();

  SUBCASE("sweep emits one row per size x replicate") {
    auto r = run_cli("sweep --config " + cfg + " --sizes 4,8,12 --replicates 2 --jobs 2 --out " +
                         (dir / "sw").string(),
                     dir / "log.txt");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "sw" / "sweep.csv");
    CHECK(csv.rfind("fleet_size,serviced_share,rel_time,rel_distance,empty_share,"
                    "occupancy_incl,occupancy_excl,empty_vehicles,seed\n",
                    0) == 0);
    CHECK(data_rows(csv) == 6);
  }

  SUBCASE("min-fleet finds a serving size") {
    auto r = run_cli("min-fleet --config " + cfg + " --bounds 1:64 --out " +
                         (dir / "mf").string(),
                     dir / "log2.txt");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("minimal fleet size:") != std::string::npos);
    const std::string j = slurp(dir / "mf" / "minfleet.json");
    CHECK(j.find("\"found\": true") != std::string::npos);
    CHECK(fs::exists(dir / "mf" / "minfleet_sweep.csv"));
  }

  SUBCASE("min-fleet reports not-found when the bounds are too tight") {
    // one vehicle cannot serve ~70 overlapping requests
    auto r = run_cli("min-fleet --config " + cfg + " --bounds 1:1 --out " +
                         (dir / "nf").string(),
                     dir / "log3.txt");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("not found") != std::string::npos);
    const std::string j = slurp(dir / "nf" / "minfleet.json");
    CHECK(j.find("\"found\": false") != std::string::npos);
    CHECK(j.find("\"min_fleet\": -1") != std::string::npos);
  }
}

TEST_CASE("cli cost") {
  fs::path dir = fresh_dir("cost");

  SUBCASE("reference scenario figures") {
    auto r = run_cli("cost --fleet-size 4688 --fleet-km 54000 --private-km 138500 --out " +
                         (dir / "c").string(),
                     dir / "log.txt");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("84384.00") != std::string::npos);       // wages
    CHECK(r.output.find("5281.20") != std::string::npos);        // energy
    CHECK(r.output.find("18866.47") != std::string::npos);       // private fuel
    CHECK(r.output.find("200130720.00") != std::string::npos);   // pooling procurement
    CHECK(r.output.find("752000000.00") != std::string::npos);   // private procurement
    CHECK(r.output.find("440.29") != std::string::npos);         // per customer
    const std::string j = slurp(dir / "c" / "cost.json");
    CHECK(j.find("fare_per_trip") != std::string::npos);
    CHECK(j.find("\"fleet_size\": 4688") != std::string::npos);
  }

  SUBCASE("reads fleet figures from a summary.json") {
    fs::path sim = fresh_dir("cost_sim");
    write_text(sim / "config.json", kSynthConfig);
    auto s = run_cli("simulate --config " + (sim / "config.json").string() + " --out " +
                         (sim / "out").string(),
                     sim / "log.txt");
    REQUIRE(s.exit_code == 0);
    auto r = run_cli("cost --summary " + (sim / "out" / "summary.json").string(),
                     dir / "log2.txt");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ride-pooling") != std::string::npos);
  }

  SUBCASE("missing inputs fail") {
    auto r = run_cli("cost --fleet-size 10", dir / "log3.txt");
    CHECK(r.exit_code != 0);
  }
}

TEST_CASE("cli analyze") {
  fs::path dir = fresh_dir("analyze");
  write_text(dir / "config.json", kSynthConfig);
  const std::string cfg = (dir / "config.json").string();
  auto s = run_cli("simulate --config " + cfg + " --out " + (dir / "out").string(),
                   dir / "log.txt");
  REQUIRE(s.exit_code == 0);
  auto r = run_cli("analyze --config " + cfg + " --results " + (dir / "out").string() +
                       " --out " + (dir / "an").string(),
                   dir / "log2.txt");
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir / "an" / "mismatch.csv");
  std::stringstream ss(csv);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == "stop_id,x,y,category");
  while (std::getline(ss, line)) {
    const auto last = line.rfind(',');
    const std::string cat = line.substr(last + 1);
    const bool known = cat == "unused_vehicle" || cat == "rejected_origin" ||
                       cat == "origin_free" || cat == "overlap";
    CHECK(known);
  }
}
