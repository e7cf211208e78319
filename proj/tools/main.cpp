// ridepool: deterministic ride-pooling fleet simulator CLI.
//
// Subcommands: simulate, sweep, min-fleet, ingest, synth, cost, analyze.
// Every run is reproducible from its config file plus seed; the effective
// config is echoed into the JSON artifacts, and volatile data (timestamps,
// host) goes to metadata.json so byte-level determinism checks can skip it.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ridepool/io.hpp"
#include "ridepool/presets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ridepool;

namespace {

struct RunConfig {
  json raw;  // normalized config, echoed into artifacts
  std::unique_ptr<StopNetwork> net;
  ServiceParams params;
  Placement placement = UniformPlacement{};
  WalkMode walk_mode = WalkBySpeed{};
  BaselineMode baseline_mode = BaselineMode::ShortestPath;
  uint64_t seed = 0;
  // demand source (exactly one)
  std::optional<std::string> trips_file;
  TimeWindow window{0.0, 86400.0};
  std::optional<double> synth_rate;
  OdModel od_model = UniformOd{};
};

void require_file(const std::string& path, const std::string& field) {
  if (!fs::exists(path))
    throw std::runtime_error("config field '" + field + "': file not found: " + path);
}

RunConfig load_config(const std::string& path, std::optional<uint64_t> seed_override,
                      std::optional<int> fleet_override) {
  require_file(path, "--config");
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }

  RunConfig cfg;
  if (j.contains("preset")) {
    Preset p = preset(j["preset"].get<std::string>());
    cfg.params = p.params;
    cfg.walk_mode = p.walk_mode;
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    if (p.contains("max_wait_s")) cfg.params.max_wait = p["max_wait_s"].get<double>();
    if (p.contains("max_delay_s")) cfg.params.max_delay = p["max_delay_s"].get<double>();
    if (p.contains("vehicle_speed_kmh"))
      cfg.params.vehicle_speed = kmh_to_mps(p["vehicle_speed_kmh"].get<double>());
    if (p.contains("seat_capacity")) cfg.params.seat_capacity = p["seat_capacity"].get<int>();
    if (p.contains("dwell_time_s")) cfg.params.dwell_time = p["dwell_time_s"].get<double>();
    if (p.contains("fleet_size")) cfg.params.fleet_size = p["fleet_size"].get<int>();
    if (p.contains("delay_anchor")) {
      const auto anchor = p["delay_anchor"].get<std::string>();
      if (anchor == "promised_pickup")
        cfg.params.delay_anchor = DelayAnchor::PromisedPickup;
      else if (anchor == "request_time")
        cfg.params.delay_anchor = DelayAnchor::RequestTime;
      else
        throw std::runtime_error("config field 'params.delay_anchor': unknown value " + anchor);
    }
  }
  if (fleet_override) cfg.params.fleet_size = *fleet_override;
  cfg.params.validate();

  if (!j.contains("network"))
    throw std::runtime_error("config field 'network' is required");
  const json& net = j["network"];
  if (net.contains("grid") == net.contains("stops_file"))
    throw std::runtime_error("config field 'network': exactly one of grid or stops_file/edges_file");
  if (net.contains("grid")) {
    const json& g = net["grid"];
    cfg.net = std::make_unique<StopNetwork>(grid_network(
        g.at("rows").get<int>(), g.at("cols").get<int>(), g.at("spacing_m").get<double>()));
  } else {
    const auto stops = net.at("stops_file").get<std::string>();
    const auto edges = net.at("edges_file").get<std::string>();
    require_file(stops, "network.stops_file");
    require_file(edges, "network.edges_file");
    cfg.net = std::make_unique<StopNetwork>(load_network(stops, edges));
  }

  if (!j.contains("demand")) throw std::runtime_error("config field 'demand' is required");
  const json& dem = j["demand"];
  if (dem.contains("trips_file") == dem.contains("synthetic"))
    throw std::runtime_error("config field 'demand': exactly one of trips_file or synthetic");
  if (j.contains("window")) {
    cfg.window = {j["window"].at(0).get<double>(), j["window"].at(1).get<double>()};
  }
  if (dem.contains("trips_file")) {
    cfg.trips_file = dem["trips_file"].get<std::string>();
    require_file(*cfg.trips_file, "demand.trips_file");
  } else {
    const json& s = dem["synthetic"];
    cfg.synth_rate = s.at("rate_per_s").get<double>();
    if (s.contains("window"))
      cfg.window = {s["window"].at(0).get<double>(), s["window"].at(1).get<double>()};
    if (s.contains("od_model")) {
      const json& od = s["od_model"];
      if (od.is_string() && od.get<std::string>() == "uniform") {
        cfg.od_model = UniformOd{};
      } else if (od.is_object() && od.contains("hotspot")) {
        cfg.od_model = HotspotOd{od["hotspot"].at("centers").get<int>(),
                                 od["hotspot"].at("concentration_m").get<double>()};
      } else {
        throw std::runtime_error("config field 'demand.synthetic.od_model': unknown model");
      }
    }
  }

  if (j.contains("baseline_mode")) {
    const auto mode = j["baseline_mode"].get<std::string>();
    if (mode == "recorded")
      cfg.baseline_mode = BaselineMode::Recorded;
    else if (mode == "shortest_path")
      cfg.baseline_mode = BaselineMode::ShortestPath;
    else
      throw std::runtime_error("config field 'baseline_mode': unknown value " + mode);
  }
  if (j.contains("placement")) {
    const auto p = j["placement"].get<std::string>();
    if (p == "uniform")
      cfg.placement = UniformPlacement{};
    else if (p == "demand_weighted")
      cfg.placement = DemandWeightedPlacement{};  // demand wired in later
    else
      throw std::runtime_error("config field 'placement': unknown value " + p);
  }
  if (j.contains("walk_mode")) {
    const json& w = j["walk_mode"];
    if (w.contains("speed_kmh"))
      cfg.walk_mode = WalkBySpeed{kmh_to_mps(w["speed_kmh"].get<double>())};
    else if (w.contains("fixed_per_leg_s"))
      cfg.walk_mode = WalkFixedPerLeg{w["fixed_per_leg_s"].get<double>()};
    else
      throw std::runtime_error("config field 'walk_mode': need speed_kmh or fixed_per_leg_s");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  if (seed_override) cfg.seed = *seed_override;

  cfg.raw = j;
  cfg.raw["seed"] = cfg.seed;
  cfg.raw["effective_fleet_size"] = cfg.params.fleet_size;
  return cfg;
}

RequestSet build_demand(const RunConfig& cfg, const DistanceOracle& oracle,
                        IngestStats* stats_out = nullptr) {
  if (cfg.trips_file) {
    auto [set, stats] = ingest_trips(*cfg.trips_file, oracle, cfg.window, cfg.baseline_mode,
                                     cfg.params.vehicle_speed);
    if (stats_out) *stats_out = stats;
    return std::move(set);
  }
  return synth_requests(oracle, *cfg.synth_rate, cfg.window, cfg.od_model, cfg.seed,
                        cfg.params.vehicle_speed);
}

Placement resolve_placement(const RunConfig& cfg, const RequestSet& requests) {
  if (std::holds_alternative<DemandWeightedPlacement>(cfg.placement))
    return DemandWeightedPlacement{&requests};
  return UniformPlacement{};
}

void write_metadata(const fs::path& dir) {
  const auto now = std::chrono::system_clock::now();
  io::write_json(dir / "metadata.json",
                 json{{"written_unix_s",
                       std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
                           .count()},
                      {"threads_available", std::thread::hardware_concurrency()}});
}

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

double fleet_km_of(const SimulationResult& result) {
  double m = 0.0;
  for (const auto& v : result.vehicles) m += v.odometer_total;
  return m / 1000.0;
}

double baseline_km_of(const RequestSet& requests) {
  double m = 0.0;
  for (const auto& r : requests.requests) m += r.baseline_distance;
  return m / 1000.0;
}

json summary_json(const RunConfig& cfg, const RequestSet& requests,
                  const SimulationResult& result, const Characteristics& c) {
  json j = io::to_json(c);
  j["fleet_size"] = cfg.params.fleet_size;
  j["fleet_km"] = fleet_km_of(result);
  j["private_km"] = baseline_km_of(requests);
  j["n_requests"] = requests.requests.size();
  j["seed"] = cfg.seed;
  j["config"] = cfg.raw;
  return j;
}

std::vector<int> parse_sizes(const std::string& csv_sizes) {
  std::vector<int> sizes;
  std::stringstream ss(csv_sizes);
  std::string tok;
  while (std::getline(ss, tok, ',')) sizes.push_back(std::stoi(tok));
  if (sizes.empty()) throw std::runtime_error("--sizes must list at least one fleet size");
  return sizes;
}

int cmd_simulate(const std::string& config_path, std::optional<uint64_t> seed,
                 std::optional<int> fleet, const std::string& out,
                 const std::vector<int>& occupancy_ids) {
  RunConfig cfg = load_config(config_path, seed, fleet);
  DistanceOracle oracle(*cfg.net);
  IngestStats stats;
  RequestSet requests = build_demand(cfg, oracle, &stats);
  SimulationResult result =
      simulate(oracle, requests, cfg.params, resolve_placement(cfg, requests), cfg.seed);
  if (auto err = validate_result(result, requests, cfg.params); !err.empty())
    throw std::logic_error("invariant violated: " + err);
  Characteristics c = characteristics(result, requests, cfg.walk_mode);

  const fs::path dir = prepare_out(out);
  io::write_json(dir / "summary.json", summary_json(cfg, requests, result, c));
  io::write_requests_csv(dir / "requests.csv", requests, &result);
  io::write_vehicles_csv(dir / "vehicles.csv", result);
  io::write_segments_csv(dir / "segments.csv", result);
  if (cfg.trips_file) io::write_json(dir / "ingest_stats.json", io::to_json(stats));
  for (int id : occupancy_ids)
    io::write_occupancy_csv(dir / ("occupancy_" + std::to_string(id) + ".csv"),
                            occupancy_series(result, id));
  write_metadata(dir);
  std::cout << "served " << c.serviced_share * 100.0 << "% of " << requests.requests.size()
            << " requests; summary: " << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<uint64_t> seed,
              const std::string& sizes_csv, int replicates, int jobs, const std::string& out) {
  RunConfig cfg = load_config(config_path, seed, std::nullopt);
  DistanceOracle oracle(*cfg.net);
  RequestSet requests = build_demand(cfg, oracle);
  SweepSpec spec{parse_sizes(sizes_csv), replicates, cfg.seed};
  auto points = run_sweep(oracle, requests, cfg.params, resolve_placement(cfg, requests),
                          cfg.walk_mode, spec, jobs);
  const fs::path dir = prepare_out(out);
  io::write_sweep_csv(dir / "sweep.csv", points);
  io::write_json(dir / "sweep.json",
                 json{{"config", cfg.raw},
                      {"sizes", spec.fleet_sizes},
                      {"replicates", replicates},
                      {"points", points.size()}});
  write_metadata(dir);
  std::cout << points.size() << " sweep points written to " << (dir / "sweep.csv").string()
            << "\n";
  return 0;
}

int cmd_min_fleet(const std::string& config_path, std::optional<uint64_t> seed,
                  const std::string& bounds_str, int resolution, const std::string& out) {
  RunConfig cfg = load_config(config_path, seed, std::nullopt);
  const auto colon = bounds_str.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("--bounds must look like lo:hi");
  const std::pair<int, int> bounds{std::stoi(bounds_str.substr(0, colon)),
                                   std::stoi(bounds_str.substr(colon + 1))};
  DistanceOracle oracle(*cfg.net);
  RequestSet requests = build_demand(cfg, oracle);
  auto res = min_fleet_search(oracle, requests, cfg.params, resolve_placement(cfg, requests),
                              cfg.walk_mode, cfg.seed, bounds, resolution);
  const fs::path dir = prepare_out(out);
  io::write_sweep_csv(dir / "minfleet_sweep.csv", res.evidence);
  io::write_json(dir / "minfleet.json", json{{"found", res.found},
                                             {"min_fleet", res.found ? res.min_fleet : -1},
                                             {"bounds", {bounds.first, bounds.second}},
                                             {"resolution", resolution},
                                             {"config", cfg.raw}});
  write_metadata(dir);
  if (res.found)
    std::cout << "minimal fleet size: " << res.min_fleet << "\n";
  else
    std::cout << "not found: no fleet size <= " << bounds.second << " serves all requests\n";
  return 0;
}

int cmd_ingest(const std::string& config_path, const std::string& out) {
  RunConfig cfg = load_config(config_path, std::nullopt, std::nullopt);
  if (!cfg.trips_file) throw std::runtime_error("ingest needs demand.trips_file in the config");
  DistanceOracle oracle(*cfg.net);
  IngestStats stats;
  RequestSet requests = build_demand(cfg, oracle, &stats);
  const fs::path dir = prepare_out(out);
  io::write_requests_csv(dir / "requests.csv", requests);
  json stats_json = io::to_json(stats);
  stats_json["config"] = cfg.raw;
  io::write_json(dir / "ingest_stats.json", stats_json);
  write_metadata(dir);
  std::cout << "kept " << stats.kept << " of " << stats.parsed << " trips ("
            << stats.dropped_same_stop << " same-stop, " << stats.dropped_outside_window
            << " outside window)\n";
  return 0;
}

int cmd_synth(const std::string& config_path, std::optional<uint64_t> seed,
              const std::string& out) {
  RunConfig cfg = load_config(config_path, seed, std::nullopt);
  if (!cfg.synth_rate) throw std::runtime_error("synth needs demand.synthetic in the config");
  DistanceOracle oracle(*cfg.net);
  RequestSet requests = build_demand(cfg, oracle);
  const fs::path dir = prepare_out(out);
  io::write_requests_csv(dir / "requests.csv", requests);
  io::write_json(dir / "synth.json",
                 json{{"config", cfg.raw}, {"n_requests", requests.requests.size()}});
  write_metadata(dir);
  std::cout << requests.requests.size() << " synthetic requests written\n";
  return 0;
}

void print_cost_table(const CostReport& r, const CostParams& p) {
  auto line = [](const std::string& label, double pooling, double priv) {
    std::printf("%-28s %16.2f %16.2f\n", label.c_str(), pooling, priv);
  };
  std::printf("%-28s %16s %16s\n", "", "ride-pooling", "private car");
  line("operating total [EUR]", r.pooling_operating_total, r.private_fuel_total);
  line("  wages [EUR]", r.wages, 0.0);
  line("  energy / fuel [EUR]", r.energy, r.private_fuel_total);
  line("cost per trip [EUR]", r.fare_per_trip, r.private_cost_per_trip);
  line("cost per year [EUR]", r.fare_per_year, r.private_cost_per_year);
  line("procurement total [EUR]", r.pooling_procurement_total, r.private_procurement_total);
  line("  peak-hour share [EUR]", r.pooling_procurement_peak_share, r.private_procurement_total);
  line("  per customer [EUR]", r.pooling_procurement_per_customer, p.private_vehicle_price);
}

int cmd_cost(const std::string& summary_path, int fleet_size, double fleet_km, double private_km,
             CostParams params, const std::string& out) {
  if (!summary_path.empty()) {
    require_file(summary_path, "--summary");
    std::ifstream in(summary_path);
    json j = json::parse(in);
    fleet_size = j.at("fleet_size").get<int>();
    fleet_km = j.at("fleet_km").get<double>();
    private_km = j.at("private_km").get<double>();
  }
  if (fleet_size <= 0 || fleet_km < 0.0 || private_km < 0.0)
    throw std::runtime_error("cost needs --summary or --fleet-size/--fleet-km/--private-km");
  CostReport report = cost_report(fleet_size, fleet_km, private_km, params);
  print_cost_table(report, params);
  if (!out.empty()) {
    const fs::path dir = prepare_out(out);
    json j = io::to_json(report);
    j["inputs"] = json{{"fleet_size", fleet_size},
                       {"fleet_km", fleet_km},
                       {"private_km", private_km}};
    io::write_json(dir / "cost.json", j);
    write_metadata(dir);
  }
  return 0;
}

int cmd_analyze(const std::string& config_path, const std::string& results_dir,
                const std::string& out) {
  RunConfig cfg = load_config(config_path, std::nullopt, std::nullopt);
  const fs::path dir(results_dir);
  const std::string req_file = (dir / "requests.csv").string();
  const std::string veh_file = (dir / "vehicles.csv").string();
  require_file(req_file, "--results requests.csv");
  require_file(veh_file, "--results vehicles.csv");

  // rebuild the slices of RequestSet / SimulationResult the analysis needs
  RequestSet requests;
  SimulationResult result;
  csv::read_file(
      req_file,
      {"request_id", "origin_stop", "dest_stop", "request_time_s", "direct_distance_m",
       "direct_time_s", "baseline_distance_m", "baseline_time_s", "walk_in_m", "walk_out_m",
       "outcome", "vehicle_id", "pickup_time_s", "dropoff_time_s"},
      [&](size_t row, const std::vector<std::string>& cells) {
        Request r;
        r.request_id = static_cast<int>(csv::to_int(cells[0], req_file, row));
        r.origin_stop = static_cast<StopId>(csv::to_int(cells[1], req_file, row));
        r.dest_stop = static_cast<StopId>(csv::to_int(cells[2], req_file, row));
        r.request_time = csv::to_double(cells[3], req_file, row);
        requests.requests.push_back(r);
        RequestOutcome o;
        o.served = cells[10] == "served";
        result.outcomes.push_back(o);
      });
  csv::read_file(veh_file,
                 {"vehicle_id", "start_stop", "final_stop", "odometer_total_m",
                  "odometer_empty_m", "ever_used"},
                 [&](size_t row, const std::vector<std::string>& cells) {
                   VehicleTrace v;
                   v.vehicle_id = static_cast<int>(csv::to_int(cells[0], veh_file, row));
                   v.start_stop = static_cast<StopId>(csv::to_int(cells[1], veh_file, row));
                   v.final_stop = static_cast<StopId>(csv::to_int(cells[2], veh_file, row));
                   v.ever_used = csv::to_int(cells[5], veh_file, row) != 0;
                   result.vehicles.push_back(v);
                 });
  MismatchReport report = mismatch_analysis(result, requests, *cfg.net);
  const fs::path out_dir = prepare_out(out);
  io::write_mismatch_csv(out_dir / "mismatch.csv", report, *cfg.net);
  write_metadata(out_dir);
  std::cout << report.unused_vehicle_stops.size() << " unused-vehicle stops, "
            << report.rejected_origins.size() << " rejected-origin stops, "
            << report.origin_free_stops.size() << " origin-free stops\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic ride-pooling fleet simulator"};
  app.require_subcommand(1);

  std::string config, out = "out", sizes, bounds = "1:1024", summary_path, results_dir;
  std::optional<uint64_t> seed;
  std::optional<int> fleet;
  int replicates = 1, resolution = 1;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<int> occupancy_ids;
  int cost_fleet_size = 0;
  double cost_fleet_km = -1.0, cost_private_km = -1.0;
  CostParams cost_params;

  auto add_common = [&](CLI::App* cmd, bool with_config = true) {
    if (with_config) cmd->add_option("--config", config, "JSON config file")->required();
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--out", out, "output directory");
  };

  auto* sim = app.add_subcommand("simulate", "run one simulation");
  add_common(sim);
  sim->add_option("--fleet", fleet, "override fleet size");
  sim->add_option("--occupancy", occupancy_ids, "vehicle ids to emit occupancy series for");

  auto* sweep = app.add_subcommand("sweep", "run a fleet-size sweep");
  add_common(sweep);
  sweep->add_option("--sizes", sizes, "comma-separated fleet sizes")->required();
  sweep->add_option("--replicates", replicates, "replicates per size");
  sweep->add_option("--jobs", jobs, "parallel workers");

  auto* minf = app.add_subcommand("min-fleet", "search the minimal all-serving fleet size");
  add_common(minf);
  minf->add_option("--bounds", bounds, "search bounds lo:hi");
  minf->add_option("--resolution", resolution, "granularity of the answer");

  auto* ingest = app.add_subcommand("ingest", "map a trips file onto the stop network");
  add_common(ingest);

  auto* synth = app.add_subcommand("synth", "generate synthetic demand");
  add_common(synth);

  auto* cost = app.add_subcommand("cost", "pooling-vs-private cost comparison");
  cost->add_option("--summary", summary_path, "summary.json from a simulate run");
  cost->add_option("--fleet-size", cost_fleet_size, "number of vehicles (and drivers)");
  cost->add_option("--fleet-km", cost_fleet_km, "fleet distance in the window [km]");
  cost->add_option("--private-km", cost_private_km, "private-car baseline distance [km]");
  cost->add_option("--wage", cost_params.hourly_wage, "driver wage [EUR/h]");
  cost->add_option("--energy-use", cost_params.energy_use, "fleet energy use [kWh/100km]");
  cost->add_option("--energy-price", cost_params.energy_price, "[EUR/kWh]");
  cost->add_option("--fuel-use", cost_params.fuel_use, "private fuel use [L/100km]");
  cost->add_option("--fuel-price", cost_params.fuel_price, "[EUR/L]");
  cost->add_option("--pooling-vehicle-price", cost_params.pooling_vehicle_price, "[EUR]");
  cost->add_option("--private-vehicle-price", cost_params.private_vehicle_price, "[EUR]");
  cost->add_option("--working-days", cost_params.working_days, "per year");
  cost->add_option("--peak-share", cost_params.peak_share, "share of daily trips in the window");
  cost->add_option("--travelers", cost_params.n_travelers, "number of travelers");
  cost->add_option("--out", out, "output directory (optional)");
  out = "";  // cost only writes when asked

  auto* analyze = app.add_subcommand("analyze", "spatial unused-vehicle / rejected-origin report");
  add_common(analyze);
  analyze->add_option("--results", results_dir, "directory of a simulate run")->required();

  CLI11_PARSE(app, argc, argv);
  if (!cost->parsed() && out.empty()) out = "out";

  try {
    if (sim->parsed()) return cmd_simulate(config, seed, fleet, out, occupancy_ids);
    if (sweep->parsed()) return cmd_sweep(config, seed, sizes, replicates, jobs, out);
    if (minf->parsed()) return cmd_min_fleet(config, seed, bounds, resolution, out);
    if (ingest->parsed()) return cmd_ingest(config, out);
    if (synth->parsed()) return cmd_synth(config, seed, out);
    if (cost->parsed())
      return cmd_cost(summary_path, cost_fleet_size, cost_fleet_km, cost_private_km, cost_params,
                      out);
    if (analyze->parsed()) return cmd_analyze(config, results_dir, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
