#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "addictfree/codec/codec.hpp"
#include "addictfree/core/error.hpp"
#include "addictfree/service/service.hpp"
#include "addictfree/sim/simulator.hpp"

namespace {

using namespace addictfree;

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

service::ServiceConfig load(const std::string& path) {
  auto cfg = path.empty() ? service::config_from_env() : service::load_config(path);
  spdlog::set_level(spdlog::level::from_str(cfg.log_level));
  return cfg;
}

int serve(const service::ServiceConfig& cfg) {
  store::Store db(cfg.store_path, {cfg.sync_writes});
  service::SystemClock clock;
  service::Service svc(cfg, db, clock);
  const auto [host, port] = service::split_address(cfg.listen_address);
  service::HttpServer server(svc, host, port);
  server.start();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds{200});
  spdlog::info("shutting down");
  server.stop();
  return 0;
}

int simulate(const std::string& scenario_path, const std::string& out_path) {
  const auto scenario = decode<sim::Scenario>(parse_json(slurp(scenario_path)));
  sim::validate_scenario(scenario);
  const auto data = sim::generate(scenario);
  Json doc{{"events", data.events}, {"fixes", data.fixes}, {"feedback", data.feedback}};
  const geo::FenceSet fences(scenario.fences, scenario.transitions);
  Json fence_events = Json::array();
  for (const auto& u : scenario.users) {
    std::vector<LocationFix> fixes;
    for (const auto& f : data.fixes) {
      if (f.user_id == u.user_id) fixes.push_back(f);
    }
    for (const auto& e : geo::replay(u.user_id, fences, fixes)) fence_events.push_back(e);
  }
  doc["fence_events"] = fence_events;
  if (out_path.empty()) {
    std::cout << doc.dump() << "\n";
  } else {
    std::ofstream(out_path) << doc.dump() << "\n";
  }
  std::cerr << data.events.size() << " events, " << data.fixes.size() << " fixes, "
            << data.feedback.size() << " feedback, " << fence_events.size() << " fence events\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"addictfree relapse-intervention service"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "config file (default: $ADDICTFREE_CONFIG)");

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");

  std::string csv;
  auto* pois_cmd = app.add_subcommand("import-pois", "load points of interest from CSV");
  pois_cmd->add_option("csv", csv, "poi_id,name,lat,lon,theme,open")->required();

  std::string scenario;
  std::string out;
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic data from a scenario");
  sim_cmd->add_option("scenario-file", scenario)->required();
  sim_cmd->add_option("-o,--out", out, "write JSON here instead of stdout");

  std::string user;
  auto* train_cmd = app.add_subcommand("train-user", "train and store a user's model");
  train_cmd->add_option("id", user)->required();

  std::string month;
  auto* export_cmd = app.add_subcommand("export-month", "print a monthly summary as CSV");
  export_cmd->add_option("id", user)->required();
  export_cmd->add_option("month", month, "YYYY-MM")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim_cmd) return simulate(scenario, out);
    const auto cfg = load(config_path);
    if (*serve_cmd) return serve(cfg);

    store::Store db(cfg.store_path, {cfg.sync_writes});
    service::SystemClock clock;
    service::Service svc(cfg, db, clock);
    if (*pois_cmd) {
      const auto pois = diversion::parse_poi_csv(slurp(csv));
      svc.import_pois(pois);
      std::cout << "imported " << pois.size() << " points of interest\n";
    } else if (*train_cmd) {
      const auto p = svc.train_user(user, clock.now());
      std::cout << "trained " << user << ": " << p.parameter_count() << " parameters\n";
    } else if (*export_cmd) {
      const auto profile = svc.find_user(user);
      if (!profile) throw Error(ErrorCode::UnknownUser, user);
      std::cout << stats::monthly_csv(stats::monthly_series(svc.events_for(user), parse_month(month),
                                                            profile->utc_offset_minutes));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
