#include "addictfree/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "addictfree/codec/codec.hpp"
#include "addictfree/core/error.hpp"

namespace addictfree::service {

ServiceConfig parse_config(std::string_view json_text) {
  const Json j = parse_json(json_text);
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be an object");
  ServiceConfig c;
  try {
    c.listen_address = j.value("listen_address", c.listen_address);
    c.store_path = j.value("store_path", c.store_path.string());
    c.prediction_threshold = j.value("prediction_threshold", c.prediction_threshold);
    if (j.contains("predictor")) c.predictor = j.at("predictor").get<predictor::TrainConfig>();
    if (j.contains("poi_csv_path") && !j.at("poi_csv_path").is_null()) {
      c.poi_csv_path = j.at("poi_csv_path").get<std::string>();
    }
    c.log_level = j.value("log_level", c.log_level);
    c.operator_token = j.value("operator_token", c.operator_token);
    c.sync_writes = j.value("sync_writes", c.sync_writes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  if (!(c.prediction_threshold > 0.0 && c.prediction_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "prediction_threshold must be in (0, 1)");
  }
  split_address(c.listen_address);
  return c;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ServiceConfig config_from_env() {
  const char* path = std::getenv(kConfigEnv);
  if (!path || !*path) return {};
  return load_config(path);
}

std::pair<std::string, int> split_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw Error(ErrorCode::InvalidArgument, "listen_address must be host:port");
  }
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) port = -1;
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::InvalidArgument, "bad port in " + address);
  return {address.substr(0, colon), port};
}

}  // namespace addictfree::service
