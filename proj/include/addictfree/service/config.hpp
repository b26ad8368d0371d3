#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "addictfree/predictor/training.hpp"

namespace addictfree::service {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path store_path = "addictfree.store";
  double prediction_threshold = 0.5;
  predictor::TrainConfig predictor;
  std::optional<std::filesystem::path> poi_csv_path;
  std::string log_level = "info";
  // Bearer token with access to every user and to operator endpoints.
  // Empty disables authentication.
  std::string operator_token;
  bool sync_writes = true;
};

inline constexpr const char* kConfigEnv = "ADDICTFREE_CONFIG";

/// Throws Error{InvalidArgument} on malformed documents or a threshold
/// outside (0, 1).
ServiceConfig parse_config(std::string_view json_text);
ServiceConfig load_config(const std::filesystem::path& path);

/// Reads the file named by ADDICTFREE_CONFIG, defaults when unset.
ServiceConfig config_from_env();

/// Splits "host:port"; throws Error{InvalidArgument}.
std::pair<std::string, int> split_address(const std::string& address);

}  // namespace addictfree::service
