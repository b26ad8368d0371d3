#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "addictfree/core/time.hpp"

namespace addictfree::store {

enum class Namespace : std::uint8_t {
  Users = 0,
  Events = 1,
  Fixes = 2,
  Fences = 3,
  Feedback = 4,
  Posts = 5,
  Notifications = 6,
  Models = 7,
  Pois = 8,
};

inline constexpr int kNamespaceCount = 9;

std::string_view to_string(Namespace ns);

struct Versioned {
  std::string value;
  std::uint64_t version = 0;
};

struct Record {
  Namespace ns = Namespace::Users;
  std::string key;
  std::string value;
  std::uint64_t version = 0;
};

/// Half-open [from, to).
struct TimeRange {
  Timestamp from{};
  Timestamp to{};
};

/// "<owner>/<12-digit epoch seconds>/<id>", so a prefix scan on "<owner>/"
/// is also time ordered. Throws Error{InvalidArgument} before 1970.
std::string time_key(std::string_view owner, Timestamp at, std::string_view id);

/// Epoch seconds from the second segment of a time_key, if it has one.
std::optional<Timestamp> time_of_key(std::string_view key);

struct StoreOptions {
  bool sync = true;  // fdatasync after every append
};

/// Thrown by the crash-injection hook after a partial write.
struct SimulatedCrash : std::runtime_error {
  SimulatedCrash() : std::runtime_error("simulated crash") {}
};

/// Append-only log replayed into memory on open. Without a path the store
/// is memory-only.
class Store {
 public:
  Store();
  explicit Store(std::filesystem::path path, StoreOptions options = {});
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Returns the new version (1 for a fresh key). With `expected_version`,
  /// throws Error{VersionConflict} unless it equals the current version
  /// (0 meaning "absent").
  std::uint64_t put(Namespace ns, std::string_view key, std::string_view value,
                    std::optional<std::uint64_t> expected_version = std::nullopt);

  std::optional<Versioned> get(Namespace ns, std::string_view key) const;

  /// Key-ordered records whose key starts with `prefix`; with `range`, only
  /// time_key records inside it.
  std::vector<Record> scan(Namespace ns, std::string_view prefix,
                           std::optional<TimeRange> range = std::nullopt) const;

  std::size_t size(Namespace ns) const;

  /// Rewrites the log with only the latest version of each key.
  void compact();

  /// The next append writes only `bytes` bytes of its record and then throws
  /// SimulatedCrash; the store refuses further use afterwards.
  void inject_crash_after(std::size_t bytes);

  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void replay();
  void append(const std::string& frame);
  void check_alive() const;

  std::optional<std::filesystem::path> path_;
  StoreOptions options_;
  int fd_ = -1;
  bool dead_ = false;
  std::optional<std::size_t> crash_after_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Versioned, std::less<>> data_[kNamespaceCount];
};

}  // namespace addictfree::store
