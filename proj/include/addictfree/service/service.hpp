#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "addictfree/community/community.hpp"
#include "addictfree/diversion/diversion.hpp"
#include "addictfree/diversion/notification_queue.hpp"
#include "addictfree/geo/fence_machine.hpp"
#include "addictfree/predictor/lstm.hpp"
#include "addictfree/service/clock.hpp"
#include "addictfree/service/config.hpp"
#include "addictfree/stats/stats.hpp"
#include "addictfree/store/store.hpp"

namespace addictfree::service {

inline constexpr const char* kServiceName = "addictfree";
inline constexpr const char* kServiceVersion = "0.1.0";
inline constexpr int kDefaultHorizon = 24;
inline constexpr int kRetrainLocalHour = 3;

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string bearer;  // token from "Authorization: Bearer ..."
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Outcome of one fix: fence events it produced and notifications queued.
struct FixOutcome {
  std::vector<geo::FenceEvent> events;
  std::vector<diversion::Notification> notifications;
};

struct TickReport {
  int users = 0;
  int trained = 0;
  int predicted = 0;
  int scheduled = 0;
  int failures = 0;
};

/// Application layer behind the HTTP routes. Every mutation is written to
/// the store (synced) before the call returns.
class Service {
 public:
  Service(ServiceConfig config, store::Store& store, const Clock& clock);

  Response handle(const Request& request);

  // Domain entry points, also used by the CLI and tests. `actor` is the
  // authenticated user; empty means operator.
  std::pair<UserProfile, std::string> create_user(UserProfile profile);
  std::optional<UserProfile> find_user(const UserId& id) const;
  std::vector<UserProfile> all_users() const;

  ConsumptionEvent log_event(const UserId& user, ConsumptionEvent raw);
  FixOutcome ingest_fix(const UserId& user, LocationFix fix);
  DailyFeedback submit_feedback(const UserId& user, DailyFeedback feedback);
  geo::Geofence add_fence(geo::Geofence fence, const std::vector<geo::TransitionRule>& rules,
                          const UserId& actor);

  std::vector<geo::Geofence> fences_for(const UserId& user) const;
  std::vector<ConsumptionEvent> events_for(const UserId& user,
                                           std::optional<store::TimeRange> range = {}) const;
  std::vector<DailyFeedback> feedback_for(const UserId& user) const;

  void import_pois(const std::vector<diversion::PointOfInterest>& pois);
  std::vector<diversion::PointOfInterest> pois() const;

  /// Trains and stores a model from all history up to `now`.
  predictor::LstmParamsd train_user(const UserId& user, Timestamp now);
  std::optional<predictor::LstmParamsd> model_for(const UserId& user) const;
  predictor::Forecast predict(const UserId& user, Timestamp now, int horizon);

  /// Hourly scheduler body: train missing models, retrain at 03:00 local,
  /// forecast, schedule pre-relapse, daily feedback and motivational
  /// notifications. Per-user failures are logged and counted.
  TickReport hourly_tick(Timestamp now);

  /// Delivers every queued notification due at `now`.
  std::vector<diversion::Notification> dispatch_due(Timestamp now);

  /// Delivered notifications of `user`, delivered_at >= since.
  std::vector<diversion::Notification> notifications_for(const UserId& user,
                                                         std::optional<Timestamp> since) const;

  /// Delivers what is due and leaves the rest persisted as pending.
  void shutdown();

  community::Community& community() { return community_; }
  const ServiceConfig& config() const { return config_; }
  const Clock& clock() const { return clock_; }

 private:
  Response route(const Request& request, const std::optional<UserId>& actor);
  std::optional<UserId> authenticate(const Request& request) const;
  void require_access(const std::optional<UserId>& actor, const UserId& user) const;
  UserProfile require_user(const UserId& id) const;
  std::mutex& user_lock(const UserId& user);
  geo::FenceSet fence_set_for(const UserProfile& user) const;
  Timestamp history_start(const UserProfile& user) const;
  bool enqueue(diversion::Notification n);
  void reload_pending();
  std::string notification_key(const diversion::Notification& n) const;
  std::string new_id(std::string_view stem, store::Namespace ns, const UserId& user, Timestamp at,
                     std::string_view suffix = {});

  ServiceConfig config_;
  store::Store& store_;
  const Clock& clock_;
  community::Community community_;
  diversion::DiversionPlanner planner_;
  diversion::NotificationQueue queue_;

  mutable std::shared_mutex pois_mu_;
  std::vector<diversion::PointOfInterest> pois_;

  std::mutex locks_mu_;
  std::map<UserId, std::unique_ptr<std::mutex>> user_locks_;
  std::mutex fences_mu_;  // serializes fence creation and its overlap check
  std::mutex tick_mu_;
};

/// Serves `service` over HTTP until `stop` becomes true. A background loop
/// dispatches due notifications every second and runs hourly_tick at the
/// top of each hour. Throws Error{AddressInUse} when the port is taken.
class HttpServer {
 public:
  HttpServer(Service& service, std::string host, int port);
  ~HttpServer();

  /// Binds and starts serving on a background thread; returns the port
  /// (useful with port 0).
  int start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace addictfree::service
