#include <atomic>
#include <condition_variable>
#include <thread>

#include <spdlog/spdlog.h>

#include "addictfree/core/error.hpp"
#include "addictfree/service/service.hpp"
#include "httplib.h"

namespace addictfree::service {

struct HttpServer::Impl {
  Service& service;
  std::string host;
  int port;
  httplib::Server server;
  std::thread listener;
  std::thread scheduler;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;

  Impl(Service& s, std::string h, int p) : service(s), host(std::move(h)), port(p) {}

  void handle(const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    req.body = in.body;
    const auto auth = in.get_header_value("Authorization");
    if (auth.rfind("Bearer ", 0) == 0) req.bearer = auth.substr(7);
    const Response res = service.handle(req);
    out.status = res.status;
    out.set_content(res.body, res.content_type.c_str());
  }

  // Dispatches due notifications every second and ticks once per hour.
  void schedule_loop() {
    std::optional<Timestamp> last_tick;
    std::unique_lock lock(mu);
    while (!stopping) {
      lock.unlock();
      const Timestamp now = service.clock().now();
      try {
        service.dispatch_due(now);
        const Timestamp hour = floor_hour(now);
        if (!last_tick || hour > *last_tick) {
          last_tick = hour;
          const auto r = service.hourly_tick(now);
          spdlog::info("tick: {} users, {} trained, {} scheduled, {} failures", r.users, r.trained,
                       r.scheduled, r.failures);
        }
      } catch (const std::exception& e) {
        spdlog::error("scheduler: {}", e.what());
      }
      lock.lock();
      cv.wait_for(lock, std::chrono::seconds{1}, [this] { return stopping; });
    }
  }
};

HttpServer::HttpServer(Service& service, std::string host, int port)
    : impl_(std::make_unique<Impl>(service, std::move(host), port)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
  auto& s = impl_->server;
  const auto h = [this](const httplib::Request& in, httplib::Response& out) { impl_->handle(in, out); };
  s.Get(".*", h);
  s.Post(".*", h);
  s.Put(".*", h);
  s.Delete(".*", h);
  int port = impl_->port;
  if (port == 0) {
    port = s.bind_to_any_port(impl_->host);
  } else if (!s.bind_to_port(impl_->host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::AddressInUse,
                "cannot bind " + impl_->host + ":" + std::to_string(impl_->port));
  }
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->scheduler = std::thread([this] { impl_->schedule_loop(); });
  spdlog::info("listening on {}:{}", impl_->host, port);
  return port;
}

void HttpServer::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping) return;
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->scheduler.joinable()) impl_->scheduler.join();
  impl_->service.shutdown();
}

}  // namespace addictfree::service
