#include "addictfree/diversion/notification_queue.hpp"

namespace addictfree::diversion {

void NotificationQueue::push(Notification n) {
  std::lock_guard lock(mu_);
  heap_.push(std::move(n));
}

std::vector<Notification> NotificationQueue::drain_due(Timestamp now) {
  std::lock_guard lock(mu_);
  std::vector<Notification> out;
  while (!heap_.empty() && heap_.top().scheduled_for <= now) {
    Notification n = heap_.top();
    heap_.pop();
    n.delivered_at = now;
    out.push_back(std::move(n));
  }
  return out;
}

std::vector<Notification> NotificationQueue::take_all() {
  std::lock_guard lock(mu_);
  std::vector<Notification> out;
  out.reserve(heap_.size());
  while (!heap_.empty()) {
    out.push_back(heap_.top());
    heap_.pop();
  }
  return out;
}

std::size_t NotificationQueue::size() const {
  std::lock_guard lock(mu_);
  return heap_.size();
}

}  // namespace addictfree::diversion
