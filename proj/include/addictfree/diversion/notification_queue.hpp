#pragma once

#include <mutex>
#include <queue>
#include <vector>

#include "addictfree/diversion/diversion.hpp"

namespace addictfree::diversion {

/// Pending notifications ordered by scheduled_for (then notif_id). Any
/// thread may push; one dispatcher drains.
class NotificationQueue {
 public:
  void push(Notification n);

  /// Removes every notification due at `now`, stamping delivered_at = now.
  std::vector<Notification> drain_due(Timestamp now);

  /// Everything still pending, in delivery order; the queue is left empty.
  std::vector<Notification> take_all();

  std::size_t size() const;

 private:
  struct Later {
    bool operator()(const Notification& a, const Notification& b) const {
      if (a.scheduled_for != b.scheduled_for) return a.scheduled_for > b.scheduled_for;
      return a.notif_id > b.notif_id;
    }
  };

  mutable std::mutex mu_;
  std::priority_queue<Notification, std::vector<Notification>, Later> heap_;
};

}  // namespace addictfree::diversion
