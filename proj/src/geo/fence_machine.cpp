#include "addictfree/geo/fence_machine.hpp"

#include <algorithm>
#include <cmath>

#include "addictfree/core/error.hpp"

namespace addictfree::geo {

std::string_view to_string(FenceEventKind k) {
  switch (k) {
    case FenceEventKind::Entered: return "entered";
    case FenceEventKind::DwellConfirmed: return "dwell-confirmed";
    case FenceEventKind::Exited: return "exited";
    case FenceEventKind::DwellViolation: return "dwell-violation";
    case FenceEventKind::TransitCompleted: return "transit-completed";
    case FenceEventKind::TransitViolation: return "transit-violation";
  }
  return "unknown";
}

std::string format_event(const FenceEvent& e) {
  std::string line = format_timestamp(e.at);
  line += ' ';
  line += e.user_id;
  line += ' ';
  line += to_string(e.kind);
  line += ' ';
  line += e.fence_id;
  if (e.to_fence) {
    line += "->";
    line += *e.to_fence;
  }
  return line;
}

FenceSet::FenceSet(std::vector<Geofence> fences, std::vector<TransitionRule> transitions)
    : fences_(std::move(fences)), transitions_(std::move(transitions)) {}

const Geofence* FenceSet::locate(const GeoPoint& p) const {
  const Geofence* hit = nullptr;
  for (const auto& f : fences_) {
    if (!fence_contains(f, p)) continue;
    if (hit) {
      throw Error(ErrorCode::AmbiguousFences,
                  "fix inside both '" + hit->fence_id + "' and '" + f.fence_id + "'");
    }
    hit = &f;
  }
  return hit;
}

const Geofence* FenceSet::find(const FenceId& id) const {
  auto it = std::find_if(fences_.begin(), fences_.end(),
                         [&](const Geofence& f) { return f.fence_id == id; });
  return it == fences_.end() ? nullptr : &*it;
}

const DurationConstraint* FenceSet::transition(const FenceId& from, const FenceId& to) const {
  for (const auto& t : transitions_) {
    if (t.from == from && t.to == to) return &t.bounds;
  }
  return nullptr;
}

Seconds FenceSet::transit_window(const FenceId& from, const MachineOptions& options) const {
  double window = static_cast<double>(options.transit_window.count());
  for (const auto& t : transitions_) {
    if (t.from == from) window = std::max(window, t.bounds.l_max);
  }
  return Seconds{static_cast<Seconds::rep>(std::ceil(window))};
}

namespace {

double seconds_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count());
}

class Stepper {
 public:
  Stepper(const FenceMachine& m, const FenceSet& fences, const LocationFix& fix,
          const MachineOptions& options)
      : m_(m), fences_(fences), fix_(fix), options_(options) {}

  StepResult run() {
    if (m_.last_fix_at && fix_.at < *m_.last_fix_at) {
      throw Error(ErrorCode::OutOfOrderFix, "fix at " + format_timestamp(fix_.at) +
                                                " precedes " + format_timestamp(*m_.last_fix_at));
    }
    if (m_.user_id.empty()) m_.user_id = fix_.user_id;
    const Geofence* here = fences_.locate(fix_.point);

    expire_stale_modes();

    if (auto* inside = std::get_if<FenceMachine::Inside>(&m_.mode)) {
      if (here && here->fence_id == inside->fence) {
        evaluate_dwell(*inside, *here);
      } else {
        FenceId left = inside->fence;
        emit(left, FenceEventKind::Exited, fix_.at);
        if (here) {
          arrive(*here, left, fix_.at);
        } else {
          m_.mode = FenceMachine::Transit{left, fix_.at};
        }
      }
    } else if (auto* transit = std::get_if<FenceMachine::Transit>(&m_.mode)) {
      if (here) {
        FenceMachine::Transit t = *transit;
        arrive(*here, t.from, t.since);
      }
    } else if (here) {
      enter(*here);
    }

    m_.last_fix_at = fix_.at;
    return {std::move(m_), std::move(events_)};
  }

 private:
  void expire_stale_modes() {
    if (auto* inside = std::get_if<FenceMachine::Inside>(&m_.mode)) {
      if (m_.last_fix_at && fix_.at - *m_.last_fix_at > options_.gap_limit) {
        emit(inside->fence, FenceEventKind::Exited, *m_.last_fix_at);
        m_.mode = FenceMachine::Outside{};
      }
    } else if (auto* transit = std::get_if<FenceMachine::Transit>(&m_.mode)) {
      if (fix_.at - transit->since > fences_.transit_window(transit->from, options_)) {
        m_.mode = FenceMachine::Outside{};
      }
    }
  }

  void enter(const Geofence& fence) {
    emit(fence.fence_id, FenceEventKind::Entered, fix_.at);
    m_.mode = FenceMachine::Inside{fence.fence_id, fix_.at, false, false};
  }

  // Entering `fence` at this fix after leaving `from` at `left_at`.
  void arrive(const Geofence& fence, const FenceId& from, Timestamp left_at) {
    enter(fence);
    const double travel = seconds_between(left_at, fix_.at);
    FenceEventKind outcome = FenceEventKind::TransitCompleted;
    if (const auto* rule = fences_.transition(from, fence.fence_id)) {
      if (travel < rule->l_min || travel > rule->l_max) {
        outcome = FenceEventKind::TransitViolation;
      }
    }
    emit(from, outcome, fix_.at, fence.fence_id);
  }

  void evaluate_dwell(FenceMachine::Inside& inside, const Geofence& fence) {
    const double dwell = seconds_between(inside.since, fix_.at);
    const auto& c = fence.state_constraint;
    const double l_min = c ? c->l_min : 0.0;
    if (!inside.confirmed && dwell > 0.0 && dwell >= l_min) {
      inside.confirmed = true;
      emit(inside.fence, FenceEventKind::DwellConfirmed, fix_.at);
    }
    if (c && !inside.violated && dwell > c->l_max) {
      inside.violated = true;
      emit(inside.fence, FenceEventKind::DwellViolation, fix_.at);
    }
  }

  void emit(const FenceId& fence, FenceEventKind kind, Timestamp at,
            std::optional<FenceId> to = std::nullopt) {
    events_.push_back(FenceEvent{m_.user_id, fence, std::move(to), kind, at});
  }

  FenceMachine m_;
  const FenceSet& fences_;
  const LocationFix& fix_;
  const MachineOptions& options_;
  std::vector<FenceEvent> events_;
};

}  // namespace

StepResult step(const FenceMachine& machine, const FenceSet& fences, const LocationFix& fix,
                const MachineOptions& options) {
  return Stepper(machine, fences, fix, options).run();
}

std::vector<FenceEvent> replay(const UserId& user, const FenceSet& fences,
                               const std::vector<LocationFix>& fixes,
                               const MachineOptions& options) {
  FenceMachine machine;
  machine.user_id = user;
  std::vector<FenceEvent> out;
  for (const auto& fix : fixes) {
    auto r = step(machine, fences, fix, options);
    machine = std::move(r.machine);
    out.insert(out.end(), r.events.begin(), r.events.end());
  }
  return out;
}

}  // namespace addictfree::geo
