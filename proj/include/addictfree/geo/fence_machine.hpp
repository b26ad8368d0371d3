#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "addictfree/geo/geofence.hpp"

namespace addictfree::geo {

enum class FenceEventKind {
  Entered,
  DwellConfirmed,
  Exited,
  DwellViolation,
  TransitCompleted,
  TransitViolation,
};

struct FenceEvent {
  UserId user_id;
  FenceId fence_id;                 // the fence, or the origin of a transition
  std::optional<FenceId> to_fence;  // destination, transitions only
  FenceEventKind kind = FenceEventKind::Entered;
  Timestamp at{};

  friend bool operator==(const FenceEvent&, const FenceEvent&) = default;
};

std::string_view to_string(FenceEventKind k);

/// Canonical one-line rendering used for stream comparison and logs.
std::string format_event(const FenceEvent& e);

/// Timing policy of the machine.
struct MachineOptions {
  // Silence longer than this while inside a fence closes the visit at the
  // last fix.
  Seconds gap_limit{1800};
  // Minimum time a transit stays open waiting for a destination; the window
  // for an origin fence is max(this, largest configured l_max out of it).
  Seconds transit_window{1800};
};

/// Fences and transition rules active for one user. Fences must be pairwise
/// non-overlapping and pass validate_constraints.
class FenceSet {
 public:
  FenceSet() = default;
  FenceSet(std::vector<Geofence> fences, std::vector<TransitionRule> transitions = {});

  const std::vector<Geofence>& fences() const { return fences_; }
  const std::vector<TransitionRule>& transitions() const { return transitions_; }

  /// The single fence containing `p`, nullptr if none. Throws
  /// Error{AmbiguousFences} when two or more contain it.
  const Geofence* locate(const GeoPoint& p) const;
  const Geofence* find(const FenceId& id) const;
  const DurationConstraint* transition(const FenceId& from, const FenceId& to) const;
  Seconds transit_window(const FenceId& from, const MachineOptions& options) const;

 private:
  std::vector<Geofence> fences_;
  std::vector<TransitionRule> transitions_;
};

struct FenceMachine {
  struct Outside {
    friend bool operator==(const Outside&, const Outside&) = default;
  };
  struct Inside {
    FenceId fence;
    Timestamp since{};
    bool confirmed = false;
    bool violated = false;  // DwellViolation already reported for this visit
    friend bool operator==(const Inside&, const Inside&) = default;
  };
  struct Transit {
    FenceId from;
    Timestamp since{};
    friend bool operator==(const Transit&, const Transit&) = default;
  };
  using Mode = std::variant<Outside, Inside, Transit>;

  UserId user_id;
  Mode mode = Outside{};
  std::optional<Timestamp> last_fix_at;

  friend bool operator==(const FenceMachine&, const FenceMachine&) = default;
};

struct StepResult {
  FenceMachine machine;
  std::vector<FenceEvent> events;
};

/// Advances the machine by one fix. Throws Error{OutOfOrderFix} when the fix
/// predates the last one and Error{AmbiguousFences} when it lies in two
/// fences.
StepResult step(const FenceMachine& machine, const FenceSet& fences, const LocationFix& fix,
                const MachineOptions& options = {});

/// Replays a whole fix sequence from a fresh machine.
std::vector<FenceEvent> replay(const UserId& user, const FenceSet& fences,
                               const std::vector<LocationFix>& fixes,
                               const MachineOptions& options = {});

}  // namespace addictfree::geo
