#include "addictfree/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "addictfree/core/error.hpp"

namespace addictfree::sim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { Route = 1, Events = 2, Fixes = 3, Feedback = 4 };

class Rng {
 public:
  Rng(std::uint64_t seed, std::size_t user, Stream stream)
      : gen_(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(user) * 8 +
                                      static_cast<std::uint64_t>(stream)))) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

struct Segment {
  double t0, t1;  // seconds since scenario start
  GeoPoint a, b;
};

class Route {
 public:
  explicit Route(GeoPoint home) : pos_(home) {}

  void wait_until(double t) {
    if (t > cursor_) {
      segments_.push_back({cursor_, t, pos_, pos_});
      cursor_ = t;
    }
  }

  void dwell(double seconds) { wait_until(cursor_ + std::max(0.0, seconds)); }

  void travel(const GeoPoint& dest, double speed_mps) {
    const double duration = geo::haversine_m(pos_, dest) / speed_mps;
    if (duration > 0.0) {
      segments_.push_back({cursor_, cursor_ + duration, pos_, dest});
      cursor_ += duration;
    }
    pos_ = dest;
  }

  double cursor() const { return cursor_; }

  GeoPoint position(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t0; });
    if (it == segments_.begin()) return segments_.empty() ? pos_ : segments_.front().a;
    const Segment& s = *std::prev(it);
    if (t >= s.t1) return s.b;
    const double f = (t - s.t0) / (s.t1 - s.t0);
    // Planar interpolation in degrees; legs are short enough that the
    // great-circle deviation is negligible.
    return GeoPoint{s.a.lat() + f * (s.b.lat() - s.a.lat()),
                    s.a.lon() + f * (s.b.lon() - s.a.lon())};
  }

 private:
  GeoPoint pos_;
  double cursor_ = 0.0;
  std::vector<Segment> segments_;
};

Route build_route(const UserBehavior& u, int days, Rng& rng) {
  Route route(u.home);
  for (int day = 0; day < days; ++day) {
    route.wait_until(static_cast<double>(day) * kSecondsPerDay + u.depart_minute * 60.0);
    for (const auto& wp : u.commute) {
      route.travel(wp.point, wp.speed_mps);
      route.dwell(wp.dwell_s);
    }
    for (const auto& spot : u.favorite_spots) {
      // Both draws happen unconditionally so one spot's outcome does not
      // shift the random stream of the next.
      const double visit = rng.uniform();
      const double dwell = rng.uniform(spot.dwell_min_s, spot.dwell_max_s);
      if (visit < spot.visit_probability) {
        route.travel(spot.point, u.travel_speed_mps);
        route.dwell(dwell);
      }
    }
    route.travel(u.home, u.travel_speed_mps);
  }
  route.wait_until(static_cast<double>(days) * kSecondsPerDay);
  return route;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be in [0,1]");
  }
}

void check_speed(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, "speeds must be positive");
  }
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.days < 0) throw Error(ErrorCode::InvalidArgument, "days must be >= 0");
  for (const auto& u : s.users) {
    if (u.user_id.empty()) throw Error(ErrorCode::InvalidArgument, "user_id must be non-empty");
    for (const auto& [hour, p] : u.relapse_hours) {
      if (hour < 0 || hour > 23) throw Error(ErrorCode::InvalidArgument, "hour out of range");
      check_probability(p, "relapse probability");
    }
    check_probability(u.fix_dropout, "fix_dropout");
    check_probability(u.outage_probability, "outage_probability");
    check_probability(u.feedback_probability, "feedback_probability");
    check_speed(u.travel_speed_mps);
    for (const auto& wp : u.commute) check_speed(wp.speed_mps);
    for (const auto& spot : u.favorite_spots) {
      check_probability(spot.visit_probability, "visit_probability");
      if (spot.dwell_min_s < 0 || spot.dwell_max_s < spot.dwell_min_s) {
        throw Error(ErrorCode::InvalidArgument, "invalid dwell range");
      }
    }
    if (!(u.quantity_per_event >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "quantity must be >= 0");
    }
  }
}

GeneratedData generate(const Scenario& s) {
  validate_scenario(s);
  GeneratedData out;
  if (s.days == 0) return out;

  const double horizon = static_cast<double>(s.days) * kSecondsPerDay;
  for (std::size_t ui = 0; ui < s.users.size(); ++ui) {
    const UserBehavior& u = s.users[ui];
    Rng route_rng(s.seed, ui, Stream::Route);
    const Route route = build_route(u, s.days, route_rng);

    Rng fix_rng(s.seed, ui, Stream::Fixes);
    std::vector<std::pair<double, double>> outages;
    for (int day = 0; day < s.days; ++day) {
      const double hit = fix_rng.uniform();
      const double begin = fix_rng.uniform(0.0, kSecondsPerDay);
      const double length = fix_rng.uniform(1800.0, 7200.0);
      if (hit < u.outage_probability) {
        const double from = static_cast<double>(day) * kSecondsPerDay + begin;
        outages.emplace_back(from, from + length);
      }
    }
    const auto step = static_cast<double>(kFixInterval.count());
    for (double t = 0.0; t < horizon; t += step) {
      const bool dropped = fix_rng.uniform() < u.fix_dropout;
      const bool dark = std::any_of(outages.begin(), outages.end(), [&](const auto& o) {
        return t >= o.first && t < o.second;
      });
      if (dropped || dark) continue;
      out.fixes.push_back(LocationFix{u.user_id, route.position(t),
                                      s.start + Seconds{static_cast<std::int64_t>(t)},
                                      std::nullopt});
    }

    Rng event_rng(s.seed, ui, Stream::Events);
    Rng feedback_rng(s.seed, ui, Stream::Feedback);
    for (int day = 0; day < s.days; ++day) {
      for (const auto& [hour, p] : u.relapse_hours) {
        const double hit = event_rng.uniform();
        const auto offset = static_cast<std::int64_t>(event_rng.uniform() * kSecondsPerHour);
        if (hit >= p) continue;
        const std::int64_t secs = day * kSecondsPerDay + hour * kSecondsPerHour + offset;
        ConsumptionEvent e;
        e.event_id = u.user_id + "-d" + std::to_string(day) + "-h" + std::to_string(hour);
        e.user_id = u.user_id;
        e.substance = u.substance;
        e.quantity = u.substance == Substance::Tobacco
                         ? std::max(1.0, std::round(u.quantity_per_event))
                         : u.quantity_per_event;
        e.at = s.start + Seconds{secs};
        e.location = route.position(static_cast<double>(secs));
        e.source = EventSource::Manual;
        out.events.push_back(std::move(e));
      }
      const double hit = feedback_rng.uniform();
      const int stress = 1 + static_cast<int>(feedback_rng.uniform() * 5.0);
      if (hit < u.feedback_probability) {
        DailyFeedback fb;
        fb.user_id = u.user_id;
        fb.date = local_date(s.start + Seconds{day * kSecondsPerDay}, 0);
        fb.stress_level = std::min(stress, 5);
        out.feedback.push_back(std::move(fb));
      }
    }
  }
  return out;
}

namespace {

// Ordering key: the index of the fix at which an event becomes observable,
// then a fixed precedence among events observed at the same fix.
enum Precedence : int {
  kGapExit = -1,
  kExit = 0,
  kEnter = 1,
  kTransit = 2,
  kConfirm = 3,
  kViolation = 4,
};

struct Keyed {
  std::size_t fix;
  int precedence;
  geo::FenceEvent event;
};

struct Interval {
  std::size_t fence;
  std::size_t first;
  std::size_t last;
  enum class End { Open, Normal, Gap } end;
};

}  // namespace

std::vector<geo::FenceEvent> oracle_fence_events(const UserId& user,
                                                 const std::vector<LocationFix>& fixes,
                                                 const geo::FenceSet& fence_set,
                                                 const geo::MachineOptions& options) {
  const auto& fences = fence_set.fences();
  const std::size_t n = fixes.size();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<std::size_t> member(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && fixes[i].at < fixes[i - 1].at) throw Error(ErrorCode::OutOfOrderFix);
    for (std::size_t f = 0; f < fences.size(); ++f) {
      if (geo::haversine_m(fences[f].center, fixes[i].point) <= fences[f].radius_m) {
        if (member[i] != kNone) throw Error(ErrorCode::AmbiguousFences);
        member[i] = f;
      }
    }
  }

  auto gap_after = [&](std::size_t i) {
    return fixes[i + 1].at - fixes[i].at > options.gap_limit;
  };

  std::vector<Interval> intervals;
  for (std::size_t i = 0; i < n;) {
    if (member[i] == kNone) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && !gap_after(j) && member[j + 1] == member[i]) ++j;
    Interval iv{member[i], i, j, Interval::End::Open};
    if (j + 1 < n) iv.end = gap_after(j) ? Interval::End::Gap : Interval::End::Normal;
    intervals.push_back(iv);
    i = j + 1;
  }

  std::vector<Keyed> keyed;
  auto add = [&](std::size_t fix, int precedence, const FenceId& fence, geo::FenceEventKind kind,
                 Timestamp at, std::optional<FenceId> to = std::nullopt) {
    keyed.push_back({fix, precedence, geo::FenceEvent{user, fence, std::move(to), kind, at}});
  };

  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const Interval& iv = intervals[k];
    const geo::Geofence& fence = fences[iv.fence];
    const Timestamp entered = fixes[iv.first].at;
    add(iv.first, kEnter, fence.fence_id, geo::FenceEventKind::Entered, entered);

    const double l_min = fence.state_constraint ? fence.state_constraint->l_min : 0.0;
    for (std::size_t i = iv.first; i <= iv.last; ++i) {
      const double d = static_cast<double>((fixes[i].at - entered).count());
      if (d > 0.0 && d >= l_min) {
        add(i, kConfirm, fence.fence_id, geo::FenceEventKind::DwellConfirmed, fixes[i].at);
        break;
      }
    }
    if (fence.state_constraint) {
      for (std::size_t i = iv.first; i <= iv.last; ++i) {
        const double d = static_cast<double>((fixes[i].at - entered).count());
        if (d > fence.state_constraint->l_max) {
          add(i, kViolation, fence.fence_id, geo::FenceEventKind::DwellViolation, fixes[i].at);
          break;
        }
      }
    }

    if (iv.end == Interval::End::Gap) {
      add(iv.last + 1, kGapExit, fence.fence_id, geo::FenceEventKind::Exited, fixes[iv.last].at);
    } else if (iv.end == Interval::End::Normal) {
      const Timestamp left = fixes[iv.last + 1].at;
      add(iv.last + 1, kExit, fence.fence_id, geo::FenceEventKind::Exited, left);
      if (k + 1 < intervals.size()) {
        const Interval& next = intervals[k + 1];
        const Timestamp arrived = fixes[next.first].at;
        if (arrived - left <= fence_set.transit_window(fence.fence_id, options)) {
          const FenceId& to = fences[next.fence].fence_id;
          const double travel = static_cast<double>((arrived - left).count());
          auto kind = geo::FenceEventKind::TransitCompleted;
          if (const auto* rule = fence_set.transition(fence.fence_id, to)) {
            if (travel < rule->l_min || travel > rule->l_max) {
              kind = geo::FenceEventKind::TransitViolation;
            }
          }
          add(next.first, kTransit, fence.fence_id, kind, arrived, to);
        }
      }
    }
  }

  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.fix != b.fix ? a.fix < b.fix : a.precedence < b.precedence;
  });
  std::vector<geo::FenceEvent> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.event));
  return out;
}

double oracle_auc(const std::vector<double>& predictions, const std::vector<double>& labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::AlignmentError, "predictions and labels differ in length");
  }
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] >= 0.5 ? pos : neg).push_back(predictions[i]);
  }
  if (pos.empty() || neg.empty()) throw Error(ErrorCode::DegenerateLabels);
  double wins = 0.0;
  for (double p : pos) {
    for (double q : neg) {
      if (p > q) wins += 1.0;
      else if (p == q) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace addictfree::sim
