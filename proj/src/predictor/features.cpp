#include "addictfree/predictor/features.hpp"

#include <algorithm>
#include <map>

namespace addictfree::predictor {

FeatureVector calendar_features(Timestamp hour_start) {
  FeatureVector v = FeatureVector::Zero();
  v(kHourOfDay) = local_hour(hour_start, 0) / 23.0;
  v(kDayOfWeek) = iso_weekday_index(local_date(hour_start, 0)) / 6.0;
  return v;
}

FeatureWindow extract_features(const std::vector<ConsumptionEvent>& events,
                               const std::vector<DailyFeedback>& feedback, Timestamp window_end,
                               int window_hours) {
  if (window_hours < 1) throw Error(ErrorCode::EmptyWindow);
  FeatureWindow w;
  w.start = window_end - std::chrono::hours{window_hours};
  w.features.resize(kFeatureCount, window_hours);

  std::map<std::int64_t, double> stress_by_day;
  for (const auto& fb : feedback) {
    stress_by_day[std::chrono::sys_days{fb.date}.time_since_epoch().count()] =
        fb.stress_level / 5.0;
  }

  for (int t = 0; t < window_hours; ++t) {
    const Timestamp hs = w.hour_start(t);
    w.features.col(t) = calendar_features(hs);
    const auto day = std::chrono::floor<std::chrono::days>(hs).time_since_epoch().count();
    if (auto it = stress_by_day.find(day); it != stress_by_day.end()) {
      w.features(kStress, t) = it->second;
    }
  }

  std::vector<bool> has_event(static_cast<std::size_t>(window_hours), false);
  for (const auto& e : events) {
    if (e.at < w.start || e.at >= window_end) continue;
    const auto t = static_cast<Eigen::Index>((e.at - w.start) / std::chrono::hours{1});
    const int row = e.substance == Substance::Alcohol ? kAlcoholOz : kCigarettes;
    w.features(row, t) += e.quantity;
    has_event[static_cast<std::size_t>(t)] = true;
  }

  w.labels.resize(window_hours - 1);
  for (int t = 0; t + 1 < window_hours; ++t) {
    w.labels(t) = has_event[static_cast<std::size_t>(t + 1)] ? 1.0 : 0.0;
  }
  return w;
}

Batch training_windows(const std::vector<ConsumptionEvent>& events,
                       const std::vector<DailyFeedback>& feedback, Timestamp history_start,
                       Timestamp train_end, int window_hours, int stride_hours) {
  if (window_hours < 2 || stride_hours < 1) {
    throw Error(ErrorCode::InvalidArgument, "window must be >= 2 h and stride >= 1 h");
  }
  const Timestamp end = floor_hour(train_end);
  const Timestamp earliest = floor_hour(history_start);
  const auto available = (end - earliest) / std::chrono::hours{1};
  if (available < kMinHistoryHours) throw Error(ErrorCode::InsufficientHistory);

  Batch batch;
  if (available <= window_hours) {
    batch.push_back(
        extract_features(events, feedback, end, static_cast<int>(available)).labeled());
    return batch;
  }
  for (Timestamp e = end; e - std::chrono::hours{window_hours} >= earliest;
       e -= std::chrono::hours{stride_hours}) {
    batch.push_back(extract_features(events, feedback, e, window_hours).labeled());
  }
  return batch;
}

Forecast predict_next_hours(const LstmParamsd& p, const std::vector<ConsumptionEvent>& events,
                            const std::vector<DailyFeedback>& feedback, Timestamp now,
                            int horizon_hours, Timestamp history_start, int window_hours) {
  if (horizon_hours < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
  const Timestamp window_end = floor_hour(now);
  const Timestamp earliest = std::max(window_end - std::chrono::hours{window_hours},
                                      floor_hour(history_start));
  const auto available = (window_end - earliest) / std::chrono::hours{1};
  if (available < kMinHistoryHours) throw Error(ErrorCode::InsufficientHistory);

  const auto window = extract_features(events, feedback, window_end, static_cast<int>(available));

  Forecast out;
  auto state = LstmState<double>::zeros(p.hidden_size());
  for (Eigen::Index t = 0; t < window.hours(); ++t) {
    state = lstm_step<double>(p, window.features.col(t), state);
  }
  Timestamp next = window_end;
  out.hours.push_back({next, readout(p, state.h)});
  for (int k = 1; k < horizon_hours; ++k) {
    // Feed the hour just predicted, assuming it passes without consumption.
    const FeatureVector x = calendar_features(next);
    state = lstm_step<double>(p, x, state);
    next += std::chrono::hours{1};
    out.hours.push_back({next, readout(p, state.h)});
  }
  for (std::size_t i = 1; i < out.hours.size(); ++i) {
    if (out.hours[i].probability > out.hours[out.peak].probability) out.peak = i;
  }
  return out;
}

}  // namespace addictfree::predictor
