#pragma once

#include <vector>

#include "addictfree/core/types.hpp"
#include "addictfree/predictor/lstm.hpp"
#include "addictfree/predictor/training.hpp"

namespace addictfree::predictor {

enum FeatureIndex : int {
  kAlcoholOz = 0,
  kCigarettes = 1,
  kHourOfDay = 2,
  kDayOfWeek = 3,
  kStress = 4,
};

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

inline constexpr int kMinHistoryHours = 48;

/// Hour-bucketed features for [window_end - hours, window_end).
struct FeatureWindow {
  Timestamp start{};
  Sequence<double> features;  // kFeatureCount x hours
  Vector<double> labels;      // hours - 1; 1 iff the following hour has an event

  Eigen::Index hours() const { return features.cols(); }
  Timestamp hour_start(Eigen::Index i) const { return start + std::chrono::hours{i}; }
  LabeledSequence labeled() const { return {features, labels}; }
};

/// Calendar-only features of the hour starting at `hour_start`; quantities
/// and stress are zero.
FeatureVector calendar_features(Timestamp hour_start);

/// Events outside the window are ignored; feedback stress applies to every
/// hour of its (UTC) date. Throws Error{EmptyWindow} when window_hours < 1.
FeatureWindow extract_features(const std::vector<ConsumptionEvent>& events,
                               const std::vector<DailyFeedback>& feedback, Timestamp window_end,
                               int window_hours);

/// Sliding training windows ending at `train_end`, `train_end - stride`, ...
/// Each window spans `window_hours`, or the available history when that is
/// shorter. Throws Error{InsufficientHistory} below kMinHistoryHours.
Batch training_windows(const std::vector<ConsumptionEvent>& events,
                       const std::vector<DailyFeedback>& feedback, Timestamp history_start,
                       Timestamp train_end, int window_hours, int stride_hours = 72);

struct HourlyProbability {
  Timestamp hour_start{};
  double probability = 0.0;
};

struct Forecast {
  std::vector<HourlyProbability> hours;
  std::size_t peak = 0;  // earliest index of the maximum probability

  const HourlyProbability& peak_hour() const { return hours.at(peak); }
};

/// Rolls the model forward from the last complete hour before `now`. The
/// first entry covers the hour starting at floor_hour(now); later entries
/// assume no consumption. History before `history_start` is not used; fewer
/// than kMinHistoryHours available throws Error{InsufficientHistory}.
Forecast predict_next_hours(const LstmParamsd& p, const std::vector<ConsumptionEvent>& events,
                            const std::vector<DailyFeedback>& feedback, Timestamp now,
                            int horizon_hours, Timestamp history_start,
                            int window_hours = 720);

}  // namespace addictfree::predictor
