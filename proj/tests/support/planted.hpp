#pragma once

// Planted-pattern experiment shared by the predictor tests and the acceptance
// runner: one simulated user, 60 days of training and 14 held-out days.

#include <chrono>
#include <cmath>
#include <vector>

#include "addictfree/core/time.hpp"
#include "addictfree/predictor/features.hpp"
#include "addictfree/sim/simulator.hpp"

namespace planted {

using namespace addictfree;

inline constexpr int kTrainDays = 60;
inline constexpr int kTestDays = 14;
inline constexpr int kPeakHour = 18;

struct Result {
  double auc = 0.0;
  double bayes_auc = 0.0;  // score that knows the planted probabilities
  int argmax_hits = 0;
  int test_days = kTestDays;
  predictor::LstmParamsd params;
};

inline sim::GeneratedData generate(std::uint64_t seed, double peak_p, double other_p,
                                   sim::Scenario* out = nullptr) {
  sim::Scenario s;
  s.seed = seed;
  s.days = kTrainDays + kTestDays;
  sim::UserBehavior u;
  u.user_id = "planted";
  u.substance = Substance::Tobacco;
  u.home = GeoPoint(33.58, -101.87);
  for (int h = 0; h < 24; ++h) u.relapse_hours[h] = h == kPeakHour ? peak_p : other_p;
  s.users.push_back(u);
  if (out) *out = s;
  return sim::generate(s);
}

inline Result run(std::uint64_t seed, double peak_p, double other_p,
                  predictor::TrainConfig cfg = {}) {
  sim::Scenario s;
  const auto data = generate(seed, peak_p, other_p, &s);
  const Timestamp train_end = s.start + std::chrono::days{kTrainDays};
  const auto batch = predictor::training_windows(data.events, data.feedback, s.start, train_end,
                                                 cfg.window_hours);

  Result r;
  r.params = predictor::train(predictor::init_params(cfg.hidden_size, cfg.seed), batch, cfg);

  // Held-out scoring: run over the last training window plus the test days,
  // then keep only the predictions whose label hour lies in the test days.
  const int warm = cfg.window_hours;
  const auto w = predictor::extract_features(
      data.events, data.feedback, s.start + std::chrono::days{kTrainDays + kTestDays},
      warm + kTestDays * 24);
  const auto y = predictor::forward(r.params, w.features);
  std::vector<double> pred, label, bayes;
  for (Eigen::Index t = warm - 1; t < w.hours() - 1; ++t) {
    pred.push_back(y(t));
    label.push_back(w.labels(t));
    const int next_hour = local_hour(w.hour_start(t + 1), 0);
    bayes.push_back(next_hour == kPeakHour ? peak_p : other_p);
  }
  r.auc = sim::oracle_auc(pred, label);
  r.bayes_auc = sim::oracle_auc(bayes, label);

  for (int d = kTrainDays; d < kTrainDays + kTestDays; ++d) {
    const auto f = predictor::predict_next_hours(r.params, data.events, data.feedback,
                                                 s.start + std::chrono::days{d}, 24, s.start);
    if (local_hour(f.peak_hour().hour_start, 0) == kPeakHour) ++r.argmax_hits;
  }
  return r;
}

}  // namespace planted
