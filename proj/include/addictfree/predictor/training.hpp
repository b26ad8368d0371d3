#pragma once

#include <cstdint>
#include <vector>

#include "addictfree/predictor/lstm.hpp"

namespace addictfree::predictor {

/// A feature sequence (m x T) with T-1 next-hour labels; the prediction made
/// after the final step has no label.
template <typename Scalar>
struct BasicLabeledSequence {
  Sequence<Scalar> features;
  Vector<Scalar> labels;

  template <typename Other>
  BasicLabeledSequence<Other> cast() const {
    return {features.template cast<Other>(), labels.template cast<Other>()};
  }
};

template <typename Scalar>
using BasicBatch = std::vector<BasicLabeledSequence<Scalar>>;

using LabeledSequence = BasicLabeledSequence<double>;
using Batch = BasicBatch<double>;

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 200;
  std::uint64_t seed = 1;
  double gradient_clip = 1.0;  // global L2 norm
  int window_hours = 720;
  int hidden_size = 16;
  // Sequences per update; 0 means the whole batch.
  int minibatch = 1;
  // Train one model over all users instead of one per user.
  bool pool_users = false;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // loss of the accepted parameters after each epoch
  int rejected_epochs = 0;
  double final_learning_rate = 0.0;
};

template <typename Scalar>
void check_alignment(const LstmParams<Scalar>& p, const Sequence<Scalar>& seq,
                     Eigen::Index label_count) {
  if (seq.cols() == 0) throw Error(ErrorCode::EmptySequence);
  if (seq.rows() != p.input_size()) throw Error(ErrorCode::ShapeMismatch);
  if (label_count != seq.cols() - 1) {
    throw Error(ErrorCode::AlignmentError, "expected one label per step except the last");
  }
}

/// Sum of squared errors over labeled steps of one sequence.
template <typename Scalar>
Scalar sequence_loss(const LstmParams<Scalar>& p, const Sequence<Scalar>& seq,
                     const Vector<Scalar>& labels) {
  check_alignment(p, seq, labels.size());
  const Vector<Scalar> y = forward(p, seq);
  return (y.head(labels.size()) - labels).squaredNorm();
}

/// Squared-error training objective summed over the batch.
template <typename Scalar>
Scalar loss(const LstmParams<Scalar>& p, const BasicBatch<Scalar>& batch) {
  Scalar total(0);
  for (const auto& s : batch) total += sequence_loss(p, s.features, s.labels);
  return total;
}

/// Reported metric: square root of each sequence's squared error, summed.
double rmse_loss(const LstmParamsd& p, const Batch& batch);

/// Exact gradient of loss() by backpropagation through time.
LstmParamsd gradient(const LstmParamsd& p, const Batch& batch);
LstmParamsd gradient(const LstmParamsd& p, const LabeledSequence& seq);

/// Uniform in [-0.08, 0.08] from a seeded generator.
LstmParamsd init_params(int hidden, std::uint64_t seed, int inputs = kFeatureCount);

/// Clipped gradient descent. An epoch whose loss exceeds the best so far is
/// rolled back and the step size halved, so the returned parameters are the
/// best seen. Throws Error{DivergenceDetected} on a non-finite loss.
LstmParamsd train(const LstmParamsd& p0, const Batch& data, const TrainConfig& cfg,
                  TrainReport* report = nullptr);

}  // namespace addictfree::predictor
