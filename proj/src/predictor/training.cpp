#include "addictfree/predictor/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace addictfree::predictor {

namespace {

using Vec = Vector<double>;

void accumulate_sequence_gradient(const LstmParamsd& p, const LabeledSequence& s,
                                  LstmParamsd& grad) {
  check_alignment(p, s.features, s.labels.size());
  const auto steps = s.features.cols();
  const int hidden = p.hidden_size();

  std::vector<StepTrace<double>> trace;
  trace.reserve(static_cast<std::size_t>(steps));
  std::vector<double> y(static_cast<std::size_t>(steps));
  auto state = LstmState<double>::zeros(hidden);
  for (Eigen::Index t = 0; t < steps; ++t) {
    trace.push_back(lstm_step_traced<double>(p, s.features.col(t), state));
    state.h = trace.back().h;
    state.c = trace.back().c;
    y[static_cast<std::size_t>(t)] = readout(p, state.h);
  }

  const Vec zeros = Vec::Zero(hidden);
  Vec dh_next = Vec::Zero(hidden);
  Vec dc_next = Vec::Zero(hidden);
  std::array<Vec, kGateCount> dz;

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto& st = trace[static_cast<std::size_t>(t)];
    const Vec& h_prev = t > 0 ? trace[static_cast<std::size_t>(t - 1)].h : zeros;
    const Vec& c_prev = t > 0 ? trace[static_cast<std::size_t>(t - 1)].c : zeros;

    Vec dh = dh_next;
    if (t < s.labels.size()) {
      const double yt = y[static_cast<std::size_t>(t)];
      const double da = 2.0 * (yt - s.labels(t)) * yt * (1.0 - yt);
      grad.w_out += da * st.h;
      grad.b_out += da;
      dh += da * p.w_out;
    }

    const Vec d_o = dh.cwiseProduct(st.tanh_c);
    const Vec dc = dh.cwiseProduct(st.o).cwiseProduct(
                       (1.0 - st.tanh_c.array().square()).matrix()) +
                   dc_next;

    const auto gate_slope = [](const Vec& g) { return (g.array() * (1.0 - g.array())).matrix(); };
    dz[static_cast<std::size_t>(Gate::Forget)] = dc.cwiseProduct(c_prev).cwiseProduct(gate_slope(st.f));
    dz[static_cast<std::size_t>(Gate::Input)] = dc.cwiseProduct(st.k).cwiseProduct(gate_slope(st.i));
    dz[static_cast<std::size_t>(Gate::Output)] = d_o.cwiseProduct(gate_slope(st.o));
    dz[static_cast<std::size_t>(Gate::Candidate)] =
        dc.cwiseProduct(st.i).cwiseProduct((1.0 - st.k.array().square()).matrix());

    dc_next = dc.cwiseProduct(st.f);
    dh_next.setZero();
    for (std::size_t q = 0; q < kGateCount; ++q) {
      auto& gq = grad.gates[q];
      gq.W.noalias() += dz[q] * s.features.col(t).transpose();
      gq.U.noalias() += dz[q] * h_prev.transpose();
      gq.b += dz[q];
      dh_next.noalias() += p.gates[q].U.transpose() * dz[q];
    }
  }
}

}  // namespace

double rmse_loss(const LstmParamsd& p, const Batch& batch) {
  double total = 0.0;
  for (const auto& s : batch) total += std::sqrt(sequence_loss(p, s.features, s.labels));
  return total;
}

LstmParamsd gradient(const LstmParamsd& p, const LabeledSequence& seq) {
  auto grad = LstmParamsd::zeros(p.hidden_size(), p.input_size());
  accumulate_sequence_gradient(p, seq, grad);
  return grad;
}

LstmParamsd gradient(const LstmParamsd& p, const Batch& batch) {
  auto grad = LstmParamsd::zeros(p.hidden_size(), p.input_size());
  for (const auto& s : batch) accumulate_sequence_gradient(p, s, grad);
  return grad;
}

LstmParamsd init_params(int hidden, std::uint64_t seed, int inputs) {
  if (hidden <= 0 || inputs <= 0) throw Error(ErrorCode::ShapeMismatch);
  auto p = LstmParamsd::zeros(hidden, inputs);
  std::mt19937_64 rng(seed);
  // 53 random mantissa bits; avoids the implementation-defined distribution
  // classes so checkpoints are portable across standard libraries.
  p.for_each([&](double& v) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = -0.08 + 0.16 * u;
  });
  return p;
}

LstmParamsd train(const LstmParamsd& p0, const Batch& data, const TrainConfig& cfg,
                  TrainReport* report) {
  if (cfg.learning_rate <= 0.0 || cfg.gradient_clip <= 0.0 || cfg.epochs < 0 ||
      cfg.minibatch < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid training configuration");
  }
  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = {};
  rep.final_learning_rate = cfg.learning_rate;
  if (cfg.epochs == 0 || data.empty()) return p0;

  LstmParamsd best = p0;
  double best_loss = loss(best, data);
  if (!std::isfinite(best_loss)) throw Error(ErrorCode::DivergenceDetected);

  double lr = cfg.learning_rate;
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t chunk = cfg.minibatch == 0 ? data.size() : static_cast<std::size_t>(cfg.minibatch);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with raw generator output keeps the order identical across
    // standard library implementations.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }

    LstmParamsd candidate = best;
    for (std::size_t start = 0; start < order.size(); start += chunk) {
      auto grad = LstmParamsd::zeros(candidate.hidden_size(), candidate.input_size());
      const std::size_t stop = std::min(order.size(), start + chunk);
      for (std::size_t j = start; j < stop; ++j) {
        accumulate_sequence_gradient(candidate, data[order[j]], grad);
      }
      const double norm = std::sqrt(grad.squared_norm());
      if (!std::isfinite(norm)) throw Error(ErrorCode::DivergenceDetected);
      const double scale = norm > cfg.gradient_clip ? cfg.gradient_clip / norm : 1.0;
      candidate.add_scaled(grad, -lr * scale);
    }

    const double l = loss(candidate, data);
    if (!std::isfinite(l)) throw Error(ErrorCode::DivergenceDetected);
    if (l <= best_loss) {
      best = std::move(candidate);
      best_loss = l;
    } else {
      ++rep.rejected_epochs;
      lr *= 0.5;
    }
    rep.epoch_loss.push_back(best_loss);
  }
  rep.final_learning_rate = lr;
  return best;
}

}  // namespace addictfree::predictor
