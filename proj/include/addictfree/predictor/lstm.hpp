#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>

#include "addictfree/core/error.hpp"

namespace addictfree::predictor {

/// Feature layout per hour: alcohol oz, cigarettes, hour/23, weekday/6, stress/5.
inline constexpr int kFeatureCount = 5;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Columns are time steps, rows are features.
template <typename Scalar>
using Sequence = Matrix<Scalar>;

enum class Gate : std::size_t { Forget = 0, Input = 1, Output = 2, Candidate = 3 };
inline constexpr std::size_t kGateCount = 4;

template <typename Scalar>
struct GateParams {
  Matrix<Scalar> W;  // H x m, input weights
  Matrix<Scalar> U;  // H x H, recurrent weights
  Vector<Scalar> b;  // H
};

/// Every trainable parameter of a single-layer LSTM with a sigmoid readout.
template <typename Scalar>
struct LstmParams {
  std::array<GateParams<Scalar>, kGateCount> gates;
  Vector<Scalar> w_out;  // H
  Scalar b_out = Scalar(0);

  static LstmParams zeros(int hidden, int inputs = kFeatureCount) {
    LstmParams p;
    for (auto& g : p.gates) {
      g.W = Matrix<Scalar>::Zero(hidden, inputs);
      g.U = Matrix<Scalar>::Zero(hidden, hidden);
      g.b = Vector<Scalar>::Zero(hidden);
    }
    p.w_out = Vector<Scalar>::Zero(hidden);
    return p;
  }

  int hidden_size() const { return static_cast<int>(w_out.size()); }
  int input_size() const { return static_cast<int>(gates[0].W.cols()); }

  GateParams<Scalar>& gate(Gate g) { return gates[static_cast<std::size_t>(g)]; }
  const GateParams<Scalar>& gate(Gate g) const { return gates[static_cast<std::size_t>(g)]; }

  std::size_t parameter_count() const {
    const auto h = static_cast<std::size_t>(hidden_size());
    const auto m = static_cast<std::size_t>(input_size());
    return kGateCount * (h * m + h * h + h) + h + 1;
  }

  /// Visits every coefficient in canonical order: for each gate (f, i, o, k)
  /// W row-major, U row-major, b; then w_out, b_out.
  template <typename F>
  void for_each(F&& f) {
    for (auto& g : gates) {
      for (Eigen::Index r = 0; r < g.W.rows(); ++r)
        for (Eigen::Index c = 0; c < g.W.cols(); ++c) f(g.W(r, c));
      for (Eigen::Index r = 0; r < g.U.rows(); ++r)
        for (Eigen::Index c = 0; c < g.U.cols(); ++c) f(g.U(r, c));
      for (Eigen::Index r = 0; r < g.b.size(); ++r) f(g.b(r));
    }
    for (Eigen::Index r = 0; r < w_out.size(); ++r) f(w_out(r));
    f(b_out);
  }

  template <typename F>
  void for_each(F&& f) const {
    const_cast<LstmParams*>(this)->for_each([&](Scalar& v) { f(static_cast<const Scalar&>(v)); });
  }

  template <typename Other>
  LstmParams<Other> cast() const {
    LstmParams<Other> out;
    for (std::size_t q = 0; q < kGateCount; ++q) {
      out.gates[q].W = gates[q].W.template cast<Other>();
      out.gates[q].U = gates[q].U.template cast<Other>();
      out.gates[q].b = gates[q].b.template cast<Other>();
    }
    out.w_out = w_out.template cast<Other>();
    out.b_out = static_cast<Other>(b_out);
    return out;
  }

  /// this += alpha * other
  LstmParams& add_scaled(const LstmParams& other, Scalar alpha) {
    for (std::size_t q = 0; q < kGateCount; ++q) {
      gates[q].W += alpha * other.gates[q].W;
      gates[q].U += alpha * other.gates[q].U;
      gates[q].b += alpha * other.gates[q].b;
    }
    w_out += alpha * other.w_out;
    b_out += alpha * other.b_out;
    return *this;
  }

  Scalar squared_norm() const {
    Scalar s = b_out * b_out + w_out.squaredNorm();
    for (const auto& g : gates) s += g.W.squaredNorm() + g.U.squaredNorm() + g.b.squaredNorm();
    return s;
  }

  bool all_finite() const {
    bool ok = std::isfinite(static_cast<double>(b_out)) && w_out.allFinite();
    for (const auto& g : gates) ok = ok && g.W.allFinite() && g.U.allFinite() && g.b.allFinite();
    return ok;
  }

  bool shapes_consistent() const {
    const auto h = w_out.size();
    const auto m = gates[0].W.cols();
    for (const auto& g : gates) {
      if (g.W.rows() != h || g.W.cols() != m || g.U.rows() != h || g.U.cols() != h ||
          g.b.size() != h)
        return false;
    }
    return h > 0 && m > 0;
  }

  friend bool operator==(const LstmParams& a, const LstmParams& b) {
    if (a.b_out != b.b_out || a.w_out.size() != b.w_out.size() || a.w_out != b.w_out) return false;
    for (std::size_t q = 0; q < kGateCount; ++q) {
      const auto& x = a.gates[q];
      const auto& y = b.gates[q];
      if (x.W.rows() != y.W.rows() || x.W.cols() != y.W.cols() || x.W != y.W || x.U != y.U ||
          x.b != y.b)
        return false;
    }
    return true;
  }
};

using LstmParamsd = LstmParams<double>;

template <typename Scalar>
struct LstmState {
  Vector<Scalar> h;  // hidden state
  Vector<Scalar> c;  // memory cell

  static LstmState zeros(int hidden) {
    return {Vector<Scalar>::Zero(hidden), Vector<Scalar>::Zero(hidden)};
  }
};

template <typename Scalar>
  requires std::is_floating_point_v<Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-z))
                        : exp(z) / (Scalar(1) + exp(z));
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  return z.unaryExpr([](Scalar v) { return sigmoid(v); });
}

/// Intermediate activations of one step, kept for backpropagation.
template <typename Scalar>
struct StepTrace {
  Vector<Scalar> f, i, o, k, c, tanh_c, h;
};

template <typename Scalar>
StepTrace<Scalar> lstm_step_traced(const LstmParams<Scalar>& p,
                                   const Eigen::Ref<const Vector<Scalar>>& x,
                                   const LstmState<Scalar>& prev) {
  const auto hidden = p.hidden_size();
  if (x.size() != p.input_size() || prev.h.size() != hidden || prev.c.size() != hidden) {
    throw Error(ErrorCode::ShapeMismatch);
  }
  auto pre = [&](Gate g) -> Vector<Scalar> {
    const auto& q = p.gate(g);
    return q.W * x + q.U * prev.h + q.b;
  };
  StepTrace<Scalar> s;
  s.f = sigmoid(pre(Gate::Forget));
  s.i = sigmoid(pre(Gate::Input));
  s.o = sigmoid(pre(Gate::Output));
  s.k = pre(Gate::Candidate).array().tanh().matrix();
  s.c = s.f.cwiseProduct(prev.c) + s.i.cwiseProduct(s.k);
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = s.o.cwiseProduct(s.tanh_c);
  return s;
}

/// One recurrence step: gated memory update followed by h = o * tanh(c).
template <typename Scalar>
LstmState<Scalar> lstm_step(const LstmParams<Scalar>& p, const Eigen::Ref<const Vector<Scalar>>& x,
                            const LstmState<Scalar>& prev) {
  auto s = lstm_step_traced(p, x, prev);
  return {std::move(s.h), std::move(s.c)};
}

template <typename Scalar>
Scalar readout(const LstmParams<Scalar>& p, const Vector<Scalar>& h) {
  return sigmoid(static_cast<Scalar>(p.w_out.dot(h) + p.b_out));
}

/// Next-hour probability after every step, starting from a zero state.
template <typename Scalar>
Vector<Scalar> forward(const LstmParams<Scalar>& p, const Sequence<Scalar>& seq) {
  if (seq.cols() == 0) throw Error(ErrorCode::EmptySequence);
  if (seq.rows() != p.input_size() || !p.shapes_consistent()) {
    throw Error(ErrorCode::ShapeMismatch);
  }
  Vector<Scalar> out(seq.cols());
  auto state = LstmState<Scalar>::zeros(p.hidden_size());
  for (Eigen::Index t = 0; t < seq.cols(); ++t) {
    state = lstm_step<Scalar>(p, seq.col(t), state);
    out(t) = readout(p, state.h);
  }
  return out;
}

}  // namespace addictfree::predictor
