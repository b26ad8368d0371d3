#pragma once

// Central-difference gradient evaluated in long double, plus the random
// fixtures the gradient checks share.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "addictfree/predictor/training.hpp"

namespace gradcheck {

using namespace addictfree::predictor;

inline LstmParamsd random_params(int hidden, int inputs, unsigned seed, double scale = 0.5) {
  auto p = LstmParamsd::zeros(hidden, inputs);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  p.for_each([&](double& v) { v = u(rng); });
  return p;
}

inline Sequence<double> random_sequence(int inputs, int steps, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sequence<double> s(inputs, steps);
  for (int t = 0; t < steps; ++t)
    for (int r = 0; r < inputs; ++r) s(r, t) = u(rng);
  return s;
}

inline Vector<double> random_labels(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(0.3);
  Vector<double> y(n);
  for (int i = 0; i < n; ++i) y(i) = b(rng) ? 1.0 : 0.0;
  return y;
}

inline LstmParamsd numeric_gradient(const LstmParamsd& p, const Batch& batch, long double step) {
  const auto pl = p.cast<long double>();
  BasicBatch<long double> bl;
  for (const auto& s : batch) bl.push_back(s.cast<long double>());
  std::vector<long double*> coords;
  auto probe = pl;
  probe.for_each([&](long double& v) { coords.push_back(&v); });
  std::vector<double> g;
  for (auto* v : coords) {
    const long double saved = *v;
    *v = saved + step;
    const long double up = loss(probe, bl);
    *v = saved - step;
    const long double down = loss(probe, bl);
    *v = saved;
    g.push_back(static_cast<double>((up - down) / (2 * step)));
  }
  auto out = LstmParamsd::zeros(p.hidden_size(), p.input_size());
  std::size_t n = 0;
  out.for_each([&](double& v) { v = g[n++]; });
  return out;
}

/// Largest |a - n| / max(|a|, |n|, 1e-8) over all coordinates.
inline double max_relative_error(const LstmParamsd& analytic, const LstmParamsd& numeric) {
  std::vector<double> a, n;
  analytic.for_each([&](double v) { a.push_back(v); });
  numeric.for_each([&](double v) { n.push_back(v); });
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double denom = std::max({std::abs(a[k]), std::abs(n[k]), 1e-8});
    worst = std::max(worst, std::abs(a[k] - n[k]) / denom);
  }
  return worst;
}

}  // namespace gradcheck
