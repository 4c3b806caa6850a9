#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "emigrade/layers.hpp"
#include "emigrade/tensor.hpp"

namespace emigrade {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2_lambda = 0.0;  // 0 = off
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1))
      throw std::invalid_argument("beta1/beta2 must lie in [0, 1)");
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
    if (l2_lambda < 0) throw std::invalid_argument("l2_lambda must be >= 0");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  }
};

namespace detail {

template <class S>
void adam_update(Tensor<S>& param, Tensor<S>& m, Tensor<S>& v, const Tensor<S>& grad,
                 const TrainConfig& cfg, std::int64_t t) {
  const S b1 = static_cast<S>(cfg.beta1), b2 = static_cast<S>(cfg.beta2);
  m.array() = b1 * m.array() + (S(1) - b1) * grad.array();
  v.array() = b2 * v.array() + (S(1) - b2) * grad.array().square();
  const S c1 = static_cast<S>(1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
  const S c2 = static_cast<S>(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
  const S lr = static_cast<S>(cfg.learning_rate);
  const S eps = static_cast<S>(cfg.epsilon);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace detail

// One Adam step with bias correction. The step counter is incremented before
// the correction terms are computed, so the first step uses t = 1.
template <class S>
void adam_step(LayerState<S>& state, const ParamGrads<S>& grads, const TrainConfig& cfg) {
  if (!grads.weights.same_shape(state.weights) || !grads.biases.same_shape(state.biases))
    throw std::invalid_argument("adam_step: gradient shapes do not match parameters");
  const std::int64_t t = ++state.step_count;
  detail::adam_update(state.weights, state.adam_m_w, state.adam_v_w, grads.weights, cfg, t);
  detail::adam_update(state.biases, state.adam_m_b, state.adam_v_b, grads.biases, cfg, t);
}

// lambda * sum(w^2) over conv and dense weights; biases excluded.
template <class S>
double l2_penalty(const std::vector<LayerState<S>>& states, double lambda) {
  if (lambda < 0) throw std::invalid_argument("l2 lambda must be >= 0");
  if (lambda == 0) return 0.0;
  double sum_sq = 0.0;
  for (const auto& s : states)
    sum_sq += s.weights.array().template cast<double>().square().sum();
  return lambda * sum_sq;
}

// Adds the penalty derivative 2*lambda*w onto a weight gradient.
template <class S>
void add_l2_gradient(const LayerState<S>& state, double lambda, Tensor<S>& grad_weights) {
  if (lambda == 0) return;
  if (!grad_weights.same_shape(state.weights))
    throw std::invalid_argument("add_l2_gradient: gradient shape does not match weights");
  grad_weights.array() += static_cast<S>(2.0 * lambda) * state.weights.array();
}

}  // namespace emigrade
