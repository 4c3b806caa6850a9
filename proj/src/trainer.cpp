#include "emigrade/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "emigrade/errors.hpp"

namespace emigrade {
namespace {

std::string formatted(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

std::vector<Sample> load_split(const DatasetManifest& manifest, const std::string& root,
                               Split split) {
  std::vector<Sample> out;
  for (const ManifestEntry& entry : manifest.entries) {
    if (entry.split != split) continue;
    const std::filesystem::path path = std::filesystem::path(root) / entry.path;
    out.push_back(make_sample(load_emif(path.string()), entry.level));
  }
  if (out.empty()) {
    throw DataError(std::string("manifest has no entries for the ") + split_name(split) +
                    " split");
  }
  return out;
}

MetricsReport evaluate(const Network<float>& net, const std::vector<Sample>& samples) {
  if (samples.empty()) throw DataError("evaluate: no samples");
  std::vector<int> predictions, truths;
  predictions.reserve(samples.size());
  truths.reserve(samples.size());
  for (const Sample& s : samples) {
    predictions.push_back(argmax_lowest(net.logits(s.tensor)) + 1);
    truths.push_back(s.label);
  }
  return classification_report(predictions, truths);
}

TrainOutcome train(const ModelSpec& spec, const std::vector<Sample>& train_samples,
                   const std::vector<Sample>& val_samples, const TrainConfig& cfg) {
  cfg.validate();
  if (train_samples.empty()) throw DataError("train: no training samples");
  if (val_samples.empty()) throw DataError("train: no validation samples");

  Network<float> net = Network<float>::he_initialized(spec, cfg.seed);

  TrainOutcome out;
  out.train_count = static_cast<int>(train_samples.size());
  out.val_count = static_cast<int>(val_samples.size());
  out.best_val_accuracy = -1.0;

  if (cfg.epochs == 0) {
    out.best = checkpoint_of(net, spec.model_id, 0);
    out.best_epoch = 0;
    out.best_val_accuracy = evaluate(net, val_samples).accuracy;
    out.network = std::move(net);
    return out;
  }

  const int n = static_cast<int>(train_samples.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<LayerState<float>>& states = net.states();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto epoch_id = static_cast<std::uint64_t>(epoch);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_stream(cfg.seed, {kStreamShuffle, epoch_id}));
    shuffle_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int end = std::min(n, start + cfg.batch_size);

      std::vector<ParamGrads<float>> batch_grads(states.size());
      for (std::size_t i = 0; i < states.size(); ++i) {
        batch_grads[i].weights = Tensor<float>(states[i].weights.shape());
        batch_grads[i].biases = Tensor<float>(states[i].biases.shape());
      }

      for (int b = start; b < end; ++b) {
        const int idx = order[static_cast<std::size_t>(b)];
        const auto sample_id = static_cast<std::uint64_t>(idx);
        Rng augment_rng(derive_stream(cfg.seed, {kStreamAugment, epoch_id, sample_id}));
        const Sample sample = augment_flip(train_samples[static_cast<std::size_t>(idx)], augment_rng);

        Rng dropout_rng(derive_stream(cfg.seed, {kStreamDropout, epoch_id, sample_id}));
        const auto forward = net.forward_train(sample.tensor, &dropout_rng);
        const auto xent = softmax_cross_entropy(forward.logits, sample.label - 1);
        if (!std::isfinite(xent.loss)) {
          throw NumericError("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch));
        }
        loss_sum += xent.loss;

        const auto backward = net.backward(forward, xent.grad_logits);
        for (std::size_t i = 0; i < states.size(); ++i) {
          batch_grads[i].weights.array() += backward.params[i].weights.array();
          batch_grads[i].biases.array() += backward.params[i].biases.array();
        }
      }

      const float inv_batch = 1.0f / static_cast<float>(end - start);
      for (std::size_t i = 0; i < states.size(); ++i) {
        batch_grads[i].weights.array() *= inv_batch;
        batch_grads[i].biases.array() *= inv_batch;
        add_l2_gradient(states[i], cfg.l2_lambda, batch_grads[i].weights);
        adam_step(states[i], batch_grads[i], cfg);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_data_loss = loss_sum / n;
    stats.train_total_loss = stats.train_data_loss + l2_penalty(states, cfg.l2_lambda);
    if (!std::isfinite(stats.train_total_loss)) {
      throw NumericError("training diverged: non-finite epoch loss at epoch " +
                         std::to_string(epoch));
    }
    stats.val_accuracy = evaluate(net, val_samples).accuracy;
    out.history.push_back(stats);

    if (stats.val_accuracy > out.best_val_accuracy) {
      out.best_val_accuracy = stats.val_accuracy;
      out.best_epoch = epoch;
      out.best = checkpoint_of(net, spec.model_id, static_cast<std::uint32_t>(epoch));
    }
  }

  out.network = std::move(net);
  return out;
}

std::string format_train_log(const TrainConfig& cfg, int model_id, const TrainOutcome& outcome) {
  std::string log;
  log += "model " + std::to_string(model_id) + "\n";
  log += "epochs " + std::to_string(cfg.epochs) + "\n";
  log += "batch_size " + std::to_string(cfg.batch_size) + "\n";
  log += "learning_rate " + formatted("%.8g", cfg.learning_rate) + "\n";
  log += "l2_lambda " + formatted("%.8g", cfg.l2_lambda) + "\n";
  log += "seed " + std::to_string(cfg.seed) + "\n";
  log += "train_samples " + std::to_string(outcome.train_count) + "\n";
  log += "val_samples " + std::to_string(outcome.val_count) + "\n";
  for (const EpochStats& s : outcome.history) {
    log += "epoch " + std::to_string(s.epoch);
    log += "  train_loss " + formatted("%.6f", s.train_data_loss);
    log += "  total_loss " + formatted("%.6f", s.train_total_loss);
    log += "  val_accuracy " + formatted("%.6f", s.val_accuracy);
    log += "\n";
  }
  log += "best_epoch " + std::to_string(outcome.best_epoch) + "\n";
  log += "best_val_accuracy " + formatted("%.6f", outcome.best_val_accuracy) + "\n";
  return log;
}

}  // namespace emigrade
