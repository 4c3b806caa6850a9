#pragma once

#include <string>
#include <vector>

#include "emigrade/checkpoint.hpp"
#include "emigrade/dataset.hpp"
#include "emigrade/metrics.hpp"
#include "emigrade/network.hpp"
#include "emigrade/optim.hpp"
#include "emigrade/preprocess.hpp"

namespace emigrade {

// Loads every frame of one split, already preprocessed to network input form.
// `root` is the directory containing the manifest; entries stay in manifest
// order so RNG streams keyed on sample index are reproducible.
std::vector<Sample> load_split(const DatasetManifest& manifest, const std::string& root,
                               Split split);

struct EpochStats {
  int epoch = 0;                 // 1-based
  double train_data_loss = 0.0;  // mean cross-entropy over the epoch's samples
  double train_total_loss = 0.0;  // data loss plus the L2 penalty at epoch end
  double val_accuracy = 0.0;
};

struct TrainOutcome {
  Network<float> network;  // parameters after the final epoch
  Checkpoint best;         // parameters at the best validation epoch
  int best_epoch = 0;      // 0 when epochs == 0
  double best_val_accuracy = 0.0;
  int train_count = 0;
  int val_count = 0;
  std::vector<EpochStats> history;
};

// Runs argmax grading over `samples` (no augmentation, no dropout) and builds
// the classification report against their labels.
MetricsReport evaluate(const Network<float>& net, const std::vector<Sample>& samples);

// Trains `spec` from He-initialised weights. Each epoch shuffles the sample
// order, draws fresh flip augmentation and dropout per sample, accumulates
// batch-mean gradients (plus the L2 term when l2_lambda > 0) and applies one
// Adam step per batch. All randomness derives from cfg.seed, so identical
// inputs reproduce identical parameters. Non-finite loss raises NumericError.
// With epochs == 0 the initialised network is returned untrained.
TrainOutcome train(const ModelSpec& spec, const std::vector<Sample>& train_samples,
                   const std::vector<Sample>& val_samples, const TrainConfig& cfg);

// Deterministic textual run record (fixed precision, no timestamps): the
// hyperparameters, one line per epoch, and the best-epoch summary.
std::string format_train_log(const TrainConfig& cfg, int model_id, const TrainOutcome& outcome);

}  // namespace emigrade
