/*
 * Copyright 2026 The MQFL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MQFL_NN_TRAIN_H_
#define MQFL_NN_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mqfl/nn/model.h"
#include "mqfl/nn/weights.h"

namespace mqfl::nn {

struct TrainConfig {
  double lr = 1e-3;
  // Learning rate switched to once the monitored loss stalls.
  double plateau_lr = 3e-3;
  // Stall = improvement below plateau_delta for plateau_patience epochs.
  double plateau_delta = 1e-4;
  int plateau_patience = 3;
  size_t batch_size = 8;
  int epochs = 1;
  uint64_t seed = 0;
  std::string optimizer = "adam";

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;      // mean over the training set after the epoch
  double accuracy = 0.0;  // mean over heads
  std::vector<double> head_accuracy;
  double lr = 0.0;        // rate used during the epoch
  double val_loss = -1.0; // -1 when no validation set is given
};

struct TrainResult {
  FlatWeights weights;
  std::vector<EpochStats> history;
  bool plateau_triggered = false;
};

struct EvalResult {
  double loss = 0.0;                           // mean summed-head loss
  std::vector<double> accuracy;                // per head
  std::vector<std::vector<std::vector<double>>> probs;  // [head][sample][class]
  std::vector<std::vector<int>> predictions;   // [head][sample]
  std::vector<std::vector<int>> labels;        // [head][sample]

  double MeanAccuracy() const;
};

// Mini-batch training with a seeded shuffle. Gradients within a batch are
// summed in sample order, then averaged. Deterministic in (model, data,
// config). Throws InputError on an empty dataset. `on_epoch` runs after
// each epoch's statistics are recorded.
TrainResult TrainLocal(Trainable& model, std::span<const Example> data,
                       const TrainConfig& config,
                       std::span<const Example> validation = {},
                       const std::function<void(const EpochStats&)>& on_epoch = {});

EvalResult Evaluate(Trainable& model, std::span<const Example> data);

}  // namespace mqfl::nn

#endif  // MQFL_NN_TRAIN_H_
