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

#include "mqfl/nn/train.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "mqfl/errors.h"
#include "mqfl/nn/loss.h"
#include "mqfl/nn/optimizer.h"

namespace mqfl::nn {

void TrainConfig::Validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive", "lr");
  if (!(plateau_lr > 0.0)) throw ConfigError("plateau learning rate must be positive", "plateau_lr");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1", "batch_size");
  if (epochs < 0) throw ConfigError("epochs must be non-negative", "epochs");
  if (plateau_patience < 1) throw ConfigError("plateau patience must be >= 1", "plateau_patience");
  if (optimizer != "adam" && optimizer != "sgd") {
    throw ConfigError("unknown optimizer '" + optimizer + "'", "optimizer");
  }
}

double EvalResult::MeanAccuracy() const {
  if (accuracy.empty()) return 0.0;
  return std::accumulate(accuracy.begin(), accuracy.end(), 0.0) /
         static_cast<double>(accuracy.size());
}

EvalResult Evaluate(Trainable& model, std::span<const Example> data) {
  const size_t heads = model.num_heads();
  EvalResult r;
  r.accuracy.assign(heads, 0.0);
  r.probs.assign(heads, {});
  r.predictions.assign(heads, {});
  r.labels.assign(heads, {});
  if (data.empty()) return r;
  double loss = 0.0;
  for (const Example& ex : data) {
    auto logits = model.Logits(ex);
    if (logits.size() != heads || ex.labels.size() != heads) {
      throw InputError("example does not provide one label per head");
    }
    for (size_t h = 0; h < heads; ++h) {
      auto p = Softmax(logits[h]);
      loss += CrossEntropy(p, ex.labels[h]);
      const int pred = static_cast<int>(Argmax(p));
      r.accuracy[h] += pred == ex.labels[h] ? 1.0 : 0.0;
      r.predictions[h].push_back(pred);
      r.labels[h].push_back(ex.labels[h]);
      r.probs[h].push_back(std::move(p));
    }
  }
  const double n = static_cast<double>(data.size());
  for (auto& a : r.accuracy) a /= n;
  r.loss = loss / n;
  return r;
}

TrainResult TrainLocal(Trainable& model, std::span<const Example> data,
                       const TrainConfig& config, std::span<const Example> validation,
                       const std::function<void(const EpochStats&)>& on_epoch) {
  config.Validate();
  if (data.empty()) throw InputError("cannot train on an empty dataset");
  auto optimizer = MakeOptimizer(config.optimizer, config.lr);
  std::mt19937_64 prng(config.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto params = model.Params();

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr_used = optimizer->lr();
    std::shuffle(order.begin(), order.end(), prng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      model.ZeroGrad();
      for (size_t i = start; i < end; ++i) model.ForwardBackward(data[order[i]]);
      model.ScaleGrad(1.0 / static_cast<double>(end - start));
      optimizer->Step(params);
    }
    EvalResult ev = Evaluate(model, data);
    EpochStats st;
    st.epoch = epoch + 1;
    st.loss = ev.loss;
    st.accuracy = ev.MeanAccuracy();
    st.head_accuracy = ev.accuracy;
    st.lr = lr_used;
    double monitored = ev.loss;
    if (!validation.empty()) {
      st.val_loss = Evaluate(model, validation).loss;
      monitored = st.val_loss;
    }
    result.history.push_back(st);

    if (best - monitored < config.plateau_delta) {
      if (++stall >= config.plateau_patience && !result.plateau_triggered) {
        optimizer->set_lr(config.plateau_lr);
        result.plateau_triggered = true;
      }
    } else {
      stall = 0;
    }
    best = std::min(best, monitored);
    if (on_epoch) on_epoch(st);
  }
  model.ZeroGrad();
  result.weights = FlattenWeights(model);
  return result;
}

}  // namespace mqfl::nn
