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

#ifndef MQFL_MQMOE_MODEL_H_
#define MQFL_MQMOE_MODEL_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mqfl/nn/attention.h"
#include "mqfl/nn/layers.h"
#include "mqfl/nn/model.h"

namespace mqfl::mqmoe {

// One modality: its input shape and the classical encoder in front of the
// circuit. The encoder must end with exactly `qubits` features.
struct ExpertConfig {
  std::string modality;
  nn::Shape input_shape;
  std::vector<nn::LayerSpec> encoder;
  size_t classes = 2;  // output head width for this modality
};

struct MqmoeConfig {
  std::vector<ExpertConfig> experts;
  int qubits = 6;
  int pqc_layers = 2;
  size_t attention_heads = 2;
  // false swaps each circuit for dense(qubits) + tanh.
  bool quantum = true;

  // Sequence expert (TF-IDF -> 16 relu -> qubits) and image expert
  // (conv 4x3x3 -> relu -> pool 2 -> qubits).
  static MqmoeConfig Reference(size_t vocab_size, size_t image_side,
                               size_t sequence_classes, size_t image_classes);
};

// Weighted sum of expert outputs; throws ContractViolation on length mismatch.
std::vector<double> Combine(const std::vector<double>& gate,
                            const std::vector<std::vector<double>>& experts);

// Experts -> token matrix -> MHA -> flatten -> dense -> softmax gate ->
// weighted sum -> one dense head per modality.
class MqmoeModel : public nn::Trainable {
 public:
  MqmoeModel(const MqmoeConfig& config, uint64_t seed);

  size_t num_heads() const override { return experts_.size(); }
  size_t num_experts() const { return experts_.size(); }
  std::vector<std::vector<double>> Logits(const nn::Example& ex) override;
  double ForwardBackward(const nn::Example& ex) override;
  std::vector<nn::Param*> Params() override;

  const MqmoeConfig& config() const { return config_; }

  std::vector<double> ExpertForward(size_t j, const nn::Tensor& x);
  // Gate weights for a fused [m * d] feature vector.
  std::vector<double> Gate(const nn::Tensor& fused);

  // Intermediate values of the last forward pass.
  struct Trace {
    std::vector<std::vector<double>> expert_outputs;
    nn::Tensor fused;
    std::vector<double> gate;
    std::vector<double> combined;
    std::vector<std::vector<double>> logits;
  };
  const Trace& last_trace() const { return trace_; }

  // Pins the gate to fixed weights (must lie on the simplex); nullopt
  // restores the learned gate.
  void OverrideGate(std::optional<std::vector<double>> gate);

  nn::Sequential& expert(size_t j) { return *experts_[j]; }
  nn::MultiHeadAttention& attention() { return *mha_; }
  nn::Dense& gate_layer() { return *gate_; }
  nn::Dense& head(size_t j) { return *heads_[j]; }

 private:
  void Forward(const nn::Example& ex);

  MqmoeConfig config_;
  std::vector<std::unique_ptr<nn::Sequential>> experts_;
  std::unique_ptr<nn::MultiHeadAttention> mha_;
  std::unique_ptr<nn::Dense> gate_;
  std::vector<std::unique_ptr<nn::Dense>> heads_;
  std::optional<std::vector<double>> gate_override_;
  Trace trace_;
};

}  // namespace mqfl::mqmoe

#endif  // MQFL_MQMOE_MODEL_H_
