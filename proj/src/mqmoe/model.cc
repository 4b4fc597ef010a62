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

#include "mqfl/mqmoe/model.h"

#include <cmath>

#include "mqfl/errors.h"
#include "mqfl/nn/loss.h"

namespace mqfl::mqmoe {

using nn::Tensor;

MqmoeConfig MqmoeConfig::Reference(size_t vocab_size, size_t image_side,
                                   size_t sequence_classes, size_t image_classes) {
  MqmoeConfig c;
  c.experts.push_back({"sequence",
                       {vocab_size},
                       {{.type = "dense", .out = 16, .activation = "relu"},
                        {.type = "dense", .out = 6}},
                       sequence_classes});
  c.experts.push_back({"image",
                       {1, image_side, image_side},
                       {{.type = "conv2d", .channels = 4, .kernel = 3},
                        {.type = "relu"},
                        {.type = "maxpool", .k = 2},
                        {.type = "dense", .out = 6}},
                       image_classes});
  return c;
}

std::vector<double> Combine(const std::vector<double>& gate,
                            const std::vector<std::vector<double>>& experts) {
  if (gate.size() != experts.size() || experts.empty()) {
    throw ContractViolation("gate has " + std::to_string(gate.size()) + " weights for " +
                            std::to_string(experts.size()) + " experts");
  }
  std::vector<double> y(experts[0].size(), 0.0);
  for (size_t j = 0; j < experts.size(); ++j) {
    if (experts[j].size() != y.size()) throw ContractViolation("expert widths differ");
    for (size_t i = 0; i < y.size(); ++i) y[i] += gate[j] * experts[j][i];
  }
  return y;
}

MqmoeModel::MqmoeModel(const MqmoeConfig& config, uint64_t seed) : config_(config) {
  if (config.experts.empty()) throw ConfigError("at least one expert is required", "experts");
  if (config.qubits < 1) throw ConfigError("qubits must be positive", "qubits");
  nn::Prng prng(seed);
  const size_t d = static_cast<size_t>(config.qubits);
  for (size_t j = 0; j < config.experts.size(); ++j) {
    const ExpertConfig& e = config.experts[j];
    if (e.classes < 2) throw ConfigError("a head needs at least two classes", "classes");
    auto specs = e.encoder;
    if (config.quantum) {
      specs.push_back({.type = "quantum", .qubits = config.qubits, .layers = config.pqc_layers});
    } else {
      specs.push_back({.type = "dense", .out = d, .activation = "tanh"});
    }
    // The circuit takes one feature per wire.
    nn::Prng probe_rng(0);
    auto encoder_only = nn::BuildSequential(e.encoder, e.input_shape, probe_rng, "probe");
    if (encoder_only->OutputShape(e.input_shape) != nn::Shape{d}) {
      throw ConfigError("encoder for '" + e.modality + "' does not end in " +
                            std::to_string(d) + " features",
                        "experts." + e.modality + ".encoder");
    }
    experts_.push_back(nn::BuildSequential(specs, e.input_shape, prng, "expert." + e.modality));
  }
  const size_t m = experts_.size();
  mha_ = std::make_unique<nn::MultiHeadAttention>(d, config.attention_heads, prng, "gate.mha");
  gate_ = std::make_unique<nn::Dense>(m * d, m, prng, "gate.fc");
  for (size_t j = 0; j < m; ++j) {
    heads_.push_back(std::make_unique<nn::Dense>(
        d, config.experts[j].classes, prng, "head." + config.experts[j].modality));
  }
}

std::vector<nn::Param*> MqmoeModel::Params() {
  std::vector<nn::Param*> out;
  for (auto& e : experts_)
    for (auto* p : e->Params()) out.push_back(p);
  for (auto* p : mha_->Params()) out.push_back(p);
  for (auto* p : gate_->Params()) out.push_back(p);
  for (auto& h : heads_)
    for (auto* p : h->Params()) out.push_back(p);
  return out;
}

std::vector<double> MqmoeModel::ExpertForward(size_t j, const Tensor& x) {
  if (j >= experts_.size()) throw ContractViolation("expert index out of range");
  return experts_[j]->Forward(x).vec();
}

std::vector<double> MqmoeModel::Gate(const Tensor& fused) {
  return nn::Softmax(gate_->Forward(fused).values());
}

void MqmoeModel::OverrideGate(std::optional<std::vector<double>> gate) {
  if (gate) {
    if (gate->size() != experts_.size()) throw ContractViolation("gate override length");
    double s = 0;
    for (double g : *gate) {
      if (!(g >= 0.0)) throw ContractViolation("gate override must be non-negative");
      s += g;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw ContractViolation("gate override must sum to 1");
  }
  gate_override_ = std::move(gate);
}

void MqmoeModel::Forward(const nn::Example& ex) {
  const size_t m = experts_.size();
  const size_t d = static_cast<size_t>(config_.qubits);
  if (ex.inputs.size() < m) {
    throw InputError("sample provides " + std::to_string(ex.inputs.size()) + " of " +
                     std::to_string(m) + " modalities");
  }
  trace_.expert_outputs.assign(m, {});
  Tensor tokens({m, d});
  for (size_t j = 0; j < m; ++j) {
    if (ex.inputs[j].size() == 0) {
      throw InputError("modality '" + config_.experts[j].modality + "' missing");
    }
    trace_.expert_outputs[j] = ExpertForward(j, ex.inputs[j]);
    for (size_t i = 0; i < d; ++i) tokens[j * d + i] = trace_.expert_outputs[j][i];
  }
  trace_.fused = mha_->Forward(tokens).Reshaped({m * d});
  trace_.gate = gate_override_ ? *gate_override_ : Gate(trace_.fused);
  trace_.combined = Combine(trace_.gate, trace_.expert_outputs);
  trace_.logits.assign(m, {});
  Tensor y = Tensor::Vector(trace_.combined);
  for (size_t j = 0; j < m; ++j) trace_.logits[j] = heads_[j]->Forward(y).vec();
}

std::vector<std::vector<double>> MqmoeModel::Logits(const nn::Example& ex) {
  Forward(ex);
  return trace_.logits;
}

double MqmoeModel::ForwardBackward(const nn::Example& ex) {
  const size_t m = experts_.size();
  const size_t d = static_cast<size_t>(config_.qubits);
  if (ex.labels.size() < m) throw InputError("sample needs one label per modality");
  Forward(ex);

  double loss = 0.0;
  std::vector<double> dy(d, 0.0);
  for (size_t j = 0; j < m; ++j) {
    std::vector<double> g;
    loss += nn::SoftmaxCrossEntropy(trace_.logits[j], ex.labels[j], &g);
    Tensor gy = heads_[j]->Backward(Tensor::Vector(std::move(g)));
    for (size_t i = 0; i < d; ++i) dy[i] += gy[i];
  }

  // Combination path.
  std::vector<Tensor> de(m, Tensor({d}));
  std::vector<double> dgate(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    for (size_t i = 0; i < d; ++i) {
      de[j][i] = trace_.gate[j] * dy[i];
      dgate[j] += trace_.expert_outputs[j][i] * dy[i];
    }
  }

  // Gating path; a pinned gate has no dependence on the inputs.
  if (!gate_override_) {
    auto dz = nn::SoftmaxBackward(trace_.gate, dgate);
    Tensor dfused = gate_->Backward(Tensor::Vector(std::move(dz)));
    Tensor dtokens = mha_->Backward(dfused.Reshaped({m, d}));
    for (size_t j = 0; j < m; ++j)
      for (size_t i = 0; i < d; ++i) de[j][i] += dtokens[j * d + i];
  }

  for (size_t j = 0; j < m; ++j) experts_[j]->Backward(de[j]);
  return loss;
}

}  // namespace mqfl::mqmoe
