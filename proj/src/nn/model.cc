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

#include "mqfl/nn/model.h"

#include "mqfl/errors.h"
#include "mqfl/nn/attention.h"
#include "mqfl/nn/loss.h"

namespace mqfl::nn {

void Trainable::ZeroGrad() {
  for (Param* p : Params()) p->grad.Fill(0.0);
}

void Trainable::ScaleGrad(double factor) {
  for (Param* p : Params())
    for (auto& g : p->grad.values()) g *= factor;
}

size_t Trainable::ParamCount() {
  size_t n = 0;
  for (Param* p : Params()) n += p->value.size();
  return n;
}

std::vector<std::vector<double>> Classifier::Logits(const Example& ex) {
  if (ex.inputs.size() != 1) throw InputError("classifier takes exactly one input");
  return {net_->Forward(ex.inputs[0]).vec()};
}

double Classifier::ForwardBackward(const Example& ex) {
  if (ex.inputs.size() != 1 || ex.labels.size() != 1) {
    throw InputError("classifier takes one input and one label");
  }
  Tensor logits = net_->Forward(ex.inputs[0]);
  std::vector<double> g;
  const double loss = SoftmaxCrossEntropy(logits.values(), ex.labels[0], &g);
  net_->Backward(Tensor(logits.shape(), std::move(g)));
  return loss;
}

std::unique_ptr<Sequential> BuildSequential(const std::vector<LayerSpec>& specs,
                                            const Shape& input, Prng& prng,
                                            const std::string& prefix) {
  auto seq = std::make_unique<Sequential>();
  Shape shape = input;
  int idx = 0;
  for (const LayerSpec& s : specs) {
    const std::string name = prefix + "." + std::to_string(idx++) + "." + s.type;
    std::unique_ptr<Layer> layer;
    if (s.type == "dense") {
      if (shape.size() != 1) {
        seq->Add(std::make_unique<Flatten>());
        shape = {ShapeSize(shape)};
      }
      layer = std::make_unique<Dense>(shape[0], s.out, prng, name);
    } else if (s.type == "conv2d") {
      if (shape.size() != 3) throw ConfigError("conv2d needs a [C, H, W] input", name);
      layer = std::make_unique<Conv2d>(shape[0], s.channels, s.kernel, prng, name);
    } else if (s.type == "maxpool") {
      layer = std::make_unique<MaxPool2d>(s.k);
    } else if (s.type == "flatten") {
      layer = std::make_unique<Flatten>();
    } else if (s.type == "relu") {
      layer = std::make_unique<ActivationLayer>(Activation::kRelu);
    } else if (s.type == "tanh") {
      layer = std::make_unique<ActivationLayer>(Activation::kTanh);
    } else if (s.type == "quantum") {
      layer = std::make_unique<QuantumLayer>(s.qubits, s.layers, prng, name);
    } else if (s.type == "mha") {
      if (shape.size() != 2) throw ConfigError("mha needs a [T, d_model] input", name);
      layer = std::make_unique<MultiHeadAttention>(shape[1], s.heads, prng, name);
    } else {
      throw ConfigError("unknown layer type '" + s.type + "'", "layers");
    }
    try {
      shape = layer->OutputShape(shape);
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("layer shapes do not compose: ") + e.what(), name);
    }
    seq->Add(std::move(layer));
    if (s.type == "dense" && !s.activation.empty()) {
      Activation act = ParseActivation(s.activation);
      if (act != Activation::kNone) seq->Add(std::make_unique<ActivationLayer>(act));
    }
  }
  return seq;
}

}  // namespace mqfl::nn
